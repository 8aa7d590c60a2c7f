#include "mflda/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mflda/classify.hpp"
#include "mflda/parallel.hpp"
#include "mflda/rng.hpp"

namespace mflda {

std::pair<double, double> tau_bounds(double sup_norm, Index n, Index p,
                                     Index T) {
  if (n * T <= 1) throw ConfigError("tau bounds need n * T > 1");
  if (p < 2) throw ConfigError("tau bounds need at least two features");
  if (!(sup_norm > 0.0))
    throw NumericError("||M gamma_1||_inf is zero; nothing to threshold");
  double tau_max = sup_norm;
  double tau_min =
      tau_max * std::sqrt(std::log(static_cast<double>(p)) /
                          static_cast<double>(n * T));
  if (tau_min >= tau_max)
    throw ConfigError("tau range is empty: log(p) >= n * T");
  return {tau_min, tau_max};
}

namespace {

Vector linspace(double lo, double hi, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(n - 1);
  return v;
}

// Realized sparsity at one tau: the fraction of features the full fit
// (including active-set refinement when enabled) would select. Measuring
// the same profile the final fit produces keeps the accepted bracket
// honest; the cheaper single-shot profile can sit in band while the
// refined fit at the same tau selects nothing.
double sparsity_at(const CurveTensor& tensor, const SparseOptions& opt,
                   double tau) {
  SparseOptions local = opt;
  local.tau = tau;
  local.n_components = 1;
  SelectionProfile profile = sparse_discriminants(tensor, local);
  return static_cast<double>(profile.selected.size()) /
         static_cast<double>(tensor.n_features);
}

}  // namespace

RangeResult find_tau_range(const CurveTensor& tensor, const SparseOptions& opt,
                           const RangeSearchOptions& range) {
  if (range.grid_points < 2)
    throw ConfigError("tau grid needs at least two points");
  if (range.c_update <= 1.0)
    throw ConfigError("c_update must exceed 1");
  if (range.target_sparsity <= 0.0 || range.target_sparsity > 1.0)
    throw ConfigError("target sparsity must lie in (0, 1]");

  Index n = tensor.n_subjects();
  Index p = tensor.n_features;
  Index T = tensor.n_times();

  // The initial bounds only need the unthresholded solution.
  EigenSolution sol =
      solve_tensor(tensor, opt.mode, opt.ridge, 1, opt.max_dense_dim);
  double sup = 0.0;
  for (const auto& blk : sol.blocks)
    if (blk.eigenvalues.size() > 0)
      sup = std::max(sup,
                     blk.eigenvalues[0] * blk.gamma.col(0).cwiseAbs().maxCoeff());
  auto [lo, hi] = tau_bounds(sup, n, p, T);

  RangeResult result;
  for (int update = 0; update <= range.max_updates; ++update) {
    RangeAttempt attempt;
    attempt.tau_lo = lo;
    attempt.tau_hi = hi;
    Vector taus = linspace(lo, hi, range.grid_points);
    attempt.sparsity.resize(range.grid_points);
    for (int g = 0; g < range.grid_points; ++g)
      attempt.sparsity[g] = sparsity_at(tensor, opt, taus[g]);
    result.attempts.push_back(attempt);

    // Sparsity decreases along the grid. Prefer the densest in-band point
    // so a sparsity plateau at the target keeps the whole band in play.
    int in_band = -1;
    for (int g = 0; g < range.grid_points; ++g) {
      if (std::abs(attempt.sparsity[g] - range.target_sparsity) <=
          range.band) {
        in_band = g;
        break;
      }
    }
    if (in_band >= 0) {
      double new_hi = taus[in_band];
      double new_lo =
          in_band > 0 ? taus[in_band - 1] : new_hi / range.c_update;
      result.grid.taus = linspace(new_lo, new_hi, range.grid_points);
      return result;
    }

    double densest = attempt.sparsity[0];
    double sparsest = attempt.sparsity[range.grid_points - 1];
    if (densest < range.target_sparsity) {
      // Even the smallest tau is too sparse; shift the bracket down.
      lo /= range.c_update;
      hi /= range.c_update;
    } else if (sparsest > range.target_sparsity) {
      lo *= range.c_update;
      hi *= range.c_update;
    } else {
      // The band was jumped over between two adjacent grid points; bisect
      // into the jump. Active-set refinement can make realized sparsity
      // fall off a cliff, in which case no tau meets the band and the
      // bisection bracket collapses without converging. Features near the
      // cliff sit at the selection threshold, one time point away from
      // being dropped, so retreat to the dense side until the excluded
      // fraction is bounded by the same target: losing a relevant feature
      // costs more than keeping extra ones.
      for (int g = 0; g + 1 < range.grid_points; ++g) {
        if (attempt.sparsity[g] > range.target_sparsity &&
            attempt.sparsity[g + 1] < range.target_sparsity) {
          if (taus[g + 1] - taus[g] <= 0.05 * taus[g + 1]) {
            double tau_acc = taus[g];
            for (int step = 0; step < 60; ++step) {
              if (sparsity_at(tensor, opt, tau_acc) >=
                  1.0 - range.target_sparsity)
                break;
              tau_acc /= 1.05;
            }
            result.grid.taus =
                linspace(tau_acc / range.c_update, tau_acc, range.grid_points);
            return result;
          }
          lo = taus[g];
          hi = taus[g + 1];
          break;
        }
      }
    }
  }

  std::ostringstream msg;
  msg << "no tau bracket reached sparsity " << range.target_sparsity << " +/- "
      << range.band << " after " << range.max_updates << " updates; tried:";
  for (const auto& a : result.attempts)
    msg << " [" << a.tau_lo << ", " << a.tau_hi << "] -> (" << a.sparsity.front()
        << " .. " << a.sparsity.back() << ")";
  throw NumericError(msg.str());
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs >= 2 folds");
  int G = n_classes_of(labels);
  std::vector<std::vector<std::size_t>> by_class(G);
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(i);
  for (int k = 0; k < G; ++k)
    if (static_cast<int>(by_class[k].size()) < folds) {
      std::ostringstream msg;
      msg << "class " << k << " has " << by_class[k].size()
          << " subjects, fewer than " << folds << " folds";
      throw DataError(msg.str());
    }

  Rng rng(mix_seed(seed, 0x5f01d5));
  std::vector<int> assignment(labels.size(), 0);
  std::size_t counter = 0;
  for (int k = 0; k < G; ++k) {
    rng.shuffle(by_class[k]);
    for (std::size_t i : by_class[k])
      assignment[i] = static_cast<int>(counter++ % folds);
  }
  return assignment;
}

TuneResult cross_validate(const CurveTensor& tensor, const TauGrid& grid,
                          const SparseOptions& opt, const CvConfig& cv) {
  Index nt = grid.taus.size();
  if (nt < 1) throw ConfigError("empty tau grid");
  for (Index g = 1; g < nt; ++g)
    if (!(grid.taus[g] > grid.taus[g - 1]))
      throw ConfigError("tau grid must be strictly increasing");

  int G = n_classes_of(tensor.labels);
  std::vector<int> fold_of = stratified_folds(tensor.labels, cv.folds, cv.seed);

  TuneResult result;
  result.grid = grid;
  result.trace.resize(static_cast<std::size_t>(nt) * cv.folds);

  parallel_for(static_cast<std::size_t>(cv.folds), [&](std::size_t f) {
    std::vector<Index> train_rows, val_rows;
    for (Index i = 0; i < tensor.n_subjects(); ++i)
      (fold_of[i] == static_cast<int>(f) ? val_rows : train_rows).push_back(i);

    CurveTensor train, val;
    train.n_features = val.n_features = tensor.n_features;
    train.grid = val.grid = tensor.grid;
    train.values.resize(static_cast<Index>(train_rows.size()),
                        tensor.values.cols());
    val.values.resize(static_cast<Index>(val_rows.size()),
                      tensor.values.cols());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      train.values.row(static_cast<Index>(r)) = tensor.values.row(train_rows[r]);
      train.labels.push_back(tensor.labels[train_rows[r]]);
    }
    for (std::size_t r = 0; r < val_rows.size(); ++r) {
      val.values.row(static_cast<Index>(r)) = tensor.values.row(val_rows[r]);
      val.labels.push_back(tensor.labels[val_rows[r]]);
    }

    for (Index g = 0; g < nt; ++g) {
      SparseOptions run = opt;
      run.tau = grid.taus[g];
      SelectionProfile profile = sparse_discriminants(train, run);
      ScoreSet train_scores = project_scores(train, profile.gamma);
      std::vector<Matrix> centroids =
          score_centroids(train_scores, train.labels, G);
      ScoreSet val_scores = project_scores(val, profile.gamma);
      std::vector<Prediction> preds =
          nearest_centroid(val_scores, centroids, VoteMode::overall);
      std::vector<int> predicted;
      predicted.reserve(preds.size());
      for (const auto& pr : preds) predicted.push_back(pr.predicted);

      FoldRow row;
      row.tau = grid.taus[g];
      row.fold = static_cast<int>(f);
      row.report = evaluate(confusion(val.labels, predicted, G));
      row.combined = combined_metric(row.report);
      result.trace[static_cast<std::size_t>(g) * cv.folds + f] = row;
    }
  });

  result.mean_combined = Vector::Zero(nt);
  for (Index g = 0; g < nt; ++g) {
    double sum = 0.0;
    for (int f = 0; f < cv.folds; ++f)
      sum += result.trace[static_cast<std::size_t>(g) * cv.folds + f].combined;
    result.mean_combined[g] = sum / cv.folds;
  }

  double best = result.mean_combined.maxCoeff();
  Index arg = 0;
  for (Index g = 0; g < nt; ++g)
    if (result.mean_combined[g] >= best - 1e-12) arg = g;
  result.tau_star = grid.taus[arg];
  return result;
}

}  // namespace mflda
