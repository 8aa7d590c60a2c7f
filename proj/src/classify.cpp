#include "mflda/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mflda {

ScoreSet project_scores(const CurveTensor& tensor,
                        const std::vector<Matrix>& gamma) {
  Index n = tensor.n_subjects();
  Index p = tensor.n_features;
  Index T = tensor.n_times();
  ScoreSet scores;
  scores.per_component.reserve(gamma.size());
  for (const Matrix& g : gamma) {
    if (g.rows() != p || g.cols() != T)
      throw ConfigError("discriminant matrix must be p x T");
    Matrix z(n, T);
    for (Index t = 0; t < T; ++t)
      z.col(t) = tensor.values.middleCols(t * p, p) * g.col(t);
    scores.per_component.push_back(std::move(z));
  }
  return scores;
}

std::vector<Matrix> score_centroids(const ScoreSet& scores,
                                    const std::vector<int>& labels,
                                    int n_classes) {
  Index n = scores.n_subjects();
  Index T = scores.n_times();
  Index C = static_cast<Index>(scores.per_component.size());
  if (static_cast<Index>(labels.size()) != n)
    throw DataError("label count does not match score rows");

  std::vector<Matrix> centroids(n_classes, Matrix::Zero(C, T));
  std::vector<Index> counts(n_classes, 0);
  for (Index i = 0; i < n; ++i) {
    int k = labels[i];
    if (k < 0 || k >= n_classes) throw DataError("label outside [0, G)");
    ++counts[k];
    for (Index c = 0; c < C; ++c)
      centroids[k].row(c) += scores.per_component[c].row(i);
  }
  for (int k = 0; k < n_classes; ++k) {
    if (counts[k] == 0) throw DataError("class without training subjects");
    centroids[k] /= static_cast<double>(counts[k]);
  }
  return centroids;
}

std::vector<Prediction> nearest_centroid(const ScoreSet& scores,
                                         const std::vector<Matrix>& centroids,
                                         VoteMode mode) {
  Index n = scores.n_subjects();
  Index T = scores.n_times();
  Index C = static_cast<Index>(scores.per_component.size());
  int G = static_cast<int>(centroids.size());
  if (G < 2) throw ConfigError("need at least two centroids");
  for (const Matrix& m : centroids)
    if (m.rows() != C || m.cols() != T)
      throw ConfigError("centroid shape does not match scores");

  std::vector<Prediction> out(n);
  for (Index i = 0; i < n; ++i) {
    Prediction& pred = out[i];
    if (mode == VoteMode::overall) {
      double best = std::numeric_limits<double>::infinity();
      double second = best;
      int arg = 0;
      for (int k = 0; k < G; ++k) {
        double d2 = 0.0;
        for (Index c = 0; c < C; ++c)
          d2 += (scores.per_component[c].row(i) - centroids[k].row(c))
                    .squaredNorm();
        if (d2 < best) {
          second = best;
          best = d2;
          arg = k;
        } else if (d2 < second) {
          second = d2;
        }
      }
      pred.predicted = arg;
      pred.margin = std::isinf(second)
                        ? 0.0
                        : std::sqrt(second) - std::sqrt(best);
    } else {
      pred.votes.assign(T, 0);
      std::vector<int> tally(G, 0);
      for (Index t = 0; t < T; ++t) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int k = 0; k < G; ++k) {
          double d2 = 0.0;
          for (Index c = 0; c < C; ++c) {
            double diff =
                scores.per_component[c](i, t) - centroids[k](c, t);
            d2 += diff * diff;
          }
          if (d2 < best) {
            best = d2;
            arg = k;
          }
        }
        pred.votes[t] = arg;
        ++tally[arg];
      }
      int arg = 0;
      for (int k = 1; k < G; ++k)
        if (tally[k] > tally[arg]) arg = k;
      int runner = arg == 0 ? 1 : 0;
      for (int k = 0; k < G; ++k)
        if (k != arg && tally[k] > tally[runner]) runner = k;
      pred.predicted = arg;
      pred.margin =
          static_cast<double>(tally[arg] - tally[runner]) / static_cast<double>(T);
    }
  }
  return out;
}

KsResult ks_separation(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw DataError("KS test needs at least two values per group");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }

  KsResult r;
  r.statistic = d;
  double ne = na * nb / (na + nb);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda < 1e-12) {
    r.p_value = 1.0;
    return r;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  r.p_value = std::clamp(2.0 * sum, 0.0, 1.0);
  return r;
}

}  // namespace mflda
