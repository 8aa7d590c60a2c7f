#include "mflda/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mflda/parallel.hpp"

namespace mflda {

namespace {

// trace(S_p) without forming S_p: mean squared within-class deviation.
double within_trace(const CurveTensor& tensor, int G) {
  const Matrix& X = tensor.values;
  Index n = X.rows();
  std::vector<Index> counts(G, 0);
  Matrix mu = Matrix::Zero(G, X.cols());
  for (Index i = 0; i < n; ++i) {
    mu.row(tensor.labels[i]) += X.row(i);
    ++counts[tensor.labels[i]];
  }
  for (int k = 0; k < G; ++k)
    if (counts[k] > 0) mu.row(k) /= static_cast<double>(counts[k]);
  double ss = 0.0;
  for (Index i = 0; i < n; ++i)
    ss += (X.row(i) - mu.row(tensor.labels[i])).squaredNorm();
  Index denom = n - G;
  if (denom <= 0)
    throw NumericError("within-class scatter is not estimable: "
                       "every class is a singleton");
  return ss / static_cast<double>(denom);
}

void check_feasible(const Vector& b, double lambda1, double tau,
                    const Vector& gamma_hat) {
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  double slack = (b - lambda1 * gamma_hat).cwiseAbs().maxCoeff();
  if (slack > tau + 1e-8 * scale)
    throw NumericError("sparse solution violates its own constraint");
}

std::vector<Index> support_of(const Vector& v) {
  std::vector<Index> s;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) s.push_back(i);
  return s;
}

// Active-set refinement: re-solve the non-sparse problem restricted to the
// current support and re-threshold until the support stabilizes. The
// support can only shrink, so the cap is a safety net.
Vector refine_active_set(const Matrix& X, const std::vector<int>& labels,
                         int G, double ridge, double tau, int max_iter,
                         Vector gamma_hat) {
  std::vector<Index> active = support_of(gamma_hat);
  for (int iter = 0; iter < max_iter && !active.empty(); ++iter) {
    Matrix sub(X.rows(), static_cast<Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c)
      sub.col(static_cast<Index>(c)) = X.col(active[c]);
    BlockEigen blk = solve_from_data(sub, labels, G, ridge, 1);
    Vector next = Vector::Zero(gamma_hat.size());
    if (blk.eigenvalues.size() > 0 && blk.eigenvalues[0] > 0.0) {
      Vector b = blk.eigenvalues[0] * blk.gamma.col(0);
      Vector sol = soft_threshold_solution(b, blk.eigenvalues[0], tau);
      for (std::size_t c = 0; c < active.size(); ++c)
        next[active[c]] = sol[static_cast<Index>(c)];
    }
    std::vector<Index> next_active = support_of(next);
    gamma_hat = next;
    if (next_active == active) break;
    active = std::move(next_active);
  }
  return gamma_hat;
}

}  // namespace

double resolve_ridge(const CurveTensor& tensor, int G, double ridge) {
  if (ridge >= 0.0) return ridge;
  Index dim = tensor.n_features * tensor.n_times();
  return 1e-6 * within_trace(tensor, G) / static_cast<double>(dim);
}

Vector soft_threshold_solution(const Vector& b, double lambda1, double tau) {
  if (tau < 0.0) throw ConfigError("tau must be >= 0");
  if (!(lambda1 > 0.0))
    throw NumericError("leading eigenvalue is not positive; "
                       "the sparse program is degenerate");
  Vector gamma_hat(b.size());
  for (Index i = 0; i < b.size(); ++i) {
    double mag = std::abs(b[i]) - tau;
    gamma_hat[i] = mag > 0.0 ? (b[i] > 0.0 ? mag : -mag) / lambda1 : 0.0;
  }
  check_feasible(b, lambda1, tau, gamma_hat);
  return gamma_hat;
}

Vector solve_sparse(const Matrix& M, const Vector& gamma1, double lambda1,
                    double tau) {
  if (M.rows() != M.cols() || M.rows() != gamma1.size())
    throw ConfigError("operator and eigenvector sizes do not match");
  return soft_threshold_solution(M * gamma1, lambda1, tau);
}

EigenSolution solve_tensor(const CurveTensor& tensor, Mode mode, double ridge,
                           int n_components, Index max_dense_dim) {
  int G = n_classes_of(tensor.labels);
  if (n_components < 1) throw ConfigError("n_components must be >= 1");
  if (n_components > G - 1) throw ConfigError("n_components exceeds G - 1");
  double rr = resolve_ridge(tensor, G, ridge);

  EigenSolution sol;
  sol.mode = mode;
  if (mode == Mode::time_dependent) {
    Index d = tensor.values.cols();
    if (d <= tensor.values.rows() && d > max_dense_dim) {
      std::ostringstream msg;
      msg << "dense operator of size " << d << " exceeds the limit "
          << max_dense_dim << "; use time_independent mode or raise the limit";
      throw ConfigError(msg.str());
    }
    sol.blocks.push_back(
        solve_from_data(tensor.values, tensor.labels, G, rr, n_components));
  } else {
    Index p = tensor.n_features;
    Index T = tensor.n_times();
    sol.blocks.resize(T);
    parallel_for(static_cast<std::size_t>(T), [&](std::size_t t) {
      Matrix block = tensor.values.middleCols(static_cast<Index>(t) * p, p);
      sol.blocks[t] =
          solve_from_data(block, tensor.labels, G, rr, n_components);
    });
  }
  return sol;
}

Vector selectivity_profile(const Matrix& gamma) {
  Index p = gamma.rows();
  Index T = gamma.cols();
  Vector sel = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    Index nonzero = 0;
    for (Index t = 0; t < T; ++t)
      if (std::abs(gamma(j, t)) > 1e-12) ++nonzero;
    sel[j] = static_cast<double>(nonzero) / static_cast<double>(T);
  }
  return sel;
}

std::vector<Index> select_features(const Vector& selectivity,
                                   double threshold) {
  std::vector<Index> out;
  for (Index j = 0; j < selectivity.size(); ++j)
    if (selectivity[j] >= threshold) out.push_back(j);
  return out;
}

SelectionProfile sparse_discriminants(const CurveTensor& tensor,
                                      const SparseOptions& opt) {
  if (opt.tau < 0.0) throw ConfigError("tau must be >= 0");
  int G = n_classes_of(tensor.labels);
  if (opt.n_components < 1 || opt.n_components > G - 1)
    throw ConfigError("n_components must lie in [1, G - 1]");
  double ridge = resolve_ridge(tensor, G, opt.ridge);

  Index p = tensor.n_features;
  Index T = tensor.n_times();
  CurveTensor work = tensor;
  SelectionProfile profile;

  for (int c = 0; c < opt.n_components; ++c) {
    EigenSolution sol =
        solve_tensor(work, opt.mode, ridge, 1, opt.max_dense_dim);

    Matrix gamma_hat = Matrix::Zero(p, T);
    Matrix beta = Matrix::Zero(p, T);
    Vector lambda;

    if (opt.mode == Mode::time_dependent) {
      const BlockEigen& blk = sol.blocks[0];
      lambda = Vector::Zero(1);
      if (blk.eigenvalues.size() > 0) {
        lambda[0] = blk.eigenvalues[0];
        Vector b = lambda[0] * blk.gamma.col(0);
        if (c == 0)
          profile.sup_norm = std::max(profile.sup_norm,
                                      b.cwiseAbs().maxCoeff());
        Vector flat = soft_threshold_solution(b, lambda[0], opt.tau);
        if (opt.refine)
          flat = refine_active_set(work.values, work.labels, G, ridge,
                                   opt.tau, opt.max_iter, std::move(flat));
        gamma_hat = Eigen::Map<const Matrix>(flat.data(), p, T);
        beta = Eigen::Map<const Matrix>(blk.beta.col(0).data(), p, T);
      }
    } else {
      lambda = Vector::Zero(T);
      std::vector<double> sup(T, 0.0);
      parallel_for(static_cast<std::size_t>(T), [&](std::size_t ti) {
        Index t = static_cast<Index>(ti);
        const BlockEigen& blk = sol.blocks[t];
        if (blk.eigenvalues.size() == 0) return;
        lambda[t] = blk.eigenvalues[0];
        Vector b = lambda[t] * blk.gamma.col(0);
        sup[ti] = b.cwiseAbs().maxCoeff();
        Vector g = soft_threshold_solution(b, lambda[t], opt.tau);
        if (opt.refine) {
          Matrix block = work.values.middleCols(t * p, p);
          g = refine_active_set(block, work.labels, G, ridge, opt.tau,
                                opt.max_iter, std::move(g));
        }
        gamma_hat.col(t) = g;
        beta.col(t) = blk.beta.col(0);
      });
      if (c == 0)
        for (double s : sup) profile.sup_norm = std::max(profile.sup_norm, s);
    }

    profile.gamma.push_back(std::move(gamma_hat));
    profile.beta.push_back(beta);
    profile.lambda.push_back(std::move(lambda));
    if (c + 1 < opt.n_components)
      deflate_tensor(work, {profile.beta.back()}, opt.mode);
  }

  profile.selectivity = selectivity_profile(profile.gamma[0]);
  profile.selected =
      select_features(profile.selectivity, opt.selectivity_threshold);
  return profile;
}

}  // namespace mflda
