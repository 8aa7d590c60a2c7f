#include "mflda/lda.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mflda/parallel.hpp"

namespace mflda {

namespace {

// Makes the first coordinate whose magnitude clears a relative threshold
// positive. Returns the applied sign so paired columns can be flipped
// together.
double fix_sign(Eigen::Ref<Vector> v) {
  double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-9 * scale) {
      if (v[i] < 0.0) {
        v = -v;
        return -1.0;
      }
      return 1.0;
    }
  }
  return 1.0;
}

bool lex_greater(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

void fix_signs_and_ties(BlockEigen& block) {
  Index k = block.gamma.cols();
  for (Index c = 0; c < k; ++c) {
    double s = fix_sign(block.gamma.col(c));
    if (s < 0.0) block.beta.col(c) = -block.beta.col(c);
  }
  // Deterministic order inside numerically tied eigenvalue groups.
  double scale = k > 0 ? std::max(1.0, std::abs(block.eigenvalues[0])) : 1.0;
  Index start = 0;
  while (start < k) {
    Index end = start + 1;
    while (end < k && std::abs(block.eigenvalues[end] -
                               block.eigenvalues[start]) <= 1e-10 * scale)
      ++end;
    if (end - start > 1) {
      std::vector<Index> order(end - start);
      std::iota(order.begin(), order.end(), start);
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return lex_greater(block.gamma.col(a), block.gamma.col(b));
      });
      Matrix g = block.gamma.middleCols(start, end - start);
      Matrix bt = block.beta.middleCols(start, end - start);
      Vector ev = block.eigenvalues.segment(start, end - start);
      for (Index c = 0; c < end - start; ++c) {
        block.gamma.col(start + c) = g.col(order[c] - start);
        block.beta.col(start + c) = bt.col(order[c] - start);
        block.eigenvalues[start + c] = ev[order[c] - start];
      }
    }
    start = end;
  }
}

}  // namespace

Matrix whiten(const Matrix& Sp, double ridge) {
  if (Sp.rows() != Sp.cols()) throw ConfigError("S_p must be square");
  if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
  if (Sp.size() == 0 || Sp.cwiseAbs().maxCoeff() == 0.0)
    throw NumericError("within-class scatter is identically zero");

  Matrix ridged = Sp;
  ridged.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ridged);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of S_p failed");
  const Vector& lam = eig.eigenvalues();
  double lam_max = lam.maxCoeff();
  if (lam_max <= 0.0)
    throw NumericError("S_p + ridge I has no positive eigenvalues");

  Vector inv_sqrt = Vector::Zero(lam.size());
  for (Index i = 0; i < lam.size(); ++i)
    if (lam[i] >= kEigenFloor * lam_max) inv_sqrt[i] = 1.0 / std::sqrt(lam[i]);
  return eig.eigenvectors() * inv_sqrt.asDiagonal() *
         eig.eigenvectors().transpose();
}

BlockEigen solve_block(const Matrix& Sb, const Matrix& Sp, double ridge,
                       int n_components) {
  if (Sb.rows() != Sb.cols() || Sb.rows() != Sp.rows())
    throw ConfigError("S_b and S_p must be square with matching size");
  if (n_components < 1) throw ConfigError("n_components must be >= 1");

  Matrix W = whiten(Sp, ridge);
  Matrix M = W * Sb * W;
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the whitened operator failed");

  // Eigen returns ascending order; walk from the top and keep eigenvalues
  // above the relative floor.
  Index d = M.rows();
  double lam_max = std::max(eig.eigenvalues()[d - 1], 0.0);
  Index usable = 0;
  while (usable < std::min<Index>(n_components, d) &&
         eig.eigenvalues()[d - 1 - usable] > kEigenFloor * lam_max &&
         eig.eigenvalues()[d - 1 - usable] > 0.0)
    ++usable;

  BlockEigen block;
  block.eigenvalues.resize(usable);
  block.gamma.resize(d, usable);
  for (Index c = 0; c < usable; ++c) {
    block.eigenvalues[c] = eig.eigenvalues()[d - 1 - c];
    block.gamma.col(c) = eig.eigenvectors().col(d - 1 - c);
  }
  block.beta = W * block.gamma;
  fix_signs_and_ties(block);
  return block;
}

EigenSolution solve_nonsparse(const ScatterPair& scatter, int n_components) {
  if (n_components < 1) throw ConfigError("n_components must be >= 1");
  if (n_components > scatter.n_classes - 1)
    throw ConfigError("n_components exceeds G - 1");

  EigenSolution sol;
  sol.mode = scatter.mode;
  sol.blocks.resize(scatter.between.size());
  parallel_for(scatter.between.size(), [&](std::size_t b) {
    sol.blocks[b] = solve_block(scatter.between[b], scatter.within[b],
                                scatter.ridge, n_components);
  });
  return sol;
}

BlockEigen solve_reduced(const Matrix& X, const std::vector<int>& labels,
                         int G, double ridge, int n_components) {
  Index n = X.rows();
  Index d = X.cols();
  if (n < 2) throw DataError("reduced solve needs at least two rows");

  Vector mean = X.colwise().mean();
  Matrix centered = X.rowwise() - mean.transpose();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv[0] : 0.0;
  if (smax == 0.0)
    throw NumericError("data rows are identical; scatter is zero");
  double tol = static_cast<double>(std::max(n, d)) *
               std::numeric_limits<double>::epsilon() * smax;
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > tol) ++rank;

  Matrix V = svd.matrixV().leftCols(rank);
  Matrix reduced = centered * V;  // n x rank

  Matrix Sb, Sp;
  cross_scatter(reduced, labels, G, Sb, Sp);
  BlockEigen small = solve_block(Sb, Sp, ridge, n_components);

  BlockEigen block;
  block.eigenvalues = small.eigenvalues;
  block.gamma = V * small.gamma;
  block.beta = V * small.beta;
  fix_signs_and_ties(block);
  return block;
}

BlockEigen solve_from_data(const Matrix& X, const std::vector<int>& labels,
                           int G, double ridge, int n_components) {
  if (X.cols() > X.rows())
    return solve_reduced(X, labels, G, ridge, n_components);
  Matrix Sb, Sp;
  cross_scatter(X, labels, G, Sb, Sp);
  return solve_block(Sb, Sp, ridge, n_components);
}

Matrix project_out(const Matrix& X, const Matrix& priors) {
  if (priors.cols() == 0) return X;
  if (priors.rows() != X.cols())
    throw ConfigError("prior length does not match data dimension");
  for (Index c = 0; c < priors.cols(); ++c)
    if (priors.col(c).norm() == 0.0)
      throw ConfigError("deflation prior is a zero vector");

  Eigen::ColPivHouseholderQR<Matrix> qr(priors);
  Index rank = qr.rank();
  Matrix Q = qr.householderQ() * Matrix::Identity(priors.rows(), rank);
  return X - (X * Q) * Q.transpose();
}

void deflate_tensor(CurveTensor& tensor, const std::vector<Matrix>& priors,
                    Mode mode) {
  if (priors.empty()) return;
  Index p = tensor.n_features;
  Index T = tensor.n_times();
  Index k = static_cast<Index>(priors.size());
  for (const auto& m : priors)
    if (m.rows() != p || m.cols() != T)
      throw ConfigError("deflation prior must be p x T");

  if (mode == Mode::time_dependent) {
    Matrix stacked(p * T, k);
    Index used = 0;
    for (Index c = 0; c < k; ++c) {
      Vector v = Eigen::Map<const Vector>(priors[c].data(), p * T);
      if (v.norm() > 0.0) stacked.col(used++) = v;
    }
    if (used > 0)
      tensor.values = project_out(tensor.values, stacked.leftCols(used));
  } else {
    parallel_for(static_cast<std::size_t>(T), [&](std::size_t ti) {
      Index t = static_cast<Index>(ti);
      // Components whose per-time prior vanishes (rank-deficient block)
      // contribute nothing at this time point.
      Matrix cols(p, k);
      Index used = 0;
      for (Index c = 0; c < k; ++c) {
        if (priors[c].col(t).norm() > 0.0) cols.col(used++) = priors[c].col(t);
      }
      if (used == 0) return;
      Matrix block = tensor.values.middleCols(t * p, p);
      tensor.values.middleCols(t * p, p) =
          project_out(block, cols.leftCols(used));
    });
  }
}

}  // namespace mflda
