#pragma once

#include <vector>

#include "mflda/scatter.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Leading generalized eigenpairs of one operator block. gamma holds the
// whitened-space eigenvectors (orthonormal, sign-fixed), beta the data-space
// discriminants beta = W gamma with beta^T (S_p + ridge I) beta = I.
struct BlockEigen {
  Vector eigenvalues;
  Matrix gamma;
  Matrix beta;
};

// One block in time-dependent mode, T blocks in time-independent mode.
struct EigenSolution {
  Mode mode = Mode::time_dependent;
  std::vector<BlockEigen> blocks;
};

// Relative eigenvalue floor used when inverting S_p + ridge I.
inline constexpr double kEigenFloor = 1e-12;

// Symmetric inverse square root of S_p + ridge I with eigenvalue truncation
// at kEigenFloor relative to the largest eigenvalue. Throws NumericError
// when S_p is identically zero.
Matrix whiten(const Matrix& Sp, double ridge);

// Top n_components eigenpairs of W S_b W for one block. Requested
// components beyond the rank of S_b are dropped.
BlockEigen solve_block(const Matrix& Sb, const Matrix& Sp, double ridge,
                       int n_components);

// Solves every block of the scatter pair. n_components must not exceed
// G - 1.
EigenSolution solve_nonsparse(const ScatterPair& scatter, int n_components);

// Same eigenpairs computed without forming the d x d operators: the data
// rows are rotated into the span of their centered configuration (rank
// r <= n), the problem is solved in r dimensions and mapped back. Exact for
// the ridged problem because S_p + ridge I is block diagonal with respect
// to that span.
BlockEigen solve_reduced(const Matrix& X, const std::vector<int>& labels,
                         int G, double ridge, int n_components);

// Dispatches to solve_reduced when the reduction pays off (d > n).
BlockEigen solve_from_data(const Matrix& X, const std::vector<int>& labels,
                           int G, double ridge, int n_components);

// Removes the span of the prior columns from each row of X (Euclidean
// projection onto the orthogonal complement). Zero columns are rejected.
Matrix project_out(const Matrix& X, const Matrix& priors);

// Mode-aware deflation of a tensor: one pT-dimensional projection per
// component in time-dependent mode, per-time p-dimensional projections in
// time-independent mode. priors holds one p x T matrix per component.
void deflate_tensor(CurveTensor& tensor, const std::vector<Matrix>& priors,
                    Mode mode);

}  // namespace mflda
