#pragma once

#include <vector>

#include "mflda/lda.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Exact solution of min ||gamma||_1 subject to
// ||M gamma_1 - lambda_1 gamma||_inf <= tau. The constraint separates per
// coordinate, so the minimizer is the soft threshold of b = M gamma_1
// scaled by 1/lambda_1. Throws ConfigError for tau < 0 and NumericError for
// lambda_1 <= 0.
Vector solve_sparse(const Matrix& M, const Vector& gamma1, double lambda1,
                    double tau);

// Same closed form given b = M gamma_1 directly.
Vector soft_threshold_solution(const Vector& b, double lambda1, double tau);

struct SparseOptions {
  Mode mode = Mode::time_dependent;
  double tau = 0.0;
  int n_components = 1;
  double selectivity_threshold = 0.70;
  int max_iter = 20;
  double tol = 1e-8;
  double ridge = -1.0;  // negative = default from the within trace
  Index max_dense_dim = kDefaultMaxDenseDim;
  // Re-solve the non-sparse problem restricted to the active set until the
  // set stabilizes. The tau range search measures sparsity under the same
  // setting so the bracket it returns reflects the fits it will feed.
  bool refine = true;
};

// Sparse discriminant sequence for one tensor. gamma[c] is the p x T sparse
// discriminant of component c; beta[c] the data-space non-sparse
// discriminant used to deflate before component c+1. Selectivity (fraction
// of time points with |coefficient| > 1e-12) and the selected set are taken
// from the first component.
struct SelectionProfile {
  std::vector<Matrix> gamma;
  std::vector<Matrix> beta;
  std::vector<Vector> lambda;  // leading eigenvalue per block
  Vector selectivity;
  std::vector<Index> selected;
  double sup_norm = 0.0;  // max_block ||M gamma_1||_inf before thresholding
};

// Requested ridge when non-negative, otherwise the default
// 1e-6 * trace(S_p) / (p T).
double resolve_ridge(const CurveTensor& tensor, int G, double ridge);

// Mode-aware top-eigenpair solve of a (standardized) tensor: one block in
// time-dependent mode (reduced when pT > n), T blocks otherwise.
EigenSolution solve_tensor(const CurveTensor& tensor, Mode mode, double ridge,
                           int n_components,
                           Index max_dense_dim = kDefaultMaxDenseDim);

SelectionProfile sparse_discriminants(const CurveTensor& tensor,
                                      const SparseOptions& opt);

// Fraction of time points where each feature's coefficient is nonzero.
Vector selectivity_profile(const Matrix& gamma);

std::vector<Index> select_features(const Vector& selectivity,
                                   double threshold);

}  // namespace mflda
