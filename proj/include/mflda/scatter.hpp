#pragma once

#include <string>
#include <vector>

#include "mflda/fd_model.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Per-class and overall mean coefficient matrices (each m x p).
struct ClassMeans {
  std::vector<Matrix> class_coef;
  Matrix overall_coef;
  std::vector<Index> counts;
  int n_classes = 0;
};

ClassMeans class_means(const SplineModel& model);

// Between/within scatter operators over the evaluation grid. In
// time-dependent mode `between`/`within` hold a single pT x pT matrix whose
// (t, s) block couples all time pairs; in time-independent mode they hold T
// separate p x p blocks. `ridge` is recorded here and added to the within
// diagonal by downstream solvers, never baked into the stored blocks.
struct ScatterPair {
  Mode mode = Mode::time_dependent;
  Index n_features = 0;
  Index n_times = 0;
  int n_classes = 0;
  double ridge = 0.0;
  std::vector<Index> counts;
  std::vector<Matrix> between;
  std::vector<Matrix> within;
  std::vector<std::string> warnings;
};

// Dense time-dependent operators refuse dimensions above this by default.
inline constexpr Index kDefaultMaxDenseDim = 20000;

// Negative ridge requests the default 1e-6 * trace(S_p) / (pT).
ScatterPair build_scatter_from_model(const SplineModel& model,
                                     const Vector& grid, Mode mode,
                                     double ridge = -1.0,
                                     Index max_dense_dim = kDefaultMaxDenseDim);

// Same operators computed from an already evaluated (possibly standardized)
// tensor; the route used after per-slice standardization.
ScatterPair build_scatter_from_tensor(const CurveTensor& tensor, Mode mode,
                                      double ridge = -1.0,
                                      Index max_dense_dim = kDefaultMaxDenseDim);

// Cross-sectional scatter of plain rows: S_b = sum_k n_k (mu_k - mu)(...)^T
// and S_p = pooled within-class covariance with divisor sum_k (n_k - 1).
// Shared by the tensor route, the reduced solver and active-set re-solves.
void cross_scatter(const Matrix& X, const std::vector<int>& labels, int G,
                   Matrix& Sb, Matrix& Sp, std::vector<Index>* counts = nullptr);

// Number of classes implied by a dense 0-based label vector. Throws
// DataError on unlabeled entries or fewer than two classes.
int n_classes_of(const std::vector<int>& labels);

}  // namespace mflda
