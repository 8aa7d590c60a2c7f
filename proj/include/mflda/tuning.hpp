#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mflda/metrics.hpp"
#include "mflda/sparse.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Initial bracket for the constraint level: tau_max0 is the largest
// per-coordinate magnitude of M gamma_1 across blocks, tau_min0 scales it
// by sqrt(log p / (nT)).
std::pair<double, double> tau_bounds(double sup_norm, Index n, Index p,
                                     Index T);

struct TauGrid {
  Vector taus;  // strictly increasing, grid_points entries
};

struct RangeSearchOptions {
  double target_sparsity = 0.10;
  double band = 0.05;
  double c_update = 2.0;
  int max_updates = 50;
  int grid_points = 8;
};

// One bracketing attempt: the bounds tried and the realized sparsity
// (fraction of features selected) at each grid point.
struct RangeAttempt {
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  std::vector<double> sparsity;
};

struct RangeResult {
  TauGrid grid;
  std::vector<RangeAttempt> attempts;
};

// Expands or contracts the bracket by c_update until some grid point's
// realized sparsity lands within target +/- band, then narrows the grid to
// end at the densest such point. Sparsity is the fraction of features the
// full fit (refinement included) selects at that tau, so the returned grid
// brackets the behaviour of the fits it will feed. Throws NumericError
// with the attempt trace when max_updates is exhausted.
RangeResult find_tau_range(const CurveTensor& tensor, const SparseOptions& opt,
                           const RangeSearchOptions& range);

// Fold assignment per subject: within-class order is shuffled by the seed,
// then subjects are dealt round-robin with a counter running across
// classes, so fold sizes differ by at most one overall and per class.
// Throws DataError when any class has fewer subjects than folds.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds,
                                  std::uint64_t seed);

struct CvConfig {
  int folds = 5;
  std::uint64_t seed = 0;
};

struct FoldRow {
  double tau = 0.0;
  int fold = 0;
  EvaluationReport report;
  double combined = 0.0;
};

struct TuneResult {
  double tau_star = 0.0;
  Vector mean_combined;  // per grid point
  std::vector<FoldRow> trace;
  TauGrid grid;
};

// Stratified K-fold cross-validation of the full sparse pipeline at every
// grid point. tau* maximizes the fold-mean combined metric; ties go to the
// larger (sparser) tau.
TuneResult cross_validate(const CurveTensor& tensor, const TauGrid& grid,
                          const SparseOptions& opt, const CvConfig& cv);

}  // namespace mflda
