#pragma once

#include <string>
#include <vector>

#include "mflda/fd_model.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Preprocessing for compositional count data (e.g. relative abundances).
// Operates on a wide sample-by-feature matrix where each row is one
// (subject, time) observation vector; missing entries are treated as zero
// counts. Steps run in a fixed order: zero filter, centered log-ratio
// transform, variance filter.
struct PreprocessOptions {
  bool zero_filter = true;
  double zero_threshold = 0.80;  // drop features with zero fraction >= this
  bool clr = true;
  double pseudo_count = 1.0;
  bool variance_filter = true;
  double variance_quantile = 0.05;  // drop features below this quantile
};

struct PreprocessReport {
  std::vector<Index> kept;  // indices into the original feature list
  std::vector<std::string> kept_names;
  Index zero_dropped = 0;
  Index variance_dropped = 0;
};

// Type-7 quantile (the R default): linear interpolation at h = (n - 1) q of
// the order statistics. `sorted` must be ascending and non-empty.
double quantile_type7(const std::vector<double>& sorted, double q);

// Column indices whose zero fraction is strictly below `threshold`.
std::vector<Index> zero_filter(const Matrix& wide, double threshold);

// Centered log-ratio transform applied row-wise: log(x + c) minus the row
// mean of log(x + c). Requires x + c > 0 everywhere.
Matrix clr_transform(const Matrix& wide, double pseudo_count);

// Column indices whose sample variance is >= the type-7 quantile of all
// column variances (ties at the cutoff are retained).
std::vector<Index> variance_filter(const Matrix& wide, double quantile);

struct PreprocessResult {
  FunctionalDataSet data;
  PreprocessReport report;
};

PreprocessResult preprocess_dataset(const FunctionalDataSet& data,
                                    const PreprocessOptions& options);

}  // namespace mflda
