#include "mflda/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace mflda {

double quantile_type7(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (q < 0.0 || q > 1.0) throw ConfigError("quantile must lie in [0, 1]");
  double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

std::vector<Index> zero_filter(const Matrix& wide, double threshold) {
  if (threshold <= 0.0 || threshold > 1.0)
    throw ConfigError("zero threshold must lie in (0, 1]");
  std::vector<Index> kept;
  double rows = static_cast<double>(wide.rows());
  for (Index j = 0; j < wide.cols(); ++j) {
    Index zeros = (wide.col(j).array() == 0.0).count();
    if (static_cast<double>(zeros) / rows < threshold) kept.push_back(j);
  }
  return kept;
}

Matrix clr_transform(const Matrix& wide, double pseudo_count) {
  if ((wide.array() + pseudo_count <= 0.0).any())
    throw DataError("clr needs x + pseudo_count > 0 for every entry");
  Matrix logged = (wide.array() + pseudo_count).log();
  return logged.colwise() - logged.rowwise().mean();
}

std::vector<Index> variance_filter(const Matrix& wide, double quantile) {
  Index n = wide.rows();
  if (n < 2) throw DataError("variance filter needs at least two rows");
  Vector var(wide.cols());
  for (Index j = 0; j < wide.cols(); ++j) {
    double mean = wide.col(j).mean();
    var[j] = (wide.col(j).array() - mean).square().sum() /
             (static_cast<double>(n) - 1.0);
  }
  std::vector<double> sorted(var.data(), var.data() + var.size());
  std::sort(sorted.begin(), sorted.end());
  double cutoff = quantile_type7(sorted, quantile);
  std::vector<Index> kept;
  for (Index j = 0; j < wide.cols(); ++j)
    if (var[j] >= cutoff) kept.push_back(j);
  return kept;
}

PreprocessResult preprocess_dataset(const FunctionalDataSet& data,
                                    const PreprocessOptions& options) {
  check_dataset(data);
  Index p = static_cast<Index>(data.feature_names.size());

  // One wide row per observed (subject, time) pair; absent features are
  // zero counts.
  std::map<std::pair<Index, double>, Index> row_of;
  for (const Observation& obs : data.observations)
    row_of.emplace(std::make_pair(obs.subject, obs.time),
                   static_cast<Index>(row_of.size()));
  Matrix wide = Matrix::Zero(static_cast<Index>(row_of.size()), p);
  for (const Observation& obs : data.observations)
    wide(row_of[{obs.subject, obs.time}], obs.feature) = obs.value;

  PreprocessResult out;
  std::vector<Index> kept(p);
  for (Index j = 0; j < p; ++j) kept[j] = j;

  if (options.zero_filter) {
    std::vector<Index> pass = zero_filter(wide, options.zero_threshold);
    out.report.zero_dropped = p - static_cast<Index>(pass.size());
    if (pass.empty()) throw DataError("zero filter removed every feature");
    Matrix next(wide.rows(), static_cast<Index>(pass.size()));
    for (Index c = 0; c < next.cols(); ++c) next.col(c) = wide.col(pass[c]);
    wide = std::move(next);
    std::vector<Index> remap(pass.size());
    for (std::size_t c = 0; c < pass.size(); ++c) remap[c] = kept[pass[c]];
    kept = std::move(remap);
  }

  if (options.clr) wide = clr_transform(wide, options.pseudo_count);

  if (options.variance_filter) {
    std::vector<Index> pass = variance_filter(wide, options.variance_quantile);
    out.report.variance_dropped =
        static_cast<Index>(kept.size()) - static_cast<Index>(pass.size());
    if (pass.empty()) throw DataError("variance filter removed every feature");
    Matrix next(wide.rows(), static_cast<Index>(pass.size()));
    for (Index c = 0; c < next.cols(); ++c) next.col(c) = wide.col(pass[c]);
    wide = std::move(next);
    std::vector<Index> remap(pass.size());
    for (std::size_t c = 0; c < pass.size(); ++c) remap[c] = kept[pass[c]];
    kept = std::move(remap);
  }

  out.report.kept = kept;
  std::vector<Index> new_index(p, -1);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    new_index[kept[c]] = static_cast<Index>(c);
    out.report.kept_names.push_back(data.feature_names[kept[c]]);
  }

  out.data.subject_ids = data.subject_ids;
  out.data.class_names = data.class_names;
  out.data.labels = data.labels;
  out.data.feature_names = out.report.kept_names;
  out.data.observations.reserve(row_of.size() * kept.size());
  for (const auto& [key, row] : row_of) {
    for (std::size_t c = 0; c < kept.size(); ++c) {
      Observation obs;
      obs.subject = key.first;
      obs.time = key.second;
      obs.feature = static_cast<Index>(c);
      obs.value = wide(row, static_cast<Index>(c));
      out.data.observations.push_back(obs);
    }
  }
  validate_dataset(out.data);
  return out;
}

}  // namespace mflda
