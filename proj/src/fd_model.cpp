#include "mflda/fd_model.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mflda/parallel.hpp"

namespace mflda {

std::pair<double, double> check_dataset(const FunctionalDataSet& data) {
  if (data.observations.empty()) throw DataError("dataset has no observations");
  double lo = data.observations.front().time;
  double hi = lo;
  for (const auto& obs : data.observations) {
    if (obs.subject < 0 || obs.subject >= data.n_subjects())
      throw DataError("observation references unknown subject index");
    if (obs.feature < 0 || obs.feature >= data.n_features())
      throw DataError("observation references unknown feature index");
    if (!std::isfinite(obs.value) || !std::isfinite(obs.time))
      throw DataError("non-finite observation for subject " +
                      data.subject_ids[obs.subject]);
    lo = std::min(lo, obs.time);
    hi = std::max(hi, obs.time);
  }
  if (!data.labels.empty()) {
    if (data.labels.size() != data.subject_ids.size())
      throw DataError("label table size does not match subject table");
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      int k = data.labels[i];
      if (k < -1 || k >= data.n_classes())
        throw DataError("label out of range for subject " +
                        data.subject_ids[i]);
    }
  }
  return {lo, hi};
}

void validate_dataset(FunctionalDataSet& data) {
  auto [lo, hi] = check_dataset(data);
  data.t_min = lo;
  data.t_max = hi;
}

Matrix fit_subject(const SplineBasis& basis, const std::vector<double>& times,
                   const std::vector<Index>& features,
                   const std::vector<double>& values, Index n_features,
                   const std::string& subject_id) {
  Index m = basis.size();
  std::set<double> distinct(times.begin(), times.end());
  if (static_cast<Index>(distinct.size()) < m) {
    std::ostringstream msg;
    msg << "subject " << subject_id << " has " << distinct.size()
        << " distinct time points but the basis needs " << m;
    throw DataError(msg.str());
  }

  // Bucket observation rows per feature, then solve one least-squares
  // problem per feature over the times where it was actually measured.
  std::vector<std::vector<std::size_t>> rows(n_features);
  for (std::size_t r = 0; r < times.size(); ++r)
    rows[features[r]].push_back(r);

  Matrix coef = Matrix::Zero(m, n_features);
  for (Index j = 0; j < n_features; ++j) {
    if (rows[j].empty()) continue;
    Index nr = static_cast<Index>(rows[j].size());
    Matrix design(nr, m);
    Vector rhs(nr);
    for (Index r = 0; r < nr; ++r) {
      design.row(r) = basis_row(basis, times[rows[j][r]]).transpose();
      rhs[r] = values[rows[j][r]];
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
    coef.col(j) = cod.solve(rhs);
  }
  return coef;
}

SmoothingResult smooth_dataset(const FunctionalDataSet& data,
                               const SplineBasis& basis, int min_timepoints) {
  Index m = basis.size();
  SmoothingResult result;
  result.model.basis = basis;
  result.model.n_features = data.n_features();
  if (min_timepoints <= m) {
    std::ostringstream msg;
    msg << "min_timepoints " << min_timepoints
        << " does not exceed the basis size " << m
        << "; retained fits may be exactly interpolating";
    result.warnings.push_back(msg.str());
  }
  Index needed = std::max<Index>(min_timepoints, m);

  std::vector<std::vector<std::size_t>> by_subject(data.n_subjects());
  for (std::size_t r = 0; r < data.observations.size(); ++r)
    by_subject[data.observations[r].subject].push_back(r);

  for (Index i = 0; i < data.n_subjects(); ++i) {
    std::set<double> distinct;
    for (auto r : by_subject[i]) distinct.insert(data.observations[r].time);
    if (static_cast<Index>(distinct.size()) >= needed) {
      result.model.subjects.push_back(i);
      result.model.labels.push_back(data.labels.empty() ? -1 : data.labels[i]);
    } else {
      result.excluded.push_back(i);
    }
  }

  result.model.coef.resize(result.model.subjects.size());
  parallel_for(result.model.subjects.size(), [&](std::size_t s) {
    Index i = result.model.subjects[s];
    std::vector<double> times, values;
    std::vector<Index> features;
    times.reserve(by_subject[i].size());
    features.reserve(by_subject[i].size());
    values.reserve(by_subject[i].size());
    for (auto r : by_subject[i]) {
      const auto& obs = data.observations[r];
      times.push_back(obs.time);
      features.push_back(obs.feature);
      values.push_back(obs.value);
    }
    result.model.coef[s] = fit_subject(basis, times, features, values,
                                       data.n_features(),
                                       data.subject_ids[i]);
  });
  return result;
}

Vector default_grid(double t_min, double t_max) {
  double lo = std::ceil(t_min - 1e-9);
  double hi = std::floor(t_max + 1e-9);
  if (lo > hi)
    throw DataError("time domain contains no integer grid point; "
                    "provide an explicit evaluation grid");
  Index n = static_cast<Index>(hi - lo) + 1;
  Vector grid(n);
  for (Index t = 0; t < n; ++t) grid[t] = lo + t;
  return grid;
}

CurveTensor evaluate_on_grid(const SplineModel& model, const Vector& grid) {
  if (grid.size() == 0) throw ConfigError("evaluation grid is empty");
  CurveTensor tensor;
  tensor.n_features = model.n_features;
  tensor.grid = grid;
  tensor.labels = model.labels;
  tensor.subjects = model.subjects;

  Matrix phi = evaluate_basis(model.basis, grid);  // T x m
  Index n = static_cast<Index>(model.coef.size());
  Index p = model.n_features;
  Index T = grid.size();
  tensor.values.resize(n, p * T);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Matrix curves = phi * model.coef[i];  // T x p
    for (Index t = 0; t < T; ++t)
      tensor.values.row(i).segment(t * p, p) = curves.row(t);
  });
  return tensor;
}

Standardizer fit_standardizer(const CurveTensor& tensor) {
  Index n = tensor.n_subjects();
  if (n < 2)
    throw DataError("standardization needs at least two subjects");
  Index p = tensor.n_features;
  Index T = tensor.n_times();
  Standardizer st;
  st.mean.resize(p, T);
  st.sd.resize(p, T);
  for (Index t = 0; t < T; ++t) {
    for (Index j = 0; j < p; ++j) {
      auto col = tensor.values.col(t * p + j);
      double mu = col.mean();
      double ss = (col.array() - mu).square().sum();
      double sd = std::sqrt(ss / (n - 1));
      st.mean(j, t) = mu;
      if (sd > 0.0) {
        st.sd(j, t) = sd;
      } else {
        st.sd(j, t) = 1.0;
        st.zero_spread.emplace_back(j, t);
      }
    }
  }
  return st;
}

void Standardizer::apply(CurveTensor& tensor) const {
  Index p = tensor.n_features;
  Index T = tensor.n_times();
  if (mean.rows() != p || mean.cols() != T)
    throw ConfigError("standardizer shape does not match tensor");
  for (Index t = 0; t < T; ++t)
    for (Index j = 0; j < p; ++j) {
      auto col = tensor.values.col(t * p + j);
      col = (col.array() - mean(j, t)) / sd(j, t);
    }
}

}  // namespace mflda
