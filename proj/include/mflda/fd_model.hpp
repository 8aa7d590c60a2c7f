#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mflda/bspline.hpp"
#include "mflda/types.hpp"

namespace mflda {

// One measurement of one feature on one subject.
struct Observation {
  Index subject = 0;
  double time = 0.0;
  Index feature = 0;
  double value = 0.0;
};

// Sparse irregular longitudinal data in long form. Subjects, features and
// classes are referred to by index; the name tables keep the external ids.
struct FunctionalDataSet {
  std::vector<std::string> subject_ids;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<int> labels;  // per subject, -1 when unlabeled
  std::vector<Observation> observations;
  double t_min = 0.0;
  double t_max = 0.0;

  Index n_subjects() const { return static_cast<Index>(subject_ids.size()); }
  Index n_features() const { return static_cast<Index>(feature_names.size()); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
};

// Checks indices, label ranges and value finiteness; returns the time
// domain (min, max). Throws DataError on violations.
std::pair<double, double> check_dataset(const FunctionalDataSet& data);

// check_dataset plus storing the recomputed domain on the dataset.
void validate_dataset(FunctionalDataSet& data);

// Per-subject basis coefficients: coef[i] is m x p for retained subject i.
struct SplineModel {
  SplineBasis basis;
  Index n_features = 0;
  std::vector<Matrix> coef;
  std::vector<Index> subjects;  // original dataset indices
  std::vector<int> labels;
};

struct SmoothingResult {
  SplineModel model;
  std::vector<Index> excluded;  // original dataset indices
  std::vector<std::string> warnings;
};

// Least-squares basis coefficients (m x n_features) for one subject given
// its observation triples. Features missing at some times use whatever
// times they have; rank-deficient fits take the minimum-norm solution.
// Throws DataError when the subject has fewer than m distinct times.
Matrix fit_subject(const SplineBasis& basis, const std::vector<double>& times,
                   const std::vector<Index>& features,
                   const std::vector<double>& values, Index n_features,
                   const std::string& subject_id);

// Fits every subject with at least max(min_timepoints, m) distinct time
// points and reports the rest as excluded. min_timepoints <= m draws a
// warning since the fit is then exactly determined or underdetermined.
SmoothingResult smooth_dataset(const FunctionalDataSet& data,
                               const SplineBasis& basis, int min_timepoints);

// Complete-data tensor on a common grid, stored as an n x (p*T) matrix
// whose column t*p + j holds feature j at grid point t.
struct CurveTensor {
  Matrix values;
  Index n_features = 0;
  Vector grid;
  std::vector<int> labels;
  std::vector<Index> subjects;

  Index n_subjects() const { return values.rows(); }
  Index n_times() const { return grid.size(); }
  double at(Index i, Index j, Index t) const {
    return values(i, t * n_features + j);
  }
};

// Integer grid spanning the domain (weekly sampling convention).
Vector default_grid(double t_min, double t_max);

CurveTensor evaluate_on_grid(const SplineModel& model, const Vector& grid);

// Per (feature, time) centering and unit-variance scaling across subjects,
// sample standard deviation with n-1. Slices with zero spread are centered
// only and recorded in zero_spread.
struct Standardizer {
  Matrix mean;  // p x T
  Matrix sd;    // p x T, 1.0 on zero-spread slices
  std::vector<std::pair<Index, Index>> zero_spread;

  void apply(CurveTensor& tensor) const;
};

Standardizer fit_standardizer(const CurveTensor& tensor);

}  // namespace mflda
