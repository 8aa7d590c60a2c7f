#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mflda/bspline.hpp"
#include "mflda/classify.hpp"
#include "mflda/fd_model.hpp"
#include "mflda/sparse.hpp"
#include "mflda/tuning.hpp"
#include "mflda/types.hpp"

namespace mflda {

struct FitOptions {
  Mode mode = Mode::time_dependent;
  int degree = 3;
  int interior_knots = 4;
  int min_timepoints = 8;
  int n_components = 1;
  double tau = -1.0;  // negative = choose by cross-validation
  double selectivity_threshold = 0.70;
  double ridge = -1.0;
  int folds = 5;
  std::uint64_t seed = 0;
  double target_sparsity = 0.10;
  double sparsity_band = 0.05;
  Index max_dense_dim = kDefaultMaxDenseDim;
};

// Everything needed to score new subjects: the smoothing basis, the
// evaluation grid, the training standardizer, the sparse discriminants and
// the class centroids in score space.
struct FitModel {
  Mode mode = Mode::time_dependent;
  double tau = 0.0;
  double ridge = 0.0;  // resolved value actually used
  int n_components = 1;
  double selectivity_threshold = 0.70;
  int min_timepoints = 8;
  SplineBasis basis;
  Vector grid;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  Standardizer standardizer;
  SelectionProfile profile;
  std::vector<Matrix> centroids;  // per class, components x T
};

struct FitReport {
  FitModel model;
  bool tuned = false;
  TuneResult tuning;  // populated when tuned
  RangeResult range;  // populated when tuned
  bool has_ks = false;
  KsResult ks;  // two-class diagnostic on pooled first-component scores
  CurveTensor train_tensor;  // standardized training tensor
  std::vector<std::string> warnings;
};

// Smooth, standardize, optionally tune tau, fit the sparse discriminants
// and the training centroids. Unlabeled subjects are dropped from training
// with a warning.
FitReport fit_pipeline(const FunctionalDataSet& train, const FitOptions& opt);

struct ClassifyResult {
  std::vector<Prediction> preds;
  ScoreSet scores;
  std::vector<Index> subjects;  // dataset indices of the scored subjects
  std::vector<std::string> warnings;
};

// Features are matched to the training model by name; subjects whose curves
// cannot be smoothed on the training basis are excluded with a warning.
ClassifyResult classify_dataset(const FitModel& model,
                                const FunctionalDataSet& data, VoteMode vote);

void save_model(const std::string& path, const FitModel& model);
FitModel load_model(const std::string& path);

// Stratified holdout split; the shuffle within each class is seeded.
struct HoldoutSplit {
  FunctionalDataSet train;
  FunctionalDataSet test;
};
HoldoutSplit split_holdout(const FunctionalDataSet& data, double fraction,
                           std::uint64_t seed);

}  // namespace mflda
