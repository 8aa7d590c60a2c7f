#pragma once

#include <string>
#include <vector>

#include "mflda/types.hpp"

namespace mflda {

// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  int n_classes() const { return static_cast<int>(counts.rows()); }
  long total() const { return counts.sum(); }
};

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int n_classes);

// Classification metrics. For G = 2 class 0 is the positive class and the
// plain binary formulas apply; for G > 2 precision, recall and F-1 are
// prevalence-weighted one-vs-rest means, balanced accuracy is the macro
// recall, and MCC generalizes through the Gorodkin formula. Any 0/0 metric
// is reported as 0 and named in `undefined`.
struct EvaluationReport {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double mcc = 0.0;
  std::vector<std::string> undefined;
};

EvaluationReport evaluate(const ConfusionMatrix& cm);

// Sum of the six metrics above; undefined terms contribute their reported 0.
double combined_metric(const EvaluationReport& report);

// Feature-selection quality against a known signal set.
struct SelectionReport {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
};

SelectionReport selection_metrics(const std::vector<Index>& selected,
                                  const std::vector<Index>& truth,
                                  Index n_features);

}  // namespace mflda
