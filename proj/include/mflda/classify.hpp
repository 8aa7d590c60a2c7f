#pragma once

#include <vector>

#include "mflda/fd_model.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Discriminant score curves: one n x T matrix per component, where
// score(i, t) = sum_j gamma[c](j, t) * x_ij(t).
struct ScoreSet {
  std::vector<Matrix> per_component;

  Index n_subjects() const {
    return per_component.empty() ? 0 : per_component[0].rows();
  }
  Index n_times() const {
    return per_component.empty() ? 0 : per_component[0].cols();
  }
};

ScoreSet project_scores(const CurveTensor& tensor,
                        const std::vector<Matrix>& gamma);

// Per-class mean score curves, one (components x T) matrix per class.
std::vector<Matrix> score_centroids(const ScoreSet& scores,
                                    const std::vector<int>& labels,
                                    int n_classes);

enum class VoteMode { overall, time_wise };

// All ties resolve to the lowest class index. For overall voting the margin
// is the distance gap to the runner-up centroid; for time-wise voting it is
// the vote-share gap between the winning and runner-up classes.
struct Prediction {
  int predicted = 0;
  double margin = 0.0;
  std::vector<int> votes;  // per-time winners, time_wise only
};

std::vector<Prediction> nearest_centroid(const ScoreSet& scores,
                                         const std::vector<Matrix>& centroids,
                                         VoteMode mode);

// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
// series. Requires at least two values per group.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_separation(std::vector<double> a, std::vector<double> b);

}  // namespace mflda
