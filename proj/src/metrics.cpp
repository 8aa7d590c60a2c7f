#include "mflda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mflda {

namespace {

// 0/0 guard: returns num/den, or 0 with a note when den is 0.
double ratio(double num, double den, const std::string& name,
             std::vector<std::string>& undefined) {
  if (den == 0.0) {
    undefined.push_back(name);
    return 0.0;
  }
  return num / den;
}

EvaluationReport evaluate_binary(const ConfusionMatrix& cm) {
  double tp = cm.counts(0, 0);
  double fn = cm.counts(0, 1);
  double fp = cm.counts(1, 0);
  double tn = cm.counts(1, 1);
  double total = tp + fn + fp + tn;

  EvaluationReport r;
  r.accuracy = ratio(tp + tn, total, "accuracy", r.undefined);
  double sens = ratio(tp, tp + fn, "recall", r.undefined);
  double spec = ratio(tn, tn + fp, "specificity", r.undefined);
  r.balanced_accuracy = 0.5 * (sens + spec);
  r.recall = sens;
  r.precision = ratio(tp, tp + fp, "precision", r.undefined);
  r.f1 = ratio(tp, tp + 0.5 * (fp + fn), "f1", r.undefined);
  double mcc_den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  r.mcc = ratio(tp * tn - fp * fn, mcc_den, "mcc", r.undefined);
  return r;
}

EvaluationReport evaluate_weighted(const ConfusionMatrix& cm) {
  int g = cm.n_classes();
  double total = static_cast<double>(cm.total());
  EvaluationReport r;
  if (total == 0.0) {
    r.undefined = {"accuracy", "balanced_accuracy", "f1",
                   "precision", "recall", "mcc"};
    return r;
  }

  double trace = 0.0;
  Vector row_sum = Vector::Zero(g), col_sum = Vector::Zero(g);
  for (int k = 0; k < g; ++k) {
    trace += cm.counts(k, k);
    for (int l = 0; l < g; ++l) {
      row_sum[k] += cm.counts(k, l);
      col_sum[l] += cm.counts(k, l);
    }
  }
  r.accuracy = trace / total;

  double macro_recall = 0.0;
  for (int k = 0; k < g; ++k) {
    double tp = cm.counts(k, k);
    double fn = row_sum[k] - tp;
    double fp = col_sum[k] - tp;
    double w = row_sum[k] / total;
    std::ostringstream tag;
    tag << "[" << k << "]";
    double rec = ratio(tp, tp + fn, "recall" + tag.str(), r.undefined);
    macro_recall += rec;
    r.recall += w * rec;
    r.precision += w * ratio(tp, tp + fp, "precision" + tag.str(), r.undefined);
    r.f1 += w * ratio(tp, tp + 0.5 * (fp + fn), "f1" + tag.str(), r.undefined);
  }
  r.balanced_accuracy = macro_recall / g;

  // Gorodkin's R_K: (s c - sum_k t_k p_k) / sqrt((s^2 - sum p^2)(s^2 - sum t^2))
  double s = total;
  double cov = s * trace - row_sum.dot(col_sum);
  double den = std::sqrt((s * s - col_sum.squaredNorm()) *
                         (s * s - row_sum.squaredNorm()));
  r.mcc = ratio(cov, den, "mcc", r.undefined);
  return r;
}

}  // namespace

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int n_classes) {
  if (truth.size() != predicted.size())
    throw ConfigError("truth and prediction lengths differ");
  if (n_classes < 2) throw ConfigError("confusion matrix needs >= 2 classes");
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    int t = truth[i];
    int p = predicted[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw DataError("class label outside [0, G)");
    ++cm.counts(t, p);
  }
  return cm;
}

EvaluationReport evaluate(const ConfusionMatrix& cm) {
  if (cm.n_classes() < 2 || cm.counts.rows() != cm.counts.cols())
    throw ConfigError("confusion matrix must be square with G >= 2");
  if (cm.counts.minCoeff() < 0)
    throw DataError("confusion matrix has negative counts");
  return cm.n_classes() == 2 ? evaluate_binary(cm) : evaluate_weighted(cm);
}

double combined_metric(const EvaluationReport& r) {
  return r.accuracy + r.balanced_accuracy + r.f1 + r.precision + r.recall +
         r.mcc;
}

SelectionReport selection_metrics(const std::vector<Index>& selected,
                                  const std::vector<Index>& truth,
                                  Index n_features) {
  std::set<Index> sel(selected.begin(), selected.end());
  std::set<Index> tru(truth.begin(), truth.end());
  for (Index j : sel)
    if (j < 0 || j >= n_features)
      throw ConfigError("selected feature index out of range");
  for (Index j : tru)
    if (j < 0 || j >= n_features)
      throw ConfigError("truth feature index out of range");

  double tp = 0.0;
  for (Index j : sel)
    if (tru.count(j)) tp += 1.0;
  double fp = static_cast<double>(sel.size()) - tp;
  double fn = static_cast<double>(tru.size()) - tp;
  double tn = static_cast<double>(n_features) - tp - fp - fn;

  SelectionReport r;
  r.sensitivity = tru.empty() ? 0.0 : tp / static_cast<double>(tru.size());
  r.specificity = (tn + fp) == 0.0 ? 0.0 : tn / (tn + fp);
  double den = tp + 0.5 * (fp + fn);
  r.f1 = den == 0.0 ? 0.0 : tp / den;
  return r;
}

}  // namespace mflda
