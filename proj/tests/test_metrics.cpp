#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mflda/metrics.hpp"
#include "mflda/rng.hpp"
#include "support/oracles.hpp"

using namespace mflda;

namespace {

ConfusionMatrix make_cm(std::initializer_list<std::initializer_list<int>> rows) {
  ConfusionMatrix cm;
  int n = static_cast<int>(rows.size());
  cm.counts = Eigen::MatrixXi::Zero(n, n);
  int r = 0;
  for (auto& row : rows) {
    int c = 0;
    for (int v : row) cm.counts(r, c++) = v;
    ++r;
  }
  return cm;
}

ConfusionMatrix random_cm(Rng& rng, int G, int max_count) {
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(G, G);
  for (int r = 0; r < G; ++r)
    for (int c = 0; c < G; ++c)
      cm.counts(r, c) = static_cast<int>(rng.bounded(max_count + 1));
  return cm;
}

}  // namespace

TEST_CASE("confusion rows are truth, columns are predictions") {
  ConfusionMatrix cm = confusion({0, 0, 1, 1, 2}, {0, 1, 1, 1, 0}, 3);
  CHECK(cm.counts(0, 0) == 1);
  CHECK(cm.counts(0, 1) == 1);
  CHECK(cm.counts(1, 1) == 2);
  CHECK(cm.counts(2, 0) == 1);
  CHECK(cm.total() == 5);
  CHECK_THROWS_AS(confusion({0}, {0, 1}, 2), ConfigError);
  CHECK_THROWS_AS(confusion({0, 2}, {0, 0}, 2), DataError);
}

TEST_CASE("hand-computed binary report") {
  // tp=2 fn=1 fp=1 tn=2: every rate is 2/3 and MCC is 1/3.
  ConfusionMatrix cm = make_cm({{2, 1}, {1, 2}});
  EvaluationReport rep = evaluate(cm);
  CHECK(rep.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(rep.balanced_accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(rep.precision == doctest::Approx(2.0 / 3.0));
  CHECK(rep.recall == doctest::Approx(2.0 / 3.0));
  CHECK(rep.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(rep.mcc == doctest::Approx(1.0 / 3.0));
  CHECK(rep.undefined.empty());
  CHECK(combined_metric(rep) == doctest::Approx(11.0 / 3.0));
}

TEST_CASE("binary metrics agree with the textbook formulas") {
  Rng rng(71);
  for (int rep_i = 0; rep_i < 100; ++rep_i) {
    ConfusionMatrix cm = random_cm(rng, 2, 15);
    if (cm.total() == 0) continue;
    EvaluationReport rep = evaluate(cm);
    oracle::BinaryCounts c = oracle::binary_counts(cm.counts);
    double prec = oracle::safe_div(c.tp, c.tp + c.fp);
    double rec = oracle::safe_div(c.tp, c.tp + c.fn);
    double spec = oracle::safe_div(c.tn, c.tn + c.fp);
    CHECK(rep.accuracy ==
          doctest::Approx(double(c.tp + c.tn) / double(cm.total())));
    CHECK(rep.precision == doctest::Approx(prec));
    CHECK(rep.recall == doctest::Approx(rec));
    CHECK(rep.balanced_accuracy == doctest::Approx(0.5 * (rec + spec)));
    CHECK(rep.f1 == doctest::Approx(oracle::safe_div(2.0 * prec * rec,
                                                     prec + rec)));
    CHECK(rep.mcc == doctest::Approx(oracle::binary_mcc(c)).epsilon(1e-10));
  }
}

TEST_CASE("multi-class MCC matches the literal Gorodkin sums") {
  Rng rng(72);
  for (int G : {3, 4}) {
    for (int rep_i = 0; rep_i < 60; ++rep_i) {
      ConfusionMatrix cm = random_cm(rng, G, 12);
      if (cm.total() == 0) continue;
      EvaluationReport rep = evaluate(cm);
      CHECK(rep.mcc ==
            doctest::Approx(oracle::gorodkin_mcc(cm.counts)).epsilon(1e-10));
    }
  }
}

TEST_CASE("binary Gorodkin reduces to the binary MCC") {
  Rng rng(73);
  for (int rep_i = 0; rep_i < 50; ++rep_i) {
    ConfusionMatrix cm = random_cm(rng, 2, 20);
    if (cm.total() == 0) continue;
    oracle::BinaryCounts c = oracle::binary_counts(cm.counts);
    CHECK(oracle::gorodkin_mcc(cm.counts) ==
          doctest::Approx(oracle::binary_mcc(c)).epsilon(1e-10));
  }
}

TEST_CASE("perfect diagonal confusion scores MCC one") {
  for (int G : {2, 3, 5}) {
    ConfusionMatrix cm;
    cm.counts = Eigen::MatrixXi::Zero(G, G);
    for (int k = 0; k < G; ++k) cm.counts(k, k) = 3 + k;
    EvaluationReport rep = evaluate(cm);
    CHECK(rep.mcc == doctest::Approx(1.0));
    CHECK(rep.accuracy == doctest::Approx(1.0));
    CHECK(rep.f1 == doctest::Approx(1.0));
    CHECK(combined_metric(rep) == doctest::Approx(6.0));
  }
}

TEST_CASE("degenerate ratios report zero and are named") {
  // Nothing predicted positive: precision and MCC are 0/0.
  ConfusionMatrix cm = make_cm({{0, 3}, {0, 3}});
  EvaluationReport rep = evaluate(cm);
  CHECK(rep.precision == 0.0);
  CHECK(rep.mcc == 0.0);
  CHECK(!rep.undefined.empty());
  bool names_precision =
      std::find(rep.undefined.begin(), rep.undefined.end(), "precision") !=
      rep.undefined.end();
  CHECK(names_precision);
  // Combined metric still sums the reported values.
  CHECK(combined_metric(rep) ==
        doctest::Approx(rep.accuracy + rep.balanced_accuracy + rep.f1 +
                        rep.precision + rep.recall + rep.mcc));
}

TEST_CASE("weighted one-vs-rest aggregation for three classes") {
  ConfusionMatrix cm = make_cm({{5, 1, 0}, {2, 6, 2}, {0, 1, 3}});
  EvaluationReport rep = evaluate(cm);
  double total = 20.0;
  // Per class k: recall_k = C_kk / row_k, precision_k = C_kk / col_k.
  double rec0 = 5.0 / 6.0, rec1 = 6.0 / 10.0, rec2 = 3.0 / 4.0;
  double pre0 = 5.0 / 7.0, pre1 = 6.0 / 8.0, pre2 = 3.0 / 5.0;
  double w0 = 6.0 / total, w1 = 10.0 / total, w2 = 4.0 / total;
  CHECK(rep.recall == doctest::Approx(w0 * rec0 + w1 * rec1 + w2 * rec2));
  CHECK(rep.precision == doctest::Approx(w0 * pre0 + w1 * pre1 + w2 * pre2));
  CHECK(rep.balanced_accuracy ==
        doctest::Approx((rec0 + rec1 + rec2) / 3.0));
  double f0 = 2.0 * pre0 * rec0 / (pre0 + rec0);
  double f1 = 2.0 * pre1 * rec1 / (pre1 + rec1);
  double f2 = 2.0 * pre2 * rec2 / (pre2 + rec2);
  CHECK(rep.f1 == doctest::Approx(w0 * f0 + w1 * f1 + w2 * f2));
  CHECK(rep.accuracy == doctest::Approx(14.0 / 20.0));
  CHECK(rep.mcc == doctest::Approx(oracle::gorodkin_mcc(cm.counts)));
}

TEST_CASE("selection metrics against a known signal set") {
  std::vector<Index> truth = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<Index> selected = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  SelectionReport rep = selection_metrics(selected, truth, 100);
  CHECK(rep.sensitivity == doctest::Approx(1.0));
  CHECK(rep.specificity == doctest::Approx(88.0 / 90.0));
  // F1 = 2 tp / (2 tp + fp + fn) = 20 / 22.
  CHECK(rep.f1 == doctest::Approx(20.0 / 22.0));
}

TEST_CASE("selection metric edge cases") {
  SelectionReport none = selection_metrics({}, {1, 2}, 10);
  CHECK(none.sensitivity == 0.0);
  CHECK(none.specificity == doctest::Approx(1.0));
  CHECK(none.f1 == 0.0);
  SelectionReport exact = selection_metrics({1, 2}, {1, 2}, 10);
  CHECK(exact.sensitivity == doctest::Approx(1.0));
  CHECK(exact.specificity == doctest::Approx(1.0));
  CHECK(exact.f1 == doctest::Approx(1.0));
}
