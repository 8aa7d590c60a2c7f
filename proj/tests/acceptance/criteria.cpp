// Acceptance suite: ten end-to-end checks, one [PASS]/[FAIL] line each.
// Thresholds are pinned as constants next to each criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mflda/classify.hpp"
#include "mflda/lda.hpp"
#include "mflda/metrics.hpp"
#include "mflda/parallel.hpp"
#include "mflda/pipeline.hpp"
#include "mflda/rng.hpp"
#include "mflda/scatter.hpp"
#include "mflda/simgen.hpp"
#include "mflda/sparse.hpp"

#include "../support/oracles.hpp"

namespace fs = std::filesystem;
using namespace mflda;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// One simulation replicate: generate, split in half per class, fit with
// cross-validated tau, score the held-out half.
struct RepResult {
  EvaluationReport eval;
  SelectionReport sel;
};

RepResult run_replicate(const SimConfig& cfg, Mode mode, int n_components,
                        std::uint64_t rep, double holdout = 0.5,
                        double selectivity = -1.0) {
  SimConfig c = cfg;
  c.seed = cfg.seed + rep;
  SimResult sim = generate(c);
  HoldoutSplit split = split_holdout(sim.data, holdout, rep);

  FitOptions opt;
  opt.mode = mode;
  opt.n_components = n_components;
  opt.seed = rep;
  if (selectivity > 0.0) opt.selectivity_threshold = selectivity;
  FitReport fit = fit_pipeline(split.train, opt);

  ClassifyResult cr =
      classify_dataset(fit.model, split.test, VoteMode::overall);
  std::vector<int> truth, pred;
  for (std::size_t i = 0; i < cr.subjects.size(); ++i) {
    truth.push_back(split.test.labels[cr.subjects[i]]);
    pred.push_back(cr.preds[i].predicted);
  }
  int G = static_cast<int>(cfg.group_sizes.size());
  RepResult out;
  out.eval = evaluate(confusion(truth, pred, G));
  out.sel = selection_metrics(fit.model.profile.selected,
                              sim.truth.signal_set, cfg.n_features);
  return out;
}

SimConfig binary_config(Scenario scenario, std::uint64_t seed_base) {
  SimConfig cfg;
  cfg.group_sizes = {100, 100};  // 50 per group after the 0.5 holdout
  cfg.n_features = 60;
  cfg.n_times = 40;
  cfg.sigma = 25.0;
  cfg.scenario = scenario;
  cfg.seed = seed_base;
  return cfg;
}

SimConfig multi_config(Scenario scenario, std::uint64_t seed_base) {
  SimConfig cfg;
  cfg.group_sizes = {80, 80, 80};  // 40 per group after the 0.5 holdout
  cfg.n_features = 60;
  cfg.n_times = 40;
  cfg.sigma = 25.0;
  cfg.scenario = scenario;
  cfg.seed = seed_base;
  return cfg;
}

// --------------------------------------------------------------------------
// 1. Binary, groups differ at every time point: mean classification F1 and
//    selection F1 over 20 replicates, under a total runtime budget.
// --------------------------------------------------------------------------
bool criterion1() {
  constexpr int kReps = 20;
  constexpr double kMinClassF1 = 0.97;
  constexpr double kMinSelF1 = 0.80;
  constexpr double kMaxSeconds = 300.0;

  auto t0 = std::chrono::steady_clock::now();
  SimConfig cfg = binary_config(Scenario::all_time, 100);
  double class_f1 = 0.0, sel_f1 = 0.0;
  for (int r = 0; r < kReps; ++r) {
    RepResult res = run_replicate(cfg, Mode::time_independent, 1, r);
    class_f1 += res.eval.f1 / kReps;
    sel_f1 += res.sel.f1 / kReps;
  }
  double secs = seconds_since(t0);
  bool pass = class_f1 >= kMinClassF1 && sel_f1 >= kMinSelF1 &&
              secs < kMaxSeconds;
  std::printf(
      "[%s] criterion 1: binary all-time, %d reps: mean class F1 %.3f "
      "(>= %.2f), mean selection F1 %.3f (>= %.2f), %.1f s (< %.0f s)\n",
      pass ? "PASS" : "FAIL", kReps, class_f1, kMinClassF1, sel_f1, kMinSelF1,
      secs, kMaxSeconds);
  return pass;
}

// --------------------------------------------------------------------------
// 2. Binary, groups differ only inside [5,15]: classification holds up and
//    signal features are still found. The persistence rule is matched to the
//    signal's temporal prevalence: the window covers 11 of 40 grid points,
//    so a feature counts as selected when its coefficients survive on a
//    quarter of the domain rather than the all-time default of 70%, which
//    no windowed effect can reach.
// --------------------------------------------------------------------------
bool criterion2() {
  constexpr int kReps = 20;
  constexpr double kMinClassF1 = 0.90;
  constexpr double kMinSelSens = 0.80;
  constexpr double kWindowSelectivity = 0.25;

  SimConfig cfg = binary_config(Scenario::window_5_15, 200);
  double class_f1 = 0.0, sel_sens = 0.0;
  for (int r = 0; r < kReps; ++r) {
    RepResult res = run_replicate(cfg, Mode::time_independent, 1, r, 0.5,
                                  kWindowSelectivity);
    class_f1 += res.eval.f1 / kReps;
    sel_sens += res.sel.sensitivity / kReps;
  }
  bool pass = class_f1 >= kMinClassF1 && sel_sens >= kMinSelSens;
  std::printf(
      "[%s] criterion 2: binary window [5,15], %d reps: mean class F1 %.3f "
      "(>= %.2f), mean selection sensitivity %.3f (>= %.2f)\n",
      pass ? "PASS" : "FAIL", kReps, class_f1, kMinClassF1, sel_sens,
      kMinSelSens);
  return pass;
}

// --------------------------------------------------------------------------
// 3. Three classes, differences at every time point: weighted F1 in both
//    modes and time-dependent selection F1 over 10 replicates.
// --------------------------------------------------------------------------
bool criterion3() {
  constexpr int kReps = 10;
  constexpr double kMinWeightedF1 = 0.95;
  constexpr double kMinSelF1D = 0.90;

  SimConfig cfg = multi_config(Scenario::all_time, 300);
  double f1_dep = 0.0, f1_ind = 0.0, sel_f1_dep = 0.0;
  for (int r = 0; r < kReps; ++r) {
    RepResult dep = run_replicate(cfg, Mode::time_dependent, 2, r);
    RepResult ind = run_replicate(cfg, Mode::time_independent, 2, r);
    f1_dep += dep.eval.f1 / kReps;
    f1_ind += ind.eval.f1 / kReps;
    sel_f1_dep += dep.sel.f1 / kReps;
  }
  bool pass = f1_dep >= kMinWeightedF1 && f1_ind >= kMinWeightedF1 &&
              sel_f1_dep >= kMinSelF1D;
  std::printf(
      "[%s] criterion 3: three-class all-time, %d reps: weighted F1 "
      "dep %.3f / ind %.3f (each >= %.2f), dep selection F1 %.3f (>= %.2f)\n",
      pass ? "PASS" : "FAIL", kReps, f1_dep, f1_ind, kMinWeightedF1,
      sel_f1_dep, kMinSelF1D);
  return pass;
}

// --------------------------------------------------------------------------
// 4. Subject-specific temporal effects: with curves wobbling per subject,
//    the time-dependent mode must beat the time-independent mode on
//    selection F1 in at least 8 of 10 replicates. Ordering check only.
// --------------------------------------------------------------------------
bool criterion4() {
  constexpr int kReps = 10;
  constexpr int kMinWins = 8;

  SimConfig cfg = multi_config(Scenario::window_5_15_with_ste, 400);
  int wins = 0;
  for (int r = 0; r < kReps; ++r) {
    double dep_f1 = -1.0, ind_f1 = -1.0;
    try {
      dep_f1 = run_replicate(cfg, Mode::time_dependent, 2, r).sel.f1;
    } catch (const std::exception&) {
    }
    try {
      ind_f1 = run_replicate(cfg, Mode::time_independent, 2, r).sel.f1;
    } catch (const std::exception&) {
    }
    if (dep_f1 > ind_f1) ++wins;
  }
  bool pass = wins >= kMinWins;
  std::printf(
      "[%s] criterion 4: temporal-effect robustness: dep selection F1 beats "
      "ind on %d/%d replicates (>= %d)\n",
      pass ? "PASS" : "FAIL", wins, kReps, kMinWins);
  return pass;
}

// --------------------------------------------------------------------------
// 5. Sparse solver exactness: the closed form must match a simplex LP on
//    500 random instances, in objective and feasibility, within budget.
// --------------------------------------------------------------------------
bool criterion5() {
  constexpr int kInstances = 500;
  constexpr double kTol = 1e-8;
  constexpr double kMaxSeconds = 30.0;

  auto t0 = std::chrono::steady_clock::now();
  Rng rng(505);
  double max_obj_err = 0.0, max_gap = 0.0;
  for (int it = 0; it < kInstances; ++it) {
    Index d = 1 + static_cast<Index>(rng.bounded(10));
    Vector b(d);
    for (Index i = 0; i < d; ++i) b[i] = rng.normal(0.0, 3.0);
    double lambda = rng.uniform(0.2, 4.0);
    double tau = rng.uniform() * 1.1 * b.cwiseAbs().maxCoeff();
    Vector g = soft_threshold_solution(b, lambda, tau);
    double gap = (b - lambda * g).cwiseAbs().maxCoeff() - tau;
    max_gap = std::max(max_gap, gap);
    double lp = oracle::sparse_l1_lp(b, lambda, tau);
    max_obj_err = std::max(max_obj_err, std::abs(g.lpNorm<1>() - lp));
  }
  double secs = seconds_since(t0);
  bool pass = max_obj_err <= kTol && max_gap <= kTol && secs < kMaxSeconds;
  std::printf(
      "[%s] criterion 5: closed form vs LP on %d instances: max objective "
      "gap %.2e, max feasibility gap %.2e (each <= %.0e), %.1f s (< %.0f s)\n",
      pass ? "PASS" : "FAIL", kInstances, max_obj_err, max_gap, kTol, secs,
      kMaxSeconds);
  return pass;
}

// --------------------------------------------------------------------------
// 6. Non-sparse solver vs a brute-force dense generalized eigensolve with
//    explicit (S_p + ridge I)^-1, on 200 small random tensors, both modes.
// --------------------------------------------------------------------------
double direction_gap(const Vector& a, const Vector& b) {
  Vector u = a.normalized();
  Vector v = b.normalized();
  return std::min((u - v).cwiseAbs().maxCoeff(), (u + v).cwiseAbs().maxCoeff());
}

bool criterion6() {
  constexpr int kInstances = 200;
  constexpr double kValueTol = 1e-6;
  constexpr double kVectorTol = 1e-5;

  Rng rng(606);
  double max_val_err = 0.0, max_vec_err = 0.0;
  for (int it = 0; it < kInstances; ++it) {
    Index p = 1 + static_cast<Index>(rng.bounded(4));
    Index T = 1 + static_cast<Index>(rng.bounded(3));
    int G = 2 + static_cast<int>(rng.bounded(2));
    Index n = p * T + 6 + static_cast<Index>(rng.bounded(8));

    CurveTensor tensor;
    tensor.n_features = p;
    tensor.grid = Vector::LinSpaced(T, 1.0, static_cast<double>(T));
    tensor.values.resize(n, p * T);
    for (Index i = 0; i < n; ++i) {
      int g = static_cast<int>(i) % G;
      tensor.labels.push_back(g);
      tensor.subjects.push_back(i);
      for (Index t = 0; t < T; ++t)
        for (Index j = 0; j < p; ++j)
          tensor.values(i, t * p + j) =
              rng.normal() + g * (0.8 + 0.5 * j + 0.3 * t);
    }
    double ridge = 1e-3;

    ScatterPair dep =
        build_scatter_from_tensor(tensor, Mode::time_dependent, ridge);
    oracle::GenEig ref =
        oracle::dense_gen_eig(dep.between[0], dep.within[0], ridge);
    EigenSolution sol = solve_tensor(tensor, Mode::time_dependent, ridge, 1);
    max_val_err = std::max(max_val_err,
                           std::abs(sol.blocks[0].eigenvalues[0] - ref.value));
    max_vec_err = std::max(
        max_vec_err, direction_gap(sol.blocks[0].beta.col(0), ref.vector));

    ScatterPair ind =
        build_scatter_from_tensor(tensor, Mode::time_independent, ridge);
    EigenSolution soli =
        solve_tensor(tensor, Mode::time_independent, ridge, 1);
    for (Index t = 0; t < T; ++t) {
      oracle::GenEig reft =
          oracle::dense_gen_eig(ind.between[t], ind.within[t], ridge);
      max_val_err = std::max(
          max_val_err, std::abs(soli.blocks[t].eigenvalues[0] - reft.value));
      max_vec_err = std::max(
          max_vec_err, direction_gap(soli.blocks[t].beta.col(0), reft.vector));
    }
  }
  bool pass = max_val_err <= kValueTol && max_vec_err <= kVectorTol;
  std::printf(
      "[%s] criterion 6: eigensolver vs dense oracle on %d tensors: max "
      "eigenvalue error %.2e (<= %.0e), max direction error %.2e (<= %.0e)\n",
      pass ? "PASS" : "FAIL", kInstances, max_val_err, kValueTol, max_vec_err,
      kVectorTol);
  return pass;
}

// --------------------------------------------------------------------------
// 7. Threshold boundaries: tau at the sup norm zeroes the solution exactly;
//    tau = 0 returns b / lambda coordinate for coordinate.
// --------------------------------------------------------------------------
bool criterion7() {
  constexpr int kInstances = 200;

  Rng rng(707);
  bool zeros_ok = true, dense_ok = true;
  for (int it = 0; it < kInstances; ++it) {
    Index d = 2 + static_cast<Index>(rng.bounded(12));
    Vector b(d);
    for (Index i = 0; i < d; ++i) b[i] = rng.normal(0.0, 2.0);
    double lambda = rng.uniform(0.2, 3.0);
    Vector zero = soft_threshold_solution(b, lambda, b.cwiseAbs().maxCoeff());
    zeros_ok = zeros_ok && (zero.array() == 0.0).all();
    Vector dense = soft_threshold_solution(b, lambda, 0.0);
    dense_ok = dense_ok && dense == (b / lambda).eval();
  }

  // Tensor level: tau at the profile's own sup norm keeps everything zero
  // in both modes, refinement included.
  bool tensor_ok = true;
  for (int it = 0; it < 10; ++it) {
    Index p = 3, T = 4, n = 24;
    CurveTensor tensor;
    tensor.n_features = p;
    tensor.grid = Vector::LinSpaced(T, 1.0, 4.0);
    tensor.values.resize(n, p * T);
    for (Index i = 0; i < n; ++i) {
      int g = static_cast<int>(i) % 2;
      tensor.labels.push_back(g);
      tensor.subjects.push_back(i);
      for (Index c = 0; c < p * T; ++c)
        tensor.values(i, c) = rng.normal() + g * (c % p == 0 ? 2.0 : 0.0);
    }
    for (Mode mode : {Mode::time_dependent, Mode::time_independent}) {
      SparseOptions opt;
      opt.mode = mode;
      opt.tau = 0.0;
      double sup = sparse_discriminants(tensor, opt).sup_norm;
      opt.tau = sup;
      SelectionProfile prof = sparse_discriminants(tensor, opt);
      tensor_ok = tensor_ok && prof.gamma[0].cwiseAbs().maxCoeff() == 0.0;
    }
  }
  bool pass = zeros_ok && dense_ok && tensor_ok;
  std::printf(
      "[%s] criterion 7: threshold boundaries on %d instances: tau = sup "
      "norm all-zero %s, tau = 0 equals b/lambda %s, tensor sup norm "
      "all-zero %s\n",
      pass ? "PASS" : "FAIL", kInstances, zeros_ok ? "yes" : "NO",
      dense_ok ? "yes" : "NO", tensor_ok ? "yes" : "NO");
  return pass;
}

// --------------------------------------------------------------------------
// 8. Metric formulas against independent references on 25 hand-built
//    confusion matrices, plus the MCC = +1 property on diagonal matrices.
// --------------------------------------------------------------------------
Eigen::MatrixXi cm2(int a, int b, int c, int d) {
  Eigen::MatrixXi m(2, 2);
  m << a, b, c, d;
  return m;
}

// Weighted one-vs-rest reference, written from the definitions: weights are
// true-class prevalences, per-class 0/0 counts as 0.
struct MultiRef {
  double accuracy, balanced, f1, precision, recall;
};

MultiRef multi_reference(const Eigen::MatrixXi& C) {
  int G = static_cast<int>(C.rows());
  double total = C.sum();
  MultiRef ref{0.0, 0.0, 0.0, 0.0, 0.0};
  double trace = 0.0;
  for (int k = 0; k < G; ++k) trace += C(k, k);
  ref.accuracy = oracle::safe_div(trace, total);
  for (int k = 0; k < G; ++k) {
    double row = C.row(k).sum(), col = C.col(k).sum(), tp = C(k, k);
    double recall_k = oracle::safe_div(tp, row);
    double precision_k = oracle::safe_div(tp, col);
    double f1_k = oracle::safe_div(tp, tp + 0.5 * ((row - tp) + (col - tp)));
    double w = oracle::safe_div(row, total);
    ref.balanced += recall_k / G;
    ref.recall += w * recall_k;
    ref.precision += w * precision_k;
    ref.f1 += w * f1_k;
  }
  return ref;
}

bool criterion8() {
  constexpr double kTol = 1e-12;

  std::vector<Eigen::MatrixXi> table;
  table.push_back(cm2(2, 1, 1, 2));
  table.push_back(cm2(5, 0, 0, 5));
  table.push_back(cm2(0, 3, 0, 3));
  table.push_back(cm2(3, 0, 3, 0));
  table.push_back(cm2(0, 0, 0, 5));
  table.push_back(cm2(10, 0, 0, 0));
  table.push_back(cm2(1, 2, 3, 4));
  table.push_back(cm2(7, 3, 2, 8));
  table.push_back(cm2(0, 5, 5, 0));
  table.push_back(cm2(2, 2, 2, 2));
  table.push_back(cm2(100, 1, 1, 100));
  table.push_back(cm2(1, 0, 0, 99));
  table.push_back(cm2(4, 1, 2, 3));
  table.push_back(cm2(6, 2, 1, 1));
  table.push_back(cm2(3, 3, 0, 0));
  Eigen::MatrixXi m(3, 3);
  m.setZero();
  m.diagonal() << 1, 1, 1;
  table.push_back(m);
  m.setZero();
  m.diagonal() << 5, 3, 2;
  table.push_back(m);
  m << 5, 1, 0, 2, 6, 2, 0, 1, 3;
  table.push_back(m);
  m << 2, 0, 0, 0, 0, 2, 0, 2, 0;
  table.push_back(m);
  m.setOnes();
  table.push_back(m);
  m.setZero();
  m.diagonal() << 2, 0, 3;
  table.push_back(m);
  m << 4, 0, 1, 0, 5, 0, 2, 0, 3;
  table.push_back(m);
  Eigen::MatrixXi q(4, 4);
  q << 3, 1, 0, 0, 0, 4, 1, 0, 1, 0, 5, 0, 0, 0, 0, 2;
  table.push_back(q);
  q.setZero();
  q.diagonal() << 7, 7, 7, 7;
  table.push_back(q);
  q << 0, 2, 0, 1, 1, 3, 1, 0, 0, 0, 4, 0, 2, 0, 0, 1;
  table.push_back(q);

  double max_err = 0.0;
  for (const Eigen::MatrixXi& counts : table) {
    ConfusionMatrix cm{counts};
    EvaluationReport ev = evaluate(cm);
    if (counts.rows() == 2) {
      oracle::BinaryCounts bc = oracle::binary_counts(counts);
      double total = bc.tp + bc.fn + bc.fp + bc.tn;
      double sens = oracle::safe_div(bc.tp, bc.tp + bc.fn);
      double spec = oracle::safe_div(bc.tn, bc.tn + bc.fp);
      max_err = std::max(
          {max_err,
           std::abs(ev.accuracy - oracle::safe_div(bc.tp + bc.tn, total)),
           std::abs(ev.balanced_accuracy - 0.5 * (sens + spec)),
           std::abs(ev.recall - sens),
           std::abs(ev.precision - oracle::safe_div(bc.tp, bc.tp + bc.fp)),
           std::abs(ev.f1 - oracle::safe_div(
                                bc.tp, bc.tp + 0.5 * (bc.fp + bc.fn))),
           std::abs(ev.mcc - oracle::binary_mcc(bc))});
    } else {
      MultiRef ref = multi_reference(counts);
      max_err = std::max({max_err, std::abs(ev.accuracy - ref.accuracy),
                          std::abs(ev.balanced_accuracy - ref.balanced),
                          std::abs(ev.f1 - ref.f1),
                          std::abs(ev.precision - ref.precision),
                          std::abs(ev.recall - ref.recall),
                          std::abs(ev.mcc - oracle::gorodkin_mcc(counts))});
    }
  }

  // Every diagonal matrix has MCC exactly +1.
  Rng rng(808);
  double max_diag_err = 0.0;
  for (int it = 0; it < 50; ++it) {
    int G = 2 + static_cast<int>(rng.bounded(4));
    Eigen::MatrixXi d = Eigen::MatrixXi::Zero(G, G);
    for (int k = 0; k < G; ++k)
      d(k, k) = 1 + static_cast<int>(rng.bounded(20));
    max_diag_err =
        std::max(max_diag_err, std::abs(evaluate(ConfusionMatrix{d}).mcc - 1.0));
  }
  bool pass = max_err <= kTol && max_diag_err <= kTol;
  std::printf(
      "[%s] criterion 8: metric formulas on %zu matrices: max deviation "
      "from references %.2e (<= %.0e), max |MCC - 1| on diagonals %.2e\n",
      pass ? "PASS" : "FAIL", table.size(), max_err, kTol, max_diag_err);
  return pass;
}

// --------------------------------------------------------------------------
// 9. Determinism through the command line: a pipeline run repeated from its
//    manifest produces byte-identical CSV outputs, at 8 threads.
// --------------------------------------------------------------------------
std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(MFLDA_CLI_PATH) + " " + args + " > " +
                    log.string() + " 2>&1";
  return std::system(cmd.c_str()) == 0;
}

bool criterion9() {
  fs::path root = fs::temp_directory_path() / "mflda_accept9";
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);
  fs::path sim = root / "sim", run_a = root / "a", run_b = root / "b";
  fs::path log = root / "cli.log";

  bool ok = run_cli("simulate --output-dir " + sim.string() +
                        " --groups 15,15 --features 12 --times 16 --sigma 10"
                        " --seed 101 --threads 8",
                    log);
  ok = ok && run_cli("pipeline --input " + (sim / "data.csv").string() +
                         " --holdout-fraction 0.3 --output-dir " +
                         run_a.string() + " --seed 7 --threads 8",
                     log);
  ok = ok && run_cli("rerun --manifest " + (run_a / "manifest.json").string() +
                         " --output-dir " + run_b.string(),
                     log);

  int compared = 0, different = 0;
  if (ok) {
    for (const auto& entry : fs::directory_iterator(run_a)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      if (read_file(entry.path()) !=
          read_file(run_b / entry.path().filename()))
        ++different;
    }
  }
  bool pass = ok && compared >= 5 && different == 0;
  std::printf(
      "[%s] criterion 9: manifest rerun at 8 threads: %d CSV files "
      "compared, %d differ (CLI %s)\n",
      pass ? "PASS" : "FAIL", compared, different, ok ? "ok" : "FAILED");
  return pass;
}

// --------------------------------------------------------------------------
// 10. Signal at high noise: on a held-out split of a noisy 3-class problem,
//     the fitted model's combined metric must strictly beat a
//     majority-class baseline on at least 9 of 10 seeds.
// --------------------------------------------------------------------------
bool criterion10() {
  constexpr int kReps = 10;
  constexpr int kMinWins = 9;

  SimConfig cfg;
  cfg.group_sizes = {20, 18, 18};
  cfg.n_features = 20;
  cfg.n_times = 20;
  cfg.sigma = 300.0;
  cfg.scenario = Scenario::all_time;
  cfg.seed = 1000;

  int wins = 0;
  for (int r = 0; r < kReps; ++r) {
    SimConfig c = cfg;
    c.seed = cfg.seed + r;
    SimResult sim = generate(c);
    HoldoutSplit split = split_holdout(sim.data, 0.3, r);

    FitOptions opt;
    opt.mode = Mode::time_independent;
    opt.n_components = 2;
    opt.seed = r;
    FitReport fit = fit_pipeline(split.train, opt);
    ClassifyResult cr =
        classify_dataset(fit.model, split.test, VoteMode::overall);
    std::vector<int> truth, pred;
    for (std::size_t i = 0; i < cr.subjects.size(); ++i) {
      truth.push_back(split.test.labels[cr.subjects[i]]);
      pred.push_back(cr.preds[i].predicted);
    }
    double model_combined = combined_metric(evaluate(confusion(truth, pred, 3)));

    std::vector<int> tally(3, 0);
    for (int l : split.train.labels) ++tally[l];
    int majority = static_cast<int>(
        std::max_element(tally.begin(), tally.end()) - tally.begin());
    std::vector<int> baseline(truth.size(), majority);
    double base_combined =
        combined_metric(evaluate(confusion(truth, baseline, 3)));
    if (model_combined > base_combined) ++wins;
  }
  bool pass = wins >= kMinWins;
  std::printf(
      "[%s] criterion 10: noisy three-class holdout: combined metric beats "
      "the majority baseline on %d/%d seeds (>= %d)\n",
      pass ? "PASS" : "FAIL", wins, kReps, kMinWins);
  return pass;
}

int guarded(int k, bool (*fn)()) {
  int failed;
  try {
    failed = fn() ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("[FAIL] criterion %d: exception: %s\n", k, e.what());
    failed = 1;
  }
  std::fflush(stdout);
  return failed;
}

}  // namespace

int run_all_criteria() {
  set_threads(8);
  int failures = 0;
  failures += guarded(1, criterion1);
  failures += guarded(2, criterion2);
  failures += guarded(3, criterion3);
  failures += guarded(4, criterion4);
  failures += guarded(5, criterion5);
  failures += guarded(6, criterion6);
  failures += guarded(7, criterion7);
  failures += guarded(8, criterion8);
  failures += guarded(9, criterion9);
  failures += guarded(10, criterion10);
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
