#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mflda/io.hpp"
#include "mflda/metrics.hpp"
#include "mflda/parallel.hpp"
#include "mflda/pipeline.hpp"
#include "mflda/preprocess.hpp"
#include "mflda/scatter.hpp"
#include "mflda/simgen.hpp"
#include "mflda/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int log_level() {
  const char* env = std::getenv("MFLDA_LOG");
  if (env == nullptr) return 1;
  std::string v = env;
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void warn(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "warning: " << msg << '\n';
}

void warn_all(const std::vector<std::string>& msgs) {
  for (const std::string& m : msgs) warn(m);
}

void info(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "info: " << msg << '\n';
}

struct SimArgs {
  std::string output_dir = "mflda_out";
  std::string scenario = "all_time";
  std::string groups = "50,50";
  std::int64_t features = 60;
  std::int64_t times = 40;
  double sigma = 25.0;
  double delta_step = 500.0;
  double signal_fraction = 0.10;
  double rho = 0.0;
  double keep_rate = 1.0;
  bool disjoint_signals = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct FitArgs {
  std::string input;
  std::string test_input;
  std::string output_dir = "mflda_out";
  std::string mode = "time_dependent";
  std::string vote = "overall";
  double tau = -1.0;
  int components = 1;
  double selectivity = 0.70;
  double ridge = -1.0;
  int degree = 3;
  int interior_knots = 4;
  int min_timepoints = 8;
  int folds = 5;
  double target_sparsity = 0.10;
  double sparsity_band = 0.05;
  double holdout_fraction = 0.0;
  bool preprocess = false;
  double zero_threshold = 0.80;
  double pseudo_count = 1.0;
  double variance_quantile = 0.05;
  bool scatter_dump = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ClassifyArgs {
  std::string model;
  std::string input;
  std::string output_dir = "mflda_out";
  std::string vote = "overall";
  int threads = 1;
};

struct EvalArgs {
  std::string predictions;
  std::string output_dir = "mflda_out";
};

std::vector<mflda::Index> parse_groups(const std::string& s) {
  std::vector<mflda::Index> out;
  std::istringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(field, &pos);
    } catch (const std::exception&) {
      throw mflda::ConfigError("bad group size '" + field + "'");
    }
    if (pos != field.size() || v < 1)
      throw mflda::ConfigError("bad group size '" + field + "'");
    out.push_back(static_cast<mflda::Index>(v));
  }
  if (out.empty()) throw mflda::ConfigError("empty group list");
  return out;
}

void throw_all(std::vector<std::string>& errs) {
  if (errs.empty()) return;
  std::string joined;
  for (const std::string& e : errs)
    joined += (joined.empty() ? "" : "; ") + e;
  throw mflda::ConfigError(joined);
}

void check(std::vector<std::string>& errs, bool ok, const std::string& msg) {
  if (!ok) errs.push_back(msg);
}

void validate(const SimArgs& a) {
  std::vector<std::string> errs;
  try {
    parse_groups(a.groups);
  } catch (const mflda::Error& e) {
    errs.emplace_back(e.what());
  }
  try {
    mflda::scenario_from_string(a.scenario);
  } catch (const mflda::Error& e) {
    errs.emplace_back(e.what());
  }
  check(errs, a.features >= 1, "--features must be >= 1");
  check(errs, a.times >= 2, "--times must be >= 2");
  check(errs, a.sigma >= 0.0, "--sigma must be >= 0");
  check(errs, a.signal_fraction >= 0.0 && a.signal_fraction <= 1.0,
        "--signal-fraction must lie in [0, 1]");
  check(errs, a.rho >= 0.0, "--rho must be >= 0");
  check(errs, a.keep_rate > 0.0 && a.keep_rate <= 1.0,
        "--keep-rate must lie in (0, 1]");
  check(errs, a.threads >= 1, "--threads must be >= 1");
  throw_all(errs);
}

void validate(const FitArgs& a, bool need_tau, bool allow_test) {
  std::vector<std::string> errs;
  check(errs, !a.input.empty(), "--input is required");
  try {
    mflda::mode_from_string(a.mode);
  } catch (const mflda::Error& e) {
    errs.emplace_back(e.what());
  }
  check(errs, a.vote == "overall" || a.vote == "time_wise",
        "--vote must be overall or time_wise");
  check(errs, !need_tau || a.tau >= 0.0, "--tau must be >= 0");
  check(errs, a.components >= 1, "--components must be >= 1");
  check(errs, a.selectivity >= 0.0 && a.selectivity <= 1.0,
        "--selectivity must lie in [0, 1]");
  check(errs, a.degree >= 1, "--degree must be >= 1");
  check(errs, a.interior_knots >= 0, "--interior-knots must be >= 0");
  check(errs, a.min_timepoints >= 1, "--min-timepoints must be >= 1");
  check(errs, a.folds >= 2, "--folds must be >= 2");
  check(errs, a.target_sparsity > 0.0 && a.target_sparsity < 1.0,
        "--target-sparsity must lie in (0, 1)");
  check(errs, a.sparsity_band > 0.0, "--sparsity-band must be > 0");
  check(errs, a.holdout_fraction >= 0.0 && a.holdout_fraction < 1.0,
        "--holdout-fraction must lie in [0, 1)");
  check(errs, allow_test || (a.test_input.empty() && a.holdout_fraction == 0.0),
        "--test-input and --holdout-fraction only apply to pipeline");
  check(errs, a.test_input.empty() || a.holdout_fraction == 0.0,
        "--test-input and --holdout-fraction are mutually exclusive");
  check(errs, a.zero_threshold > 0.0 && a.zero_threshold <= 1.0,
        "--zero-threshold must lie in (0, 1]");
  check(errs, a.pseudo_count > 0.0, "--pseudo-count must be > 0");
  check(errs, a.variance_quantile >= 0.0 && a.variance_quantile <= 1.0,
        "--variance-quantile must lie in [0, 1]");
  check(errs, a.threads >= 1, "--threads must be >= 1");
  throw_all(errs);
}

void validate(const ClassifyArgs& a) {
  std::vector<std::string> errs;
  check(errs, !a.model.empty(), "--model is required");
  check(errs, !a.input.empty(), "--input is required");
  check(errs, a.vote == "overall" || a.vote == "time_wise",
        "--vote must be overall or time_wise");
  check(errs, a.threads >= 1, "--threads must be >= 1");
  throw_all(errs);
}

json to_json(const SimArgs& a) {
  return json{{"output_dir", a.output_dir},
              {"scenario", a.scenario},
              {"groups", a.groups},
              {"features", a.features},
              {"times", a.times},
              {"sigma", a.sigma},
              {"delta_step", a.delta_step},
              {"signal_fraction", a.signal_fraction},
              {"rho", a.rho},
              {"keep_rate", a.keep_rate},
              {"disjoint_signals", a.disjoint_signals},
              {"seed", a.seed},
              {"threads", a.threads}};
}

SimArgs sim_from_json(const json& j) {
  SimArgs a;
  a.output_dir = j.at("output_dir").get<std::string>();
  a.scenario = j.at("scenario").get<std::string>();
  a.groups = j.at("groups").get<std::string>();
  a.features = j.at("features").get<std::int64_t>();
  a.times = j.at("times").get<std::int64_t>();
  a.sigma = j.at("sigma").get<double>();
  a.delta_step = j.at("delta_step").get<double>();
  a.signal_fraction = j.at("signal_fraction").get<double>();
  a.rho = j.at("rho").get<double>();
  a.keep_rate = j.at("keep_rate").get<double>();
  a.disjoint_signals = j.at("disjoint_signals").get<bool>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.threads = j.at("threads").get<int>();
  return a;
}

json to_json(const FitArgs& a) {
  return json{{"input", a.input},
              {"test_input", a.test_input},
              {"output_dir", a.output_dir},
              {"mode", a.mode},
              {"vote", a.vote},
              {"tau", a.tau},
              {"components", a.components},
              {"selectivity", a.selectivity},
              {"ridge", a.ridge},
              {"degree", a.degree},
              {"interior_knots", a.interior_knots},
              {"min_timepoints", a.min_timepoints},
              {"folds", a.folds},
              {"target_sparsity", a.target_sparsity},
              {"sparsity_band", a.sparsity_band},
              {"holdout_fraction", a.holdout_fraction},
              {"preprocess", a.preprocess},
              {"zero_threshold", a.zero_threshold},
              {"pseudo_count", a.pseudo_count},
              {"variance_quantile", a.variance_quantile},
              {"scatter_dump", a.scatter_dump},
              {"seed", a.seed},
              {"threads", a.threads}};
}

FitArgs fit_from_json(const json& j) {
  FitArgs a;
  a.input = j.at("input").get<std::string>();
  a.test_input = j.at("test_input").get<std::string>();
  a.output_dir = j.at("output_dir").get<std::string>();
  a.mode = j.at("mode").get<std::string>();
  a.vote = j.at("vote").get<std::string>();
  a.tau = j.at("tau").get<double>();
  a.components = j.at("components").get<int>();
  a.selectivity = j.at("selectivity").get<double>();
  a.ridge = j.at("ridge").get<double>();
  a.degree = j.at("degree").get<int>();
  a.interior_knots = j.at("interior_knots").get<int>();
  a.min_timepoints = j.at("min_timepoints").get<int>();
  a.folds = j.at("folds").get<int>();
  a.target_sparsity = j.at("target_sparsity").get<double>();
  a.sparsity_band = j.at("sparsity_band").get<double>();
  a.holdout_fraction = j.at("holdout_fraction").get<double>();
  a.preprocess = j.at("preprocess").get<bool>();
  a.zero_threshold = j.at("zero_threshold").get<double>();
  a.pseudo_count = j.at("pseudo_count").get<double>();
  a.variance_quantile = j.at("variance_quantile").get<double>();
  a.scatter_dump = j.at("scatter_dump").get<bool>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.threads = j.at("threads").get<int>();
  return a;
}

json to_json(const ClassifyArgs& a) {
  return json{{"model", a.model},
              {"input", a.input},
              {"output_dir", a.output_dir},
              {"vote", a.vote},
              {"threads", a.threads}};
}

ClassifyArgs classify_from_json(const json& j) {
  ClassifyArgs a;
  a.model = j.at("model").get<std::string>();
  a.input = j.at("input").get<std::string>();
  a.output_dir = j.at("output_dir").get<std::string>();
  a.vote = j.at("vote").get<std::string>();
  a.threads = j.at("threads").get<int>();
  return a;
}

json to_json(const EvalArgs& a) {
  return json{{"predictions", a.predictions}, {"output_dir", a.output_dir}};
}

EvalArgs eval_from_json(const json& j) {
  EvalArgs a;
  a.predictions = j.at("predictions").get<std::string>();
  a.output_dir = j.at("output_dir").get<std::string>();
  return a;
}

void write_manifest(const std::string& dir, const std::string& command,
                    const json& options) {
  json m{{"format", "mflda-manifest"},
         {"version", 1},
         {"command", command},
         {"options", options}};
  std::string path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mflda::IoError("cannot open for writing: " + path);
  out << m.dump(2) << '\n';
  if (!out) throw mflda::IoError("write failed: " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw mflda::IoError("cannot create directory " + dir);
}

std::string out_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

void write_ks_csv(const std::string& path, const mflda::KsResult& ks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mflda::IoError("cannot open for writing: " + path);
  out << "statistic,p_value\n"
      << mflda::format_double(ks.statistic) << ','
      << mflda::format_double(ks.p_value) << '\n';
  if (!out) throw mflda::IoError("write failed: " + path);
}

void run_simulate(const SimArgs& a) {
  validate(a);
  mflda::set_threads(a.threads);
  ensure_dir(a.output_dir);

  mflda::SimConfig cfg;
  cfg.group_sizes = parse_groups(a.groups);
  cfg.n_features = a.features;
  cfg.n_times = a.times;
  cfg.sigma = a.sigma;
  cfg.delta_step = a.delta_step;
  cfg.signal_fraction = a.signal_fraction;
  cfg.scenario = mflda::scenario_from_string(a.scenario);
  cfg.rho = a.rho;
  cfg.seed = a.seed;
  cfg.keep_rate = a.keep_rate;
  cfg.disjoint_signals = a.disjoint_signals;

  mflda::SimResult r = mflda::generate(cfg);
  mflda::write_long_csv(out_path(a.output_dir, "data.csv"), r.data);
  mflda::write_truth_csv(out_path(a.output_dir, "truth.csv"), r.truth,
                         r.data.feature_names,
                         static_cast<int>(cfg.group_sizes.size()));
  write_manifest(a.output_dir, "simulate", to_json(a));
  info("wrote " + std::to_string(r.data.observations.size()) +
       " observations to " + a.output_dir);
}

// True labels of scored test subjects, remapped onto the model's class
// indexing by name; -1 where unlabeled.
std::vector<int> labels_for_model(const mflda::FitModel& model,
                                  const mflda::FunctionalDataSet& data,
                                  const std::vector<mflda::Index>& subjects) {
  std::vector<int> out(subjects.size(), -1);
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    int label = data.labels[subjects[i]];
    if (label < 0) continue;
    const std::string& name = data.class_names[label];
    auto it = std::find(model.class_names.begin(), model.class_names.end(),
                        name);
    if (it == model.class_names.end())
      throw mflda::DataError("class " + name + " is unknown to the model");
    out[i] = static_cast<int>(it - model.class_names.begin());
  }
  return out;
}

void write_eval_outputs(const std::string& dir, const std::vector<int>& truth,
                        const std::vector<mflda::Prediction>& preds,
                        const std::vector<std::string>& class_names) {
  std::vector<int> t, p;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i] < 0) continue;
    t.push_back(truth[i]);
    p.push_back(preds[i].predicted);
  }
  if (t.empty()) return;
  mflda::ConfusionMatrix cm =
      mflda::confusion(t, p, static_cast<int>(class_names.size()));
  mflda::write_confusion_csv(out_path(dir, "confusion.csv"), cm, class_names);
  mflda::write_metrics_csv(out_path(dir, "metrics.csv"), mflda::evaluate(cm));
}

void run_fit_family(const FitArgs& a, const std::string& command) {
  bool is_fit = command == "fit";
  bool is_pipeline = command == "pipeline";
  validate(a, /*need_tau=*/is_fit, /*allow_test=*/is_pipeline);
  mflda::set_threads(a.threads);
  ensure_dir(a.output_dir);

  mflda::FunctionalDataSet data =
      mflda::read_long_csv(a.input);
  if (a.preprocess) {
    mflda::PreprocessOptions popt;
    popt.zero_threshold = a.zero_threshold;
    popt.pseudo_count = a.pseudo_count;
    popt.variance_quantile = a.variance_quantile;
    mflda::PreprocessResult pre = mflda::preprocess_dataset(data, popt);
    info("preprocess kept " + std::to_string(pre.report.kept.size()) +
         " features (zero filter dropped " +
         std::to_string(pre.report.zero_dropped) + ", variance filter " +
         std::to_string(pre.report.variance_dropped) + ")");
    data = std::move(pre.data);
  }

  mflda::FunctionalDataSet test;
  bool have_test = false;
  if (is_pipeline && a.holdout_fraction > 0.0) {
    mflda::HoldoutSplit split =
        mflda::split_holdout(data, a.holdout_fraction, a.seed);
    data = std::move(split.train);
    test = std::move(split.test);
    have_test = true;
    mflda::write_long_csv(out_path(a.output_dir, "train.csv"), data);
    mflda::write_long_csv(out_path(a.output_dir, "test.csv"), test);
  } else if (is_pipeline && !a.test_input.empty()) {
    test = mflda::read_long_csv(a.test_input);
    have_test = true;
  }

  mflda::FitOptions fopt;
  fopt.mode = mflda::mode_from_string(a.mode);
  fopt.degree = a.degree;
  fopt.interior_knots = a.interior_knots;
  fopt.min_timepoints = a.min_timepoints;
  fopt.n_components = a.components;
  fopt.tau = is_fit ? a.tau : (command == "tune" ? -1.0 : a.tau);
  fopt.selectivity_threshold = a.selectivity;
  fopt.ridge = a.ridge;
  fopt.folds = a.folds;
  fopt.seed = a.seed;
  fopt.target_sparsity = a.target_sparsity;
  fopt.sparsity_band = a.sparsity_band;

  mflda::FitReport rep = mflda::fit_pipeline(data, fopt);
  warn_all(rep.warnings);
  info("tau = " + mflda::format_double(rep.model.tau) +
       (rep.tuned ? " (cross-validated)" : " (fixed)"));

  mflda::save_model(out_path(a.output_dir, "model.json"), rep.model);
  mflda::write_selected_csv(out_path(a.output_dir, "selected.csv"),
                            rep.model.feature_names, rep.model.profile);
  if (rep.tuned)
    mflda::write_tuning_csv(out_path(a.output_dir, "tuning.csv"), rep.tuning);
  if (rep.has_ks) write_ks_csv(out_path(a.output_dir, "ks.csv"), rep.ks);
  if (a.scatter_dump) {
    mflda::ScatterPair scatter = mflda::build_scatter_from_tensor(
        rep.train_tensor, fopt.mode, a.ridge);
    mflda::write_scatter_binary(out_path(a.output_dir, "scatter.bin"),
                                scatter);
  }

  mflda::VoteMode vote = a.vote == "overall" ? mflda::VoteMode::overall
                                             : mflda::VoteMode::time_wise;

  // Resubstitution scores and predictions for the training subjects.
  mflda::ScoreSet train_scores =
      mflda::project_scores(rep.train_tensor, rep.model.profile.gamma);
  std::vector<mflda::Prediction> train_preds =
      mflda::nearest_centroid(train_scores, rep.model.centroids, vote);
  std::vector<std::string> train_ids;
  for (mflda::Index s : rep.train_tensor.subjects)
    train_ids.push_back(data.subject_ids[s]);
  const char* pred_name =
      have_test ? "train_predictions.csv" : "predictions.csv";
  const char* score_name = have_test ? "train_scores.csv" : "scores.csv";
  mflda::write_predictions_csv(out_path(a.output_dir, pred_name), train_ids,
                               rep.train_tensor.labels, rep.model.class_names,
                               train_preds);
  mflda::write_scores_csv(out_path(a.output_dir, score_name), train_ids,
                          rep.model.grid, train_scores);
  if (!have_test)
    write_eval_outputs(a.output_dir, rep.train_tensor.labels, train_preds,
                       rep.model.class_names);

  if (have_test) {
    mflda::ClassifyResult cr = mflda::classify_dataset(rep.model, test, vote);
    warn_all(cr.warnings);
    std::vector<std::string> test_ids;
    for (mflda::Index s : cr.subjects) test_ids.push_back(test.subject_ids[s]);
    std::vector<int> truth = labels_for_model(rep.model, test, cr.subjects);
    mflda::write_predictions_csv(out_path(a.output_dir, "predictions.csv"),
                                 test_ids, truth, rep.model.class_names,
                                 cr.preds);
    mflda::write_scores_csv(out_path(a.output_dir, "scores.csv"), test_ids,
                            rep.model.grid, cr.scores);
    write_eval_outputs(a.output_dir, truth, cr.preds, rep.model.class_names);
  }

  write_manifest(a.output_dir, command, to_json(a));
}

void run_classify(const ClassifyArgs& a) {
  validate(a);
  mflda::set_threads(a.threads);
  ensure_dir(a.output_dir);

  mflda::FitModel model = mflda::load_model(a.model);
  mflda::FunctionalDataSet data = mflda::read_long_csv(a.input);
  mflda::VoteMode vote = a.vote == "overall" ? mflda::VoteMode::overall
                                             : mflda::VoteMode::time_wise;
  mflda::ClassifyResult cr = mflda::classify_dataset(model, data, vote);
  warn_all(cr.warnings);

  std::vector<std::string> ids;
  for (mflda::Index s : cr.subjects) ids.push_back(data.subject_ids[s]);
  std::vector<int> truth = labels_for_model(model, data, cr.subjects);
  mflda::write_predictions_csv(out_path(a.output_dir, "predictions.csv"), ids,
                               truth, model.class_names, cr.preds);
  mflda::write_scores_csv(out_path(a.output_dir, "scores.csv"), ids,
                          model.grid, cr.scores);
  write_eval_outputs(a.output_dir, truth, cr.preds, model.class_names);
  write_manifest(a.output_dir, "classify", to_json(a));
}

void run_evaluate(const EvalArgs& a) {
  std::vector<std::string> errs;
  check(errs, !a.predictions.empty(), "--predictions is required");
  throw_all(errs);
  ensure_dir(a.output_dir);

  std::ifstream in(a.predictions, std::ios::binary);
  if (!in) throw mflda::IoError("cannot open for reading: " + a.predictions);
  std::string line;
  if (!std::getline(in, line))
    throw mflda::IoError("empty file: " + a.predictions);
  std::vector<std::pair<std::string, std::string>> rows;  // (true, predicted)
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, pred, truth;
    if (!std::getline(ss, id, ',') || !std::getline(ss, pred, ',') ||
        !std::getline(ss, truth, ','))
      throw mflda::IoError(a.predictions + ": short row");
    if (truth.empty()) {
      ++skipped;
      continue;
    }
    rows.emplace_back(truth, pred);
  }
  if (skipped > 0)
    warn("skipped " + std::to_string(skipped) + " rows without a true class");
  if (rows.empty()) throw mflda::DataError("no labeled rows to evaluate");

  std::vector<std::string> names;
  for (const auto& [t, p] : rows) {
    names.push_back(t);
    names.push_back(p);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto index_of = [&](const std::string& s) {
    return static_cast<int>(std::lower_bound(names.begin(), names.end(), s) -
                            names.begin());
  };
  std::vector<int> t, p;
  for (const auto& [tn, pn] : rows) {
    t.push_back(index_of(tn));
    p.push_back(index_of(pn));
  }
  mflda::ConfusionMatrix cm =
      mflda::confusion(t, p, static_cast<int>(names.size()));
  mflda::write_confusion_csv(out_path(a.output_dir, "confusion.csv"), cm,
                             names);
  mflda::write_metrics_csv(out_path(a.output_dir, "metrics.csv"),
                           mflda::evaluate(cm));
  write_manifest(a.output_dir, "evaluate", to_json(a));
}

void run_manifest(const std::string& path, const std::string& override_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mflda::IoError("cannot open for reading: " + path);
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw mflda::IoError("cannot parse manifest " + path + ": " + e.what());
  }
  try {
    if (m.at("format").get<std::string>() != "mflda-manifest")
      throw mflda::IoError("not a manifest: " + path);
    std::string command = m.at("command").get<std::string>();
    const json& options = m.at("options");
    if (command == "simulate") {
      SimArgs a = sim_from_json(options);
      if (!override_dir.empty()) a.output_dir = override_dir;
      run_simulate(a);
    } else if (command == "fit" || command == "tune" ||
               command == "pipeline") {
      FitArgs a = fit_from_json(options);
      if (!override_dir.empty()) a.output_dir = override_dir;
      run_fit_family(a, command);
    } else if (command == "classify") {
      ClassifyArgs a = classify_from_json(options);
      if (!override_dir.empty()) a.output_dir = override_dir;
      run_classify(a);
    } else if (command == "evaluate") {
      EvalArgs a = eval_from_json(options);
      if (!override_dir.empty()) a.output_dir = override_dir;
      run_evaluate(a);
    } else {
      throw mflda::ConfigError("unknown manifest command: " + command);
    }
  } catch (const json::exception& e) {
    throw mflda::IoError("malformed manifest " + path + ": " + e.what());
  }
}

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--output-dir", a.output_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--scenario", a.scenario,
                  "all_time, window_5_15, random_window_len10, "
                  "random_window_random_len or window_5_15_with_ste")
      ->capture_default_str();
  cmd->add_option("--groups", a.groups, "Comma-separated group sizes")
      ->capture_default_str();
  cmd->add_option("--features", a.features, "Number of features")
      ->capture_default_str();
  cmd->add_option("--times", a.times, "Number of time points")
      ->capture_default_str();
  cmd->add_option("--sigma", a.sigma, "Noise standard deviation")
      ->capture_default_str();
  cmd->add_option("--delta-step", a.delta_step, "Group mean shift step")
      ->capture_default_str();
  cmd->add_option("--signal-fraction", a.signal_fraction,
                  "Fraction of discriminatory features")
      ->capture_default_str();
  cmd->add_option("--rho", a.rho, "Trajectory effect scale")
      ->capture_default_str();
  cmd->add_option("--keep-rate", a.keep_rate,
                  "Probability of keeping each (subject, time) sample")
      ->capture_default_str();
  cmd->add_flag("--disjoint-signals", a.disjoint_signals,
                "Two disjoint signal blocks (three groups)");
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads")
      ->capture_default_str();
  cmd->set_config("--config", "",
                  "key=value configuration file; command-line flags win");
}

void add_fit_options(CLI::App* cmd, FitArgs& a, bool with_tau,
                     bool with_test, bool with_tuning) {
  cmd->add_option("--input", a.input, "Long-format CSV of observations");
  if (with_test) {
    cmd->add_option("--test-input", a.test_input,
                    "Long-format CSV scored with the fitted model");
    cmd->add_option("--holdout-fraction", a.holdout_fraction,
                    "Stratified holdout fraction taken from --input")
        ->capture_default_str();
  }
  cmd->add_option("--output-dir", a.output_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--mode", a.mode, "time_dependent or time_independent")
      ->capture_default_str();
  cmd->add_option("--vote", a.vote, "overall or time_wise")
      ->capture_default_str();
  if (with_tau)
    cmd->add_option("--tau", a.tau,
                    "Sparsity budget; pipeline tunes it when omitted");
  cmd->add_option("--components", a.components, "Discriminant components")
      ->capture_default_str();
  cmd->add_option("--selectivity", a.selectivity,
                  "Selectivity threshold for feature selection")
      ->capture_default_str();
  cmd->add_option("--ridge", a.ridge,
                  "Within-scatter ridge; negative chooses the default")
      ->capture_default_str();
  cmd->add_option("--degree", a.degree, "Spline degree")
      ->capture_default_str();
  cmd->add_option("--interior-knots", a.interior_knots,
                  "Interior knots of the spline basis")
      ->capture_default_str();
  cmd->add_option("--min-timepoints", a.min_timepoints,
                  "Minimum distinct time points per subject")
      ->capture_default_str();
  if (with_tuning) {
    cmd->add_option("--folds", a.folds, "Cross-validation folds")
        ->capture_default_str();
    cmd->add_option("--target-sparsity", a.target_sparsity,
                    "Target selected fraction for the tau range search")
        ->capture_default_str();
    cmd->add_option("--sparsity-band", a.sparsity_band,
                    "Acceptable deviation around the target")
        ->capture_default_str();
  }
  cmd->add_flag("--preprocess", a.preprocess,
                "Zero filter, clr transform and variance filter first");
  cmd->add_option("--zero-threshold", a.zero_threshold,
                  "Zero-fraction cutoff of the zero filter")
      ->capture_default_str();
  cmd->add_option("--pseudo-count", a.pseudo_count, "clr pseudo-count")
      ->capture_default_str();
  cmd->add_option("--variance-quantile", a.variance_quantile,
                  "Variance filter quantile")
      ->capture_default_str();
  cmd->add_flag("--scatter-dump", a.scatter_dump,
                "Write the scatter operators to scatter.bin");
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads")
      ->capture_default_str();
  cmd->set_config("--config", "",
                  "key=value configuration file; command-line flags win");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multivariate functional linear discriminant analysis"};
  app.require_subcommand(1);

  SimArgs sim_args;
  FitArgs fit_args, tune_args, pipe_args;
  ClassifyArgs classify_args;
  EvalArgs eval_args;
  std::string manifest_path, manifest_dir;

  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a synthetic longitudinal dataset");
  add_sim_options(sim, sim_args);

  CLI::App* fit = app.add_subcommand(
      "fit", "Fit sparse functional discriminants at a fixed tau");
  add_fit_options(fit, fit_args, /*with_tau=*/true, /*with_test=*/false,
                  /*with_tuning=*/false);

  CLI::App* tune = app.add_subcommand(
      "tune", "Choose tau by stratified cross-validation, then fit");
  add_fit_options(tune, tune_args, /*with_tau=*/false, /*with_test=*/false,
                  /*with_tuning=*/true);

  CLI::App* pipe = app.add_subcommand(
      "pipeline", "Fit (tuning tau unless given) and score a test set");
  add_fit_options(pipe, pipe_args, /*with_tau=*/true, /*with_test=*/true,
                  /*with_tuning=*/true);

  CLI::App* cls = app.add_subcommand("classify",
                                     "Score subjects with a saved model");
  cls->add_option("--model", classify_args.model, "model.json from a fit");
  cls->add_option("--input", classify_args.input,
                  "Long-format CSV of observations");
  cls->add_option("--output-dir", classify_args.output_dir,
                  "Output directory")
      ->capture_default_str();
  cls->add_option("--vote", classify_args.vote, "overall or time_wise")
      ->capture_default_str();
  cls->add_option("--threads", classify_args.threads, "Worker threads")
      ->capture_default_str();
  cls->set_config("--config", "",
                  "key=value configuration file; command-line flags win");

  CLI::App* eval = app.add_subcommand(
      "evaluate", "Classification metrics from a predictions file");
  eval->add_option("--predictions", eval_args.predictions,
                   "predictions.csv with a true column");
  eval->add_option("--output-dir", eval_args.output_dir, "Output directory")
      ->capture_default_str();

  CLI::App* rerun = app.add_subcommand(
      "rerun", "Repeat a run exactly from its manifest.json");
  rerun->add_option("--manifest", manifest_path, "manifest.json of the run");
  rerun->add_option("--output-dir", manifest_dir,
                    "Override the stored output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (sim->parsed()) run_simulate(sim_args);
    if (fit->parsed()) run_fit_family(fit_args, "fit");
    if (tune->parsed()) run_fit_family(tune_args, "tune");
    if (pipe->parsed()) run_fit_family(pipe_args, "pipeline");
    if (cls->parsed()) run_classify(classify_args);
    if (eval->parsed()) run_evaluate(eval_args);
    if (rerun->parsed()) {
      if (manifest_path.empty())
        throw mflda::ConfigError("--manifest is required");
      run_manifest(manifest_path, manifest_dir);
    }
  } catch (const mflda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
