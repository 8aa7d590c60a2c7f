#include "mflda/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "mflda/rng.hpp"
#include "mflda/scatter.hpp"

namespace mflda {

namespace {

using nlohmann::json;

CurveTensor labeled_rows(const CurveTensor& tensor,
                         std::vector<std::string>& warnings) {
  Index n_labeled = 0;
  for (int label : tensor.labels)
    if (label >= 0) ++n_labeled;
  if (n_labeled == tensor.values.rows()) return tensor;

  std::ostringstream msg;
  msg << "dropped " << tensor.values.rows() - n_labeled
      << " unlabeled subjects from training";
  warnings.push_back(msg.str());

  CurveTensor out;
  out.n_features = tensor.n_features;
  out.grid = tensor.grid;
  out.values.resize(n_labeled, tensor.values.cols());
  Index r = 0;
  for (Index i = 0; i < tensor.values.rows(); ++i) {
    if (tensor.labels[i] < 0) continue;
    out.values.row(r) = tensor.values.row(i);
    out.labels.push_back(tensor.labels[i]);
    out.subjects.push_back(tensor.subjects[i]);
    ++r;
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<Index>(), j.at("cols").get<Index>());
  const json& data = j.at("data");
  if (static_cast<Index>(data.size()) != m.size())
    throw IoError("model file: matrix payload size mismatch");
  Index k = 0;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++].get<double>();
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

FitReport fit_pipeline(const FunctionalDataSet& train, const FitOptions& opt) {
  auto [t_lo, t_hi] = check_dataset(train);
  if (train.class_names.empty())
    throw DataError("training data carries no class labels");
  if (opt.folds < 2) throw ConfigError("cross-validation needs folds >= 2");

  FitReport report;
  SplineBasis basis = make_basis(t_lo, t_hi, opt.degree, opt.interior_knots);
  SmoothingResult sm = smooth_dataset(train, basis, opt.min_timepoints);
  report.warnings = sm.warnings;
  if (!sm.excluded.empty()) {
    std::ostringstream msg;
    msg << "excluded " << sm.excluded.size()
        << " subjects with too few distinct time points";
    report.warnings.push_back(msg.str());
  }

  Vector grid = default_grid(basis.t_min, basis.t_max);
  CurveTensor tensor = evaluate_on_grid(sm.model, grid);
  tensor = labeled_rows(tensor, report.warnings);
  if (tensor.values.rows() < 2)
    throw DataError("fewer than two labeled subjects survived smoothing");

  Standardizer standardizer = fit_standardizer(tensor);
  standardizer.apply(tensor);

  SparseOptions sopt;
  sopt.mode = opt.mode;
  sopt.n_components = opt.n_components;
  sopt.selectivity_threshold = opt.selectivity_threshold;
  sopt.ridge = opt.ridge;
  sopt.max_dense_dim = opt.max_dense_dim;

  double tau = opt.tau;
  if (tau < 0.0) {
    RangeSearchOptions ropt;
    ropt.target_sparsity = opt.target_sparsity;
    ropt.band = opt.sparsity_band;
    report.range = find_tau_range(tensor, sopt, ropt);
    CvConfig cv;
    cv.folds = opt.folds;
    cv.seed = opt.seed;
    report.tuning = cross_validate(tensor, report.range.grid, sopt, cv);
    tau = report.tuning.tau_star;
    report.tuned = true;
  }
  sopt.tau = tau;

  FitModel& model = report.model;
  model.mode = opt.mode;
  model.tau = tau;
  model.ridge = resolve_ridge(tensor, n_classes_of(tensor.labels), opt.ridge);
  model.n_components = opt.n_components;
  model.selectivity_threshold = opt.selectivity_threshold;
  model.min_timepoints = opt.min_timepoints;
  model.basis = basis;
  model.grid = grid;
  model.feature_names = train.feature_names;
  model.class_names = train.class_names;
  model.standardizer = standardizer;
  model.profile = sparse_discriminants(tensor, sopt);

  ScoreSet scores = project_scores(tensor, model.profile.gamma);
  int G = static_cast<int>(train.class_names.size());
  model.centroids = score_centroids(scores, tensor.labels, G);

  if (G == 2) {
    std::vector<double> a, b;
    const Matrix& s0 = scores.per_component.front();
    for (Index i = 0; i < s0.rows(); ++i)
      for (Index t = 0; t < s0.cols(); ++t)
        (tensor.labels[i] == 0 ? a : b).push_back(s0(i, t));
    if (a.size() >= 2 && b.size() >= 2) {
      report.ks = ks_separation(std::move(a), std::move(b));
      report.has_ks = true;
    }
  }
  report.train_tensor = std::move(tensor);
  return report;
}

ClassifyResult classify_dataset(const FitModel& model,
                                const FunctionalDataSet& data, VoteMode vote) {
  check_dataset(data);
  ClassifyResult out;

  // Remap features by name onto the training order.
  std::map<std::string, Index> model_index;
  for (std::size_t j = 0; j < model.feature_names.size(); ++j)
    model_index[model.feature_names[j]] = static_cast<Index>(j);
  std::vector<Index> remap(data.feature_names.size(), -1);
  Index dropped_features = 0;
  for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
    auto it = model_index.find(data.feature_names[j]);
    if (it == model_index.end())
      ++dropped_features;
    else
      remap[j] = it->second;
  }
  std::vector<bool> seen(model.feature_names.size(), false);
  for (Index j : remap)
    if (j >= 0) seen[j] = true;
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (!seen[j])
      throw DataError("input lacks training feature " + model.feature_names[j]);
  if (dropped_features > 0) {
    std::ostringstream msg;
    msg << "ignored " << dropped_features << " features unknown to the model";
    out.warnings.push_back(msg.str());
  }

  FunctionalDataSet mapped;
  mapped.subject_ids = data.subject_ids;
  mapped.labels = data.labels;
  mapped.class_names = data.class_names;
  mapped.feature_names = model.feature_names;
  Index dropped_times = 0;
  for (const Observation& obs : data.observations) {
    if (remap[obs.feature] < 0) continue;
    if (obs.time < model.basis.t_min || obs.time > model.basis.t_max) {
      ++dropped_times;
      continue;
    }
    Observation o = obs;
    o.feature = remap[obs.feature];
    mapped.observations.push_back(o);
  }
  if (dropped_times > 0) {
    std::ostringstream msg;
    msg << "dropped " << dropped_times
        << " observations outside the model time domain";
    out.warnings.push_back(msg.str());
  }
  if (mapped.observations.empty())
    throw DataError("no observations usable by the model");

  SmoothingResult sm =
      smooth_dataset(mapped, model.basis, model.min_timepoints);
  for (const std::string& w : sm.warnings) out.warnings.push_back(w);
  if (!sm.excluded.empty()) {
    std::ostringstream msg;
    msg << "excluded " << sm.excluded.size()
        << " subjects with too few distinct time points";
    out.warnings.push_back(msg.str());
  }
  if (sm.model.coef.empty()) throw DataError("no subjects could be scored");

  CurveTensor tensor = evaluate_on_grid(sm.model, model.grid);
  model.standardizer.apply(tensor);
  out.scores = project_scores(tensor, model.profile.gamma);
  out.preds = nearest_centroid(out.scores, model.centroids, vote);
  out.subjects = tensor.subjects;
  return out;
}

void save_model(const std::string& path, const FitModel& model) {
  json j;
  j["format"] = "mflda-model";
  j["version"] = 1;
  j["mode"] = to_string(model.mode);
  j["tau"] = model.tau;
  j["ridge"] = model.ridge;
  j["n_components"] = model.n_components;
  j["selectivity_threshold"] = model.selectivity_threshold;
  j["min_timepoints"] = model.min_timepoints;
  j["basis"] = {{"degree", model.basis.degree},
                {"t_min", model.basis.t_min},
                {"t_max", model.basis.t_max},
                {"knots", vector_to_json(model.basis.knots)}};
  j["grid"] = vector_to_json(model.grid);
  j["feature_names"] = model.feature_names;
  j["class_names"] = model.class_names;
  json zs = json::array();
  for (const auto& [a, b] : model.standardizer.zero_spread)
    zs.push_back(json::array({a, b}));
  j["standardizer"] = {{"mean", matrix_to_json(model.standardizer.mean)},
                       {"sd", matrix_to_json(model.standardizer.sd)},
                       {"zero_spread", zs}};
  json gamma = json::array(), beta = json::array(), lambda = json::array();
  for (const Matrix& g : model.profile.gamma) gamma.push_back(matrix_to_json(g));
  for (const Matrix& b : model.profile.beta) beta.push_back(matrix_to_json(b));
  for (const Vector& l : model.profile.lambda) lambda.push_back(vector_to_json(l));
  j["profile"] = {{"gamma", gamma},
                  {"beta", beta},
                  {"lambda", lambda},
                  {"selectivity", vector_to_json(model.profile.selectivity)},
                  {"selected", model.profile.selected},
                  {"sup_norm", model.profile.sup_norm}};
  json centroids = json::array();
  for (const Matrix& c : model.centroids) centroids.push_back(matrix_to_json(c));
  j["centroids"] = centroids;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

FitModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "mflda-model")
      throw IoError("not a model file: " + path);
    FitModel model;
    model.mode = mode_from_string(j.at("mode").get<std::string>());
    model.tau = j.at("tau").get<double>();
    model.ridge = j.at("ridge").get<double>();
    model.n_components = j.at("n_components").get<int>();
    model.selectivity_threshold = j.at("selectivity_threshold").get<double>();
    model.min_timepoints = j.at("min_timepoints").get<int>();
    const json& basis = j.at("basis");
    model.basis.degree = basis.at("degree").get<int>();
    model.basis.t_min = basis.at("t_min").get<double>();
    model.basis.t_max = basis.at("t_max").get<double>();
    model.basis.knots = vector_from_json(basis.at("knots"));
    model.grid = vector_from_json(j.at("grid"));
    model.feature_names =
        j.at("feature_names").get<std::vector<std::string>>();
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    const json& st = j.at("standardizer");
    model.standardizer.mean = matrix_from_json(st.at("mean"));
    model.standardizer.sd = matrix_from_json(st.at("sd"));
    for (const json& pair : st.at("zero_spread"))
      model.standardizer.zero_spread.emplace_back(pair.at(0).get<Index>(),
                                                  pair.at(1).get<Index>());
    const json& profile = j.at("profile");
    for (const json& g : profile.at("gamma"))
      model.profile.gamma.push_back(matrix_from_json(g));
    for (const json& b : profile.at("beta"))
      model.profile.beta.push_back(matrix_from_json(b));
    for (const json& l : profile.at("lambda"))
      model.profile.lambda.push_back(vector_from_json(l));
    model.profile.selectivity = vector_from_json(profile.at("selectivity"));
    model.profile.selected = profile.at("selected").get<std::vector<Index>>();
    model.profile.sup_norm = profile.at("sup_norm").get<double>();
    for (const json& c : j.at("centroids"))
      model.centroids.push_back(matrix_from_json(c));
    return model;
  } catch (const json::exception& e) {
    throw IoError("malformed model file " + path + ": " + e.what());
  }
}

namespace {

FunctionalDataSet subset_dataset(const FunctionalDataSet& data,
                                 const std::vector<bool>& take) {
  FunctionalDataSet out;
  out.feature_names = data.feature_names;
  out.class_names = data.class_names;
  std::vector<Index> new_index(data.subject_ids.size(), -1);
  for (std::size_t i = 0; i < data.subject_ids.size(); ++i) {
    if (!take[i]) continue;
    new_index[i] = static_cast<Index>(out.subject_ids.size());
    out.subject_ids.push_back(data.subject_ids[i]);
    out.labels.push_back(data.labels[i]);
  }
  for (const Observation& obs : data.observations) {
    if (new_index[obs.subject] < 0) continue;
    Observation o = obs;
    o.subject = new_index[obs.subject];
    out.observations.push_back(o);
  }
  validate_dataset(out);
  return out;
}

}  // namespace

HoldoutSplit split_holdout(const FunctionalDataSet& data, double fraction,
                           std::uint64_t seed) {
  check_dataset(data);
  if (fraction <= 0.0 || fraction >= 1.0)
    throw ConfigError("holdout fraction must lie in (0, 1)");
  int G = static_cast<int>(data.class_names.size());
  if (G < 2) throw DataError("holdout split needs labeled data");
  for (int label : data.labels)
    if (label < 0) throw DataError("holdout split needs every subject labeled");

  std::vector<std::vector<Index>> by_class(G);
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    by_class[data.labels[i]].push_back(static_cast<Index>(i));

  std::vector<bool> test(data.subject_ids.size(), false);
  for (int g = 0; g < G; ++g) {
    auto& members = by_class[g];
    if (members.empty()) continue;
    Rng rng(mix_seed(seed, 0x801d0u, static_cast<std::uint64_t>(g)));
    rng.shuffle(members);
    auto want = static_cast<std::size_t>(std::lround(
        fraction * static_cast<double>(members.size())));
    want = std::min(want, members.size() - 1);
    for (std::size_t k = 0; k < want; ++k) test[members[k]] = true;
  }

  HoldoutSplit split;
  std::vector<bool> train_take(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) train_take[i] = !test[i];
  split.train = subset_dataset(data, train_take);
  split.test = subset_dataset(data, test);
  return split;
}

}  // namespace mflda
