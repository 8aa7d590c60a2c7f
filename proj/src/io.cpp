#include "mflda/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace mflda {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  // ERANGE with HUGE_VAL is overflow; ERANGE on a tiny result is gradual
  // underflow to a denormal, which is a representable value we keep.
  bool overflow = errno == ERANGE && std::abs(v) == HUGE_VAL;
  if (end == s.c_str() || *end != '\0' || overflow)
    throw IoError("cannot parse " + what + " from '" + s + "'");
  return v;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

FunctionalDataSet read_long_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  strip_cr(line);
  std::vector<std::string> header = split_csv(line);
  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1
                              : static_cast<int>(it - header.begin());
  };
  int c_subject = column("subject_id");
  int c_time = column("time");
  int c_feature = column("feature");
  int c_value = column("value");
  int c_class = column("class");
  if (c_subject < 0 || c_time < 0 || c_feature < 0 || c_value < 0)
    throw IoError(path + ": header must contain subject_id,time,feature,value");

  FunctionalDataSet data;
  std::map<std::string, Index> subject_of;
  std::map<std::string, Index> feature_of;
  std::map<std::string, int> class_of;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv(line);
    if (static_cast<int>(f.size()) <= std::max({c_subject, c_time, c_feature,
                                                c_value}))
      throw IoError(path + ":" + std::to_string(lineno) + ": short row");

    Observation obs;
    auto [sit, new_subject] =
        subject_of.emplace(f[c_subject], static_cast<Index>(subject_of.size()));
    obs.subject = sit->second;
    if (new_subject) {
      data.subject_ids.push_back(f[c_subject]);
      data.labels.push_back(-1);
    }
    auto [fit, new_feature] =
        feature_of.emplace(f[c_feature], static_cast<Index>(feature_of.size()));
    obs.feature = fit->second;
    if (new_feature) data.feature_names.push_back(f[c_feature]);
    obs.time = parse_double(f[c_time], "time");
    obs.value = parse_double(f[c_value], "value");
    data.observations.push_back(obs);

    if (c_class >= 0 && static_cast<int>(f.size()) > c_class &&
        !f[c_class].empty()) {
      auto [cit, new_class] =
          class_of.emplace(f[c_class], static_cast<int>(class_of.size()));
      if (new_class) data.class_names.push_back(f[c_class]);
      int& label = data.labels[obs.subject];
      if (label >= 0 && label != cit->second)
        throw DataError(path + ": subject " + f[c_subject] +
                        " appears with two classes");
      label = cit->second;
    }
  }
  if (data.observations.empty()) throw DataError(path + ": no observations");
  validate_dataset(data);
  return data;
}

void write_long_csv(const std::string& path, const FunctionalDataSet& data) {
  std::ofstream out = open_out(path);
  out << "subject_id,time,feature,value,class\n";
  for (const Observation& obs : data.observations) {
    int label = data.labels[obs.subject];
    out << data.subject_ids[obs.subject] << ',' << format_double(obs.time)
        << ',' << data.feature_names[obs.feature] << ','
        << format_double(obs.value) << ','
        << (label >= 0 ? data.class_names[label] : std::string()) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_truth_csv(const std::string& path, const GroundTruth& truth,
                     const std::vector<std::string>& feature_names,
                     int n_groups) {
  std::ofstream out = open_out(path);
  out << "feature,signal,window_lo,window_hi";
  for (int g = 0; g < n_groups; ++g) out << ",lambda_" << (g + 1);
  out << '\n';
  for (std::size_t j = 0; j < truth.features.size(); ++j) {
    const FeatureTruth& ft = truth.features[j];
    out << feature_names[j] << ',' << (ft.signal ? 1 : 0) << ','
        << ft.window_lo << ',' << ft.window_hi;
    for (int g = 0; g < n_groups; ++g)
      out << ',' << format_double(g < static_cast<int>(ft.lambda.size())
                                      ? ft.lambda[g]
                                      : 0.0);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_predictions_csv(const std::string& path,
                           const std::vector<std::string>& subject_ids,
                           const std::vector<int>& labels,
                           const std::vector<std::string>& class_names,
                           const std::vector<Prediction>& preds) {
  if (subject_ids.size() != preds.size() || labels.size() != preds.size())
    throw ConfigError("predictions, ids and labels must align");
  std::ofstream out = open_out(path);
  out << "subject_id,predicted,true,margin\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << subject_ids[i] << ',' << class_names[preds[i].predicted] << ','
        << (labels[i] >= 0 ? class_names[labels[i]] : std::string()) << ','
        << format_double(preds[i].margin) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_scores_csv(const std::string& path,
                      const std::vector<std::string>& subject_ids,
                      const Vector& grid, const ScoreSet& scores) {
  std::ofstream out = open_out(path);
  out << "subject_id,component,time,score\n";
  for (std::size_t i = 0; i < subject_ids.size(); ++i)
    for (std::size_t c = 0; c < scores.per_component.size(); ++c)
      for (Index t = 0; t < grid.size(); ++t)
        out << subject_ids[i] << ',' << (c + 1) << ','
            << format_double(grid[t]) << ','
            << format_double(scores.per_component[c](static_cast<Index>(i), t))
            << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_selected_csv(const std::string& path,
                        const std::vector<std::string>& feature_names,
                        const SelectionProfile& profile) {
  std::ofstream out = open_out(path);
  out << "feature,selectivity,mean_abs_coef,selected\n";
  Index p = profile.selectivity.size();
  std::vector<Index> order(p);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return profile.selectivity[a] > profile.selectivity[b];
  });
  std::vector<bool> is_selected(p, false);
  for (Index j : profile.selected) is_selected[j] = true;
  const Matrix& gamma = profile.gamma.front();
  for (Index j : order)
    out << feature_names[j] << ',' << format_double(profile.selectivity[j])
        << ',' << format_double(gamma.row(j).cwiseAbs().mean()) << ','
        << (is_selected[j] ? 1 : 0) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_tuning_csv(const std::string& path, const TuneResult& result) {
  std::ofstream out = open_out(path);
  out << "tau,fold,accuracy,balanced_accuracy,f1,precision,recall,mcc,"
         "combined\n";
  for (const FoldRow& row : result.trace)
    out << format_double(row.tau) << ',' << row.fold << ','
        << format_double(row.report.accuracy) << ','
        << format_double(row.report.balanced_accuracy) << ','
        << format_double(row.report.f1) << ','
        << format_double(row.report.precision) << ','
        << format_double(row.report.recall) << ','
        << format_double(row.report.mcc) << ','
        << format_double(row.combined) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_metrics_csv(const std::string& path,
                       const EvaluationReport& report) {
  std::ofstream out = open_out(path);
  out << "metric,value\n";
  out << "accuracy," << format_double(report.accuracy) << '\n';
  out << "balanced_accuracy," << format_double(report.balanced_accuracy)
      << '\n';
  out << "f1," << format_double(report.f1) << '\n';
  out << "precision," << format_double(report.precision) << '\n';
  out << "recall," << format_double(report.recall) << '\n';
  out << "mcc," << format_double(report.mcc) << '\n';
  out << "combined," << format_double(combined_metric(report)) << '\n';
  std::string flagged;
  for (const std::string& name : report.undefined)
    flagged += (flagged.empty() ? "" : ";") + name;
  out << "undefined," << flagged << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& class_names) {
  std::ofstream out = open_out(path);
  out << "true_class";
  for (const std::string& name : class_names) out << ",pred_" << name;
  out << '\n';
  for (Index r = 0; r < cm.counts.rows(); ++r) {
    out << class_names[r];
    for (Index c = 0; c < cm.counts.cols(); ++c) out << ',' << cm.counts(r, c);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

constexpr char kScatterMagic[4] = {'M', 'F', 'S', 'C'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw IoError("truncated scatter file: " + path);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_blocks(std::ofstream& out, const std::vector<Matrix>& blocks) {
  for (const Matrix& block : blocks)
    for (Index r = 0; r < block.rows(); ++r)
      for (Index c = 0; c < block.cols(); ++c) {
        double v = block(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
}

void get_blocks(std::ifstream& in, std::vector<Matrix>& blocks, Index n_blocks,
                Index dim, const std::string& path) {
  blocks.assign(n_blocks, Matrix(dim, dim));
  for (Matrix& block : blocks)
    for (Index r = 0; r < dim; ++r)
      for (Index c = 0; c < dim; ++c) {
        double v = 0.0;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof(double)))
          throw IoError("truncated scatter file: " + path);
        block(r, c) = v;
      }
}

}  // namespace

void write_scatter_binary(const std::string& path,
                          const ScatterPair& scatter) {
  std::ofstream out = open_out(path);
  out.write(kScatterMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(scatter.n_features));
  put_u32(out, static_cast<std::uint32_t>(scatter.n_times));
  put_u32(out, scatter.mode == Mode::time_dependent ? 0u : 1u);
  put_blocks(out, scatter.between);
  put_blocks(out, scatter.within);
  if (!out) throw IoError("write failed: " + path);
}

ScatterPair read_scatter_binary(const std::string& path) {
  std::ifstream in = open_in(path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kScatterMagic, 4) != 0)
    throw IoError("not a scatter file: " + path);
  ScatterPair scatter;
  scatter.n_features = static_cast<Index>(get_u32(in, path));
  scatter.n_times = static_cast<Index>(get_u32(in, path));
  std::uint32_t mode = get_u32(in, path);
  if (mode > 1) throw IoError("unknown scatter mode in " + path);
  scatter.mode = mode == 0 ? Mode::time_dependent : Mode::time_independent;
  Index n_blocks = scatter.mode == Mode::time_dependent ? 1 : scatter.n_times;
  Index dim = scatter.mode == Mode::time_dependent
                  ? scatter.n_features * scatter.n_times
                  : scatter.n_features;
  get_blocks(in, scatter.between, n_blocks, dim, path);
  get_blocks(in, scatter.within, n_blocks, dim, path);
  return scatter;
}

}  // namespace mflda
