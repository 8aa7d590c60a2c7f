#include "mflda/simgen.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mflda/parallel.hpp"

namespace mflda {

Scenario scenario_from_string(const std::string& s) {
  if (s == "all_time") return Scenario::all_time;
  if (s == "window_5_15") return Scenario::window_5_15;
  if (s == "random_window_len10") return Scenario::random_window_len10;
  if (s == "random_window_random_len") return Scenario::random_window_random_len;
  if (s == "window_5_15_with_ste") return Scenario::window_5_15_with_ste;
  throw ConfigError("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::all_time: return "all_time";
    case Scenario::window_5_15: return "window_5_15";
    case Scenario::random_window_len10: return "random_window_len10";
    case Scenario::random_window_random_len: return "random_window_random_len";
    case Scenario::window_5_15_with_ste: return "window_5_15_with_ste";
  }
  throw ConfigError("unknown scenario");
}

std::array<double, 7> base_curve_params(Rng& rng, Index n_times) {
  // Six anchor points: fixed ends at x = 0 and 10, four interior abscissae
  // and all ordinates random.
  std::array<double, 6> x{}, y{};
  x[0] = 0.0;
  x[5] = 10.0;
  for (int k = 1; k <= 4; ++k) x[k] = rng.uniform(0.0, 10.0);
  for (int k = 0; k < 6; ++k) y[k] = rng.uniform(50.0, 100.0);

  Matrix design(6, 5);
  Vector rhs(6);
  for (int r = 0; r < 6; ++r) {
    double pw = 1.0;
    for (int c = 0; c < 5; ++c) {
      design(r, c) = pw;
      pw *= x[r];
    }
    rhs[r] = y[r];
  }
  Vector eta = Eigen::CompleteOrthogonalDecomposition<Matrix>(design).solve(rhs);

  auto poly = [&eta](double t) {
    return eta[0] + t * (eta[1] + t * (eta[2] + t * (eta[3] + t * eta[4])));
  };
  double lo = poly(1.0), hi = poly(1.0);
  for (Index t = 2; t <= n_times; ++t) {
    double v = poly(static_cast<double>(t));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::array<double, 7> out{};
  for (int c = 0; c < 5; ++c) out[c] = eta[c];
  out[5] = hi - lo;
  out[6] = rng.uniform(0.0, 10.0);
  return out;
}

std::pair<int, int> scenario_window(Scenario scenario, Rng& rng,
                                    Index n_times) {
  int T = static_cast<int>(n_times);
  switch (scenario) {
    case Scenario::all_time:
      return {1, T};
    case Scenario::window_5_15:
    case Scenario::window_5_15_with_ste:
      return {std::min(5, T), std::min(15, T)};
    case Scenario::random_window_len10: {
      int len = std::min(10, T);
      int start = 1 + static_cast<int>(rng.bounded(T - len + 1));
      return {start, start + len - 1};
    }
    case Scenario::random_window_random_len: {
      int cap = std::min(40, T);
      int len = std::min(5, T) + static_cast<int>(rng.bounded(
                                     std::max(1, cap - std::min(5, T) + 1)));
      len = std::min(len, T);
      int start = 1 + static_cast<int>(rng.bounded(T - len + 1));
      return {start, start + len - 1};
    }
  }
  throw ConfigError("unknown scenario");
}

namespace {

void validate(const SimConfig& cfg) {
  if (cfg.group_sizes.size() < 2)
    throw ConfigError("simulation needs at least two groups");
  for (Index nk : cfg.group_sizes)
    if (nk < 1) throw ConfigError("every group needs at least one subject");
  if (cfg.n_features < 1) throw ConfigError("n_features must be >= 1");
  if (cfg.n_times < 2) throw ConfigError("n_times must be >= 2");
  if (cfg.sigma < 0.0) throw ConfigError("sigma must be >= 0");
  if (cfg.rho < 0.0) throw ConfigError("rho must be >= 0");
  if (cfg.signal_fraction < 0.0 || cfg.signal_fraction > 1.0)
    throw ConfigError("signal_fraction must lie in [0, 1]");
  if (cfg.keep_rate <= 0.0 || cfg.keep_rate > 1.0)
    throw ConfigError("keep_rate must lie in (0, 1]");
  if (cfg.disjoint_signals && cfg.group_sizes.size() != 3)
    throw ConfigError("disjoint signal sets are defined for three groups");
}

}  // namespace

SimResult generate(const SimConfig& cfg) {
  validate(cfg);
  int G = static_cast<int>(cfg.group_sizes.size());
  Index p = cfg.n_features;
  Index T = cfg.n_times;
  double rho = cfg.rho;
  if (cfg.scenario == Scenario::window_5_15_with_ste && rho == 0.0) rho = 1.0;

  Index s = static_cast<Index>(std::lround(
      cfg.signal_fraction * static_cast<double>(p)));
  s = std::min(s, p);
  if (cfg.disjoint_signals && 2 * s > p)
    throw ConfigError("disjoint signal sets need 2 * signal block <= p");

  std::uint64_t feature_base = mix_seed(cfg.seed, 1);
  std::uint64_t cell_base = mix_seed(cfg.seed, 2);
  std::uint64_t keep_base = mix_seed(cfg.seed, 3);

  // Per-feature deterministic substreams; draw order (curve params, window,
  // group signs) is part of the reproducibility contract.
  struct FeatureParams {
    std::array<double, 7> eta;
    FeatureTruth truth;
  };
  std::vector<FeatureParams> features(p);
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t j) {
    Rng rng(mix_seed(feature_base, j));
    FeatureParams& fp = features[j];
    fp.eta = base_curve_params(rng, T);
    auto [lo, hi] = scenario_window(cfg.scenario, rng, T);
    fp.truth.window_lo = lo;
    fp.truth.window_hi = hi;
    fp.truth.lambda.assign(G, 1.0);
    for (int g = 1; g < G; ++g)
      fp.truth.lambda[g] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Index jj = static_cast<Index>(j);
    fp.truth.signal = cfg.disjoint_signals ? jj < 2 * s : jj < s;
  });

  Index n = 0;
  for (Index nk : cfg.group_sizes) n += nk;

  SimResult result;
  result.data.feature_names.resize(p);
  int fw = static_cast<int>(std::to_string(p).size());
  for (Index j = 0; j < p; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "f%0*lld", fw,
                  static_cast<long long>(j + 1));
    result.data.feature_names[j] = buf;
  }
  result.data.subject_ids.resize(n);
  result.data.labels.resize(n);
  for (int g = 0; g < G; ++g)
    result.data.class_names.push_back(std::to_string(g + 1));
  int sw = static_cast<int>(std::to_string(n).size());
  {
    Index i = 0;
    for (int g = 0; g < G; ++g)
      for (Index r = 0; r < cfg.group_sizes[g]; ++r, ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "s%0*lld", sw,
                      static_cast<long long>(i + 1));
        result.data.subject_ids[i] = buf;
        result.data.labels[i] = g;
      }
  }

  // Mean shift for group g on a signal feature inside its window.
  auto delta_of = [&](Index j, int g) -> double {
    if (!features[j].truth.signal || g == 0) return 0.0;
    if (!cfg.disjoint_signals)
      return features[j].truth.lambda[g] * cfg.delta_step *
             static_cast<double>(g);
    // First block separates group 2, second block group 3.
    bool first_block = j < s;
    int target = first_block ? 1 : 2;
    if (g != target) return 0.0;
    return features[j].truth.lambda[g] * cfg.delta_step;
  };

  std::vector<std::vector<Observation>> per_subject(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    int g = result.data.labels[i];
    Rng keep_rng(mix_seed(keep_base, i));
    std::vector<bool> keep(T);
    for (Index t = 0; t < T; ++t)
      keep[t] = cfg.keep_rate >= 1.0 || keep_rng.uniform() < cfg.keep_rate;

    auto& rows = per_subject[i];
    rows.reserve(static_cast<std::size_t>(T) * p);
    for (Index j = 0; j < p; ++j) {
      const FeatureParams& fp = features[j];
      Rng cell(mix_seed(cell_base, i * static_cast<std::size_t>(p) + j));
      double xi1 = cell.normal();
      double xi2 = cell.normal();
      double shift = delta_of(j, g);
      for (Index t = 0; t < T; ++t) {
        double eps = cfg.sigma > 0.0 ? cell.normal(0.0, cfg.sigma) : 0.0;
        if (!keep[t]) continue;
        double tt = static_cast<double>(t + 1);
        double base = fp.eta[0] +
                      tt * (fp.eta[1] +
                            tt * (fp.eta[2] + tt * (fp.eta[3] + tt * fp.eta[4]))) +
                      fp.eta[5] * std::sin(fp.eta[6] * tt);
        double value = base + eps;
        if (tt >= fp.truth.window_lo && tt <= fp.truth.window_hi)
          value += shift;
        if (rho != 0.0) {
          // Smooth rank-two trajectory effect on the unit-rescaled grid.
          double u = (tt - 1.0) / (static_cast<double>(T) - 1.0);
          double psi1 = -2.0 * std::cos(M_PI * (u - 0.5));
          double psi2 = std::sin(M_PI * (u - 0.5));
          value += rho * (xi1 * psi1 + xi2 * psi2);
        }
        Observation obs;
        obs.subject = static_cast<Index>(i);
        obs.time = tt;
        obs.feature = j;
        obs.value = value;
        rows.push_back(obs);
      }
    }
  });

  for (auto& rows : per_subject) {
    // Subject-major, then time, then feature.
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Observation& a, const Observation& b) {
                       if (a.time != b.time) return a.time < b.time;
                       return a.feature < b.feature;
                     });
    result.data.observations.insert(result.data.observations.end(),
                                    rows.begin(), rows.end());
  }

  result.truth.features.reserve(p);
  for (Index j = 0; j < p; ++j) {
    result.truth.features.push_back(features[j].truth);
    if (features[j].truth.signal) result.truth.signal_set.push_back(j);
  }
  validate_dataset(result.data);
  return result;
}

}  // namespace mflda
