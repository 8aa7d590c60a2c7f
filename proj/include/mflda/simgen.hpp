#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mflda/fd_model.hpp"
#include "mflda/rng.hpp"
#include "mflda/types.hpp"

namespace mflda {

enum class Scenario {
  all_time,
  window_5_15,
  random_window_len10,
  random_window_random_len,
  window_5_15_with_ste,
};

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

struct SimConfig {
  std::vector<Index> group_sizes = {50, 50};
  Index n_features = 60;
  Index n_times = 40;
  double sigma = 25.0;
  double delta_step = 500.0;  // group k mean shift is k * delta_step
  double signal_fraction = 0.10;
  Scenario scenario = Scenario::all_time;
  double rho = 0.0;  // forced to 1 by window_5_15_with_ste
  std::uint64_t seed = 0;
  double keep_rate = 1.0;  // per (subject, time) retention probability
  bool disjoint_signals = false;
};

struct FeatureTruth {
  bool signal = false;
  int window_lo = 0;  // inclusive grid times, 1-based
  int window_hi = 0;
  std::vector<double> lambda;  // per group, shift sign on this feature
};

struct GroundTruth {
  std::vector<FeatureTruth> features;
  std::vector<Index> signal_set;
};

struct SimResult {
  FunctionalDataSet data;
  GroundTruth truth;
};

// Polynomial-plus-sine base curve parameters eta_0..eta_6 for one feature:
// a degree-4 least-squares fit through six random anchor points, the fitted
// range over the grid as the sine amplitude, and a random frequency.
std::array<double, 7> base_curve_params(Rng& rng, Index n_times);

// Signal window for one feature, inclusive 1-based grid times.
std::pair<int, int> scenario_window(Scenario scenario, Rng& rng,
                                    Index n_times);

// Deterministic for a given config: every random quantity is drawn from a
// substream keyed by (seed, feature) or (seed, subject, feature), so the
// result is independent of evaluation order and thread count.
SimResult generate(const SimConfig& cfg);

}  // namespace mflda
