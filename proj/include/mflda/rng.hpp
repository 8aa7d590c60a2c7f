#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace mflda {

// SplitMix64 generator. Deliberately self-contained: std:: distributions are
// implementation-defined, which would break bit-exact reproducibility of
// simulated corpora across toolchains. Substreams are derived by hashing a
// (seed, key...) tuple, so per-feature and per-subject streams are
// independent of evaluation order and thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
  std::uint64_t bounded(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (0x9e3779b97f4a7c15ULL + (b << 1)));
  r.next_u64();
  return r.next_u64() ^ b;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

}  // namespace mflda
