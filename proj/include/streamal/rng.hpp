#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace streamal {

/// splitmix64 step, used to derive independent sub-seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random source. All draws are derived from raw mt19937_64
// output instead of the std <random> distributions, whose sequences are
// implementation-defined; traces must be reproducible from (config, seed)
// alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    auto v = lo + static_cast<std::int64_t>(uniform() * span);
    return v > hi ? hi : v;
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    auto v = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

  /// Standard normal via Box-Muller (second variate discarded).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643 * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  /// Gamma(alpha, 1) for alpha >= 1, Marsaglia-Tsang squeeze method.
  double gamma(double alpha) {
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace streamal
