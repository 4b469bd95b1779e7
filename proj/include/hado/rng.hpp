// Seeded random number generation with stable output across platforms.
//
// std::mt19937_64 is fully specified by the standard; the distributions are
// not, so uniform/normal transforms are implemented here. Every stochastic
// component of the stack draws from an Rng seeded per episode, which is what
// makes parallel and serial suite runs agree byte for byte.
#pragma once

#include <cstdint>
#include <random>

namespace hado {

// SplitMix64, used to derive well-mixed child seeds from (base, door, trial).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is always tiny versus 2^64.
    return engine_() % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller without a cached spare so the draw count per call is fixed.
  double normal(double mu = 0.0, double sigma = 1.0) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(6.28318530717958647692 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hado
