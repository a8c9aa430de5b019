#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace wtlab {

/// xoshiro256++ with splitmix64 seeding.  Hand-rolled so that streams and
/// the derived variates are identical across platforms and standard
/// libraries; reproducibility of every stochastic output depends on it.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) word = split_mix(x);
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  /// Uniform phase in [0, 2 pi).
  double phase() { return 2.0 * std::numbers::pi * uniform(); }

  /// Exponential intensity with mean n (Rayleigh amplitude law).
  double rayleigh_intensity(double n) { return -n * std::log1p(-uniform()); }

  /// Box-Muller pair of standard normals.
  std::pair<double, double> normal_pair() {
    const double r = std::sqrt(-2.0 * std::log1p(-uniform()));
    const double t = phase();
    return {r * std::cos(t), r * std::sin(t)};
  }

  static uint64_t split_mix(uint64_t& x) {
    uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  uint64_t state_[4];
};

/// Independent per-realization seed stream: seed_i = hash(master, i).
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  uint64_t x = master ^ (0xA0761D6478BD642Full + index * 0xE7037ED1A0B428DBull);
  return Rng::split_mix(x);
}

}  // namespace wtlab
