// SPDX-License-Identifier: Apache-2.0
//
// Self-contained random streams. Platform RNG distributions are not portable
// bit-for-bit, and reproducibility across machines and worker counts is part
// of the output contract, so the generator (xoshiro256++), the seed expansion
// (splitmix64) and every sampler are fixed algorithms owned by this header.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "mrrlink/math_util.hpp"

namespace mrrlink {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stable 64-bit mix producing the seed of trial `index` under `master`.
// Identical (master, index) gives an identical stream on every platform and
// for every worker layout.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xA0761D6478BD642Full + index * 0xE7037ED1A0B428DBull);
  std::uint64_t z = splitmix64_next(s);
  return z ^ splitmix64_next(s);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64_next(sm);
    have_cached_normal_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, so it is
  // safe under log().
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller with the second variate cached.
  double normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

// Marsaglia-Tsang gamma sampler with the shape-dependent constants cached.
// sample() returns Gamma(shape, scale 1); sample_unit_mean() divides by the
// shape so the result has mean exactly 1.
class GammaSampler {
 public:
  explicit GammaSampler(double shape) : shape_(shape) {
    boosted_ = shape < 1.0;
    const double a = boosted_ ? shape + 1.0 : shape;
    d_ = a - 1.0 / 3.0;
    c_ = 1.0 / std::sqrt(9.0 * d_);
    inv_shape_ = 1.0 / shape;
  }

  double shape() const { return shape_; }

  double sample(RandomStream& rng) const {
    for (;;) {
      double x, v;
      do {
        x = rng.normal();
        v = 1.0 + c_ * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = rng.uniform01();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return finish(rng, d_ * v);
      if (std::log(u) < 0.5 * x2 + d_ * (1.0 - v + std::log(v))) {
        return finish(rng, d_ * v);
      }
    }
  }

  double sample_unit_mean(RandomStream& rng) const {
    return sample(rng) * inv_shape_;
  }

 private:
  double finish(RandomStream& rng, double g) const {
    if (!boosted_) return g;
    return g * std::pow(rng.uniform01(), inv_shape_);
  }
  double shape_, d_, c_, inv_shape_;
  bool boosted_;
};

} // namespace mrrlink
