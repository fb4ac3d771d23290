#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace wncs {

// SplitMix64 finalizer. Used both to expand seeds and to mix stream labels.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/**
 * Deterministic seed for one named substream of one run.
 *
 * Streams are addressed by (run, loop, kind). The chain of mix64 calls is a
 * fixed part of the output format: changing it changes every trace, so it
 * must stay stable across releases. Policies never enter the derivation;
 * that is what makes common-random-number comparisons work.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run,
                                 std::uint64_t loop, std::uint64_t kind) {
  std::uint64_t s = mix64(base);
  s = mix64(s ^ mix64(run + 0x01));
  s = mix64(s ^ mix64(loop + 0x9e3779b97f4a7c15ULL));
  s = mix64(s ^ mix64(kind + 0x2545f4914f6cdd1dULL));
  return s;
}

// Substream labels used by the simulator.
enum class StreamKind : std::uint64_t {
  kProcessNoise = 0,
  kMeasurementNoise = 1,
  kChannel = 2,
  kPolicy = 3,
};

/**
 * xoshiro256** generator (Blackman/Vigna), seeded through SplitMix64.
 * Small, fast, and fully specified here so traces do not depend on the
 * standard library's engine or distribution implementations.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s = mix64(s);
      word = s;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 bits of mantissa.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Bernoulli(p) draw; p outside [0,1] saturates.
  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller. Consumes exactly two uniforms per call
  // so stream positions stay easy to reason about.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // log(0) guard; probability 2^-53
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Vector of iid standard normals.
  Eigen::VectorXd gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = gaussian();
    return z;
  }

  // Uniform integer in [0, n), n >= 1. Rejection-free modulo is fine here:
  // n is tiny (loop/channel counts), bias is < n / 2^64.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace wncs
