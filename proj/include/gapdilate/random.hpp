#pragma once

// Portable random number helpers.
//
// Every random quantity in the library is drawn through the helpers below.
// Results are bit-reproducible across compilers and standard libraries.
// Two engines are used:
//
//   * std::mt19937_64 for long-lived streams (generators, solver init). Its
//     output sequence is fixed by the C++ standard.
//   * SplitMix64 for short keyed streams (one per random walk, one per
//     solver step), seeded from derive_seed(seed, index).
//
// std::uniform_int_distribution and friends are implementation-defined and are
// never used.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace gapdilate {

/// SplitMix64 (Steele, Lea, Flood 2014). Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Mixes a base seed with a stream index into an independent-looking seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 a(seed ^ 0x6a09e667f3bcc909ULL);
  std::uint64_t s = a();
  SplitMix64 b(s ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  return b();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  return derive_seed(derive_seed(seed, i), j);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
template <class Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  unsigned __int128 m = static_cast<unsigned __int128>(static_cast<std::uint64_t>(rng())) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(static_cast<std::uint64_t>(rng())) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform integer in [lo, hi] (inclusive).
template <class Engine>
std::int64_t uniform_int(Engine& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// Standard normal via Box-Muller; consumes two draws per sample.
template <class Engine>
double standard_normal(Engine& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gapdilate
