#pragma once

#include <cstdint>
#include <random>

namespace lwocp {

/// SplitMix64 finalizer (Steele/Lea/Flood). Full-avalanche 64-bit mix.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a stream seed from a master seed and a stream index.
/// seed_i = splitmix64(master ^ splitmix64(i)). This derivation is part of
/// the output-file contract: trial i of an experiment always uses
/// mix_seed(config_seed, i), independent of which methods are requested.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

/// Deterministic random stream.
///
/// mt19937_64 output is pinned by the C++ standard, and every variate below
/// is an explicit transform of that output (no std:: distributions, whose
/// algorithms are implementation-defined), so sequences are bit-identical
/// across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// U[0,1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform draw from {0, ..., n-1} by rejection sampling.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller on explicit uniforms; second value of
  /// each pair is cached.
  double normal();

  /// Geometric on {1, 2, ...} with success probability p, by inverse CDF:
  /// K = ceil(log(1-U) / log(1-p)).
  int geometric(double p);

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace lwocp
