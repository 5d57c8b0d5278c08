// Portable seeded generator. The exact bit stream is part of the synthetic
// table contract, so it is spelled out here instead of relying on <random>
// distributions whose output differs between standard libraries.
#pragma once

#include <cstdint>

namespace tabstruct {

/// PCG32 (XSH-RR output, 64-bit LCG state).
///
///   state' = state * 6364136223846793005 + inc
///   out    = rotr32(((state >> 18) ^ state) >> 27, state >> 59)
///
/// Seeding follows pcg32_srandom_r: inc = (stream << 1) | 1, state = 0,
/// step, state += seed, step.
class Pcg32 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kDefaultStream = 54;

  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream)
      : inc_((stream << 1u) | 1u) {
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    const std::uint64_t old = state_;
    state_ = old * kMultiplier + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  /// Uniform double in [0, 1) with 53 random bits: the high word is drawn first.
  double uniform() {
    const std::uint64_t hi = next();
    const std::uint64_t lo = next();
    return static_cast<double>(((hi << 32u) | lo) >> 11u) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection sampling (pcg32_boundedrand_r).
  std::uint32_t below(std::uint32_t n) {
    const std::uint32_t threshold = (0u - n) % n;
    for (;;) {
      const std::uint32_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

}  // namespace tabstruct
