#pragma once

#include <cstdint>
#include <random>

namespace kino {

/// Seedable random source used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is pinned down by
/// the C++ standard, and uniform doubles are derived from the top 53 bits
/// directly rather than through std::uniform_real_distribution (whose
/// output is implementation-defined). Identical seeds therefore reproduce
/// identical runs across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free multiply-shift; bias is < 2^-64 * n, irrelevant here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  bool coin() { return (gen_() & 1u) != 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kino
