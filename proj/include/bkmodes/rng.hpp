#pragma once

#include <cstdint>
#include <random>

namespace bkmodes {

// All seeded randomness runs on std::mt19937_64, whose output sequence is
// fully specified by the standard, with rejection-sampled bounded draws.
// std::uniform_int_distribution is implementation-defined and would break
// cross-platform reproducibility, so it is not used anywhere.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be >= 1.
inline std::uint64_t draw_below(Rng& rng, std::uint64_t bound) {
  // Reject raw draws below 2^64 mod bound, then reduce.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

// Uniform double in [0, 1) with 53 random bits.
inline double draw_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bkmodes
