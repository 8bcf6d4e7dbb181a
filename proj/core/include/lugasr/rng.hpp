#pragma once

#include <cstdint>
#include <random>

namespace lugasr {

// All randomized code in the toolkit draws through these helpers instead of
// <random> distributions, whose output is implementation-defined. Fixing the
// mapping from raw engine bits keeps seeded runs byte-identical.
using Rng = std::mt19937_64;

inline double uniform_unit(Rng& rng) {
  // 53 random bits mapped to [0,1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Uniform integer in [0, n) by rejection; n must be positive.
inline uint64_t uniform_index(Rng& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace lugasr
