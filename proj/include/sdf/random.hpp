#pragma once
// Deterministic seeded point generation (splitmix64).
//
// Coordinates are dyadic rationals k/2^20 in the unit square, deduplicated,
// so generated instances are exact and reproducible byte-for-byte from the
// seed alone.

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "sdf/point.hpp"

namespace sdf {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t limit = ~0ULL - (~0ULL % bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }
};

// n distinct points with coordinates k/2^20, k in [0, 2^20].
inline std::vector<Pt> random_points(int n, std::uint64_t seed) {
  constexpr std::uint64_t kDen = 1u << 20;
  SplitMix64 rng(seed);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  std::vector<Pt> pts;
  while (static_cast<int>(pts.size()) < n) {
    std::uint64_t kx = rng.below(kDen + 1), ky = rng.below(kDen + 1);
    if (!seen.insert({kx, ky}).second) continue;
    pts.push_back(Pt{q_of(static_cast<long>(kx), static_cast<long>(kDen)),
                     q_of(static_cast<long>(ky), static_cast<long>(kDen))});
  }
  return pts;
}

}  // namespace sdf
