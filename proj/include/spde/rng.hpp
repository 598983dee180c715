#pragma once

#include <cstdint>

// Counter-based Gaussian sampler. Every draw is a pure function of
// (seed, path, step, mode), so Monte Carlo runs are bit-reproducible
// regardless of scheduling order.

namespace spde {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + kGolden + (h << 6) + (h >> 2)));
}

// uniform in (0, 1], never 0 so log() is safe
inline double to_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t step, std::uint64_t mode);

// per-path seed derivation for batch runs
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path_id) {
  return combine(mix64(master), path_id);
}

}  // namespace spde
