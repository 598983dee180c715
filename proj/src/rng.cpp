#include "spde/rng.hpp"

#include <cmath>
#include <numbers>

namespace spde {

double counter_normal(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t step, std::uint64_t mode) {
  std::uint64_t h = mix64(seed);
  h = combine(h, path);
  h = combine(h, step);
  h = combine(h, mode);
  const double u1 = to_unit(mix64(h ^ 0x5555555555555555ull));
  const double u2 = to_unit(mix64(h ^ 0xaaaaaaaaaaaaaaaaull));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spde
