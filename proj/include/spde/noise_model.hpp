#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spde/grid_function.hpp"

// Truncated cylindrical Wiener process and Lipschitz diffusion
// coefficients (additive or diagonal Nemytskii).

namespace spde {

class WienerDriver {
 public:
  WienerDriver(std::size_t mode_count, std::uint64_t seed)
      : m_(mode_count), seed_(seed) {}

  std::size_t mode_count() const { return m_; }
  std::uint64_t seed() const { return seed_; }

  /// N(0, dt) draw for (path, step, mode); pure function of its inputs
  double increment(std::uint64_t path_id, std::uint64_t step,
                   std::uint64_t mode, double dt) const;

  /// table[k][mode] = increment over [grid[k], grid[k+1]]
  std::vector<std::vector<double>> sample_increments(
      std::uint64_t path_id, const std::vector<double>& step_grid) const;

 private:
  std::size_t m_;
  std::uint64_t seed_;
};

class DiffusionCoefficient {
 public:
  using ScalarFn = std::function<double(double)>;
  using TimeColumnsFn = std::function<std::vector<GridFunction>(double)>;

  /// additive: columns independent of the state (optionally of time)
  static DiffusionCoefficient additive(std::vector<GridFunction> columns);
  static DiffusionCoefficient additive_time_dependent(TimeColumnsFn columns,
                                                      std::size_t mode_count,
                                                      double lipschitz = 0.0);

  /// diagonal Nemytskii: column k = weight_k * b_k(u) pointwise
  static DiffusionCoefficient nemytskii_diagonal(std::vector<ScalarFn> b,
                                                 std::vector<double> weights,
                                                 double lipschitz_bound);

  NoiseOperatorValue evaluate(double t, const GridFunction& u) const;
  std::size_t mode_count() const { return m_; }
  double lipschitz_bound() const { return lip_; }
  bool is_additive() const { return additive_; }

 private:
  DiffusionCoefficient() = default;
  std::size_t m_ = 0;
  double lip_ = 0.0;
  bool additive_ = false;
  std::function<NoiseOperatorValue(double, const GridFunction&)> eval_;
};

struct LipschitzEstimate {
  double value = 0.0;
  GridFunction witness_u, witness_v;
  bool within_declared = false;
};

/// max over sampled pairs of ||B(u)-B(v)||_gamma / ||u-v||_q
LipschitzEstimate estimate_lipschitz(const DiffusionCoefficient& b, double q,
                                     std::size_t dim, std::size_t n_pairs,
                                     std::uint64_t seed = 11);

}  // namespace spde
