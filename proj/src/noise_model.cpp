#include "spde/noise_model.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "spde/rng.hpp"

namespace spde {

double WienerDriver::increment(std::uint64_t path_id, std::uint64_t step,
                               std::uint64_t mode, double dt) const {
  return std::sqrt(dt) * counter_normal(seed_, path_id, step, mode);
}

std::vector<std::vector<double>> WienerDriver::sample_increments(
    std::uint64_t path_id, const std::vector<double>& step_grid) const {
  if (step_grid.size() < 2)
    throw std::invalid_argument("step grid needs at least two points");
  std::vector<std::vector<double>> table(step_grid.size() - 1,
                                         std::vector<double>(m_));
  for (std::size_t k = 0; k + 1 < step_grid.size(); ++k) {
    const double dt = step_grid[k + 1] - step_grid[k];
    if (dt <= 0.0)
      throw std::invalid_argument("step grid must be strictly increasing");
    for (std::size_t j = 0; j < m_; ++j)
      table[k][j] = increment(path_id, k, j, dt);
  }
  return table;
}

DiffusionCoefficient DiffusionCoefficient::additive(
    std::vector<GridFunction> columns) {
  DiffusionCoefficient b;
  b.m_ = columns.size();
  b.additive_ = true;
  b.lip_ = 0.0;
  b.eval_ = [cols = std::move(columns)](double, const GridFunction&) {
    return NoiseOperatorValue{cols};
  };
  return b;
}

DiffusionCoefficient DiffusionCoefficient::additive_time_dependent(
    TimeColumnsFn columns, std::size_t mode_count, double lipschitz) {
  DiffusionCoefficient b;
  b.m_ = mode_count;
  b.additive_ = true;
  b.lip_ = lipschitz;
  b.eval_ = [fn = std::move(columns)](double t, const GridFunction&) {
    return NoiseOperatorValue{fn(t)};
  };
  return b;
}

DiffusionCoefficient DiffusionCoefficient::nemytskii_diagonal(
    std::vector<ScalarFn> b_fns, std::vector<double> weights,
    double lipschitz_bound) {
  if (b_fns.size() != weights.size())
    throw std::invalid_argument("one weight per scalar function required");
  DiffusionCoefficient b;
  b.m_ = b_fns.size();
  b.additive_ = false;
  b.lip_ = lipschitz_bound;
  b.eval_ = [fns = std::move(b_fns), w = std::move(weights)](
                double, const GridFunction& u) {
    NoiseOperatorValue t;
    t.columns.reserve(fns.size());
    for (std::size_t k = 0; k < fns.size(); ++k) {
      GridFunction col(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) col[i] = w[k] * fns[k](u[i]);
      t.columns.push_back(std::move(col));
    }
    return t;
  };
  return b;
}

NoiseOperatorValue DiffusionCoefficient::evaluate(double t,
                                                  const GridFunction& u) const {
  return eval_(t, u);
}

LipschitzEstimate estimate_lipschitz(const DiffusionCoefficient& b, double q,
                                     std::size_t dim, std::size_t n_pairs,
                                     std::uint64_t seed) {
  LipschitzEstimate est;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    GridFunction u(dim), v(dim);
    const double scale = std::exp(counter_normal(seed, p, dim, 2));
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = scale * counter_normal(seed, p, i, 0);
      v[i] = u[i] + scale * 0.5 * counter_normal(seed, p, i, 1);
    }
    const double den = norm_q(u - v, q);
    if (den == 0.0) continue;
    const double num = gamma_norm(b.evaluate(0.0, u) - b.evaluate(0.0, v), q);
    if (num / den > est.value) {
      est.value = num / den;
      est.witness_u = u;
      est.witness_v = v;
    }
  }
  est.within_declared = est.value <= b.lipschitz_bound() * (1.0 + 1e-8) + 1e-14;
  return est;
}

}  // namespace spde
