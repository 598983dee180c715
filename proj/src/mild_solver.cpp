#include "spde/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spde/strfmt.hpp"

namespace spde {

namespace {

std::vector<double> uniform_grid(const SolverConfig& cfg) {
  const std::size_t k = cfg.steps();
  std::vector<double> t(k + 1);
  for (std::size_t j = 0; j <= k; ++j) t[j] = cfg.dt * static_cast<double>(j);
  return t;
}

GridFunction noise_kick(const NoiseOperatorValue& b,
                        const std::vector<double>& dw, std::size_t dim) {
  GridFunction r(dim);
  for (std::size_t k = 0; k < b.columns.size(); ++k)
    for (std::size_t i = 0; i < dim; ++i) r[i] += b.columns[k][i] * dw[k];
  return r;
}

void check_finite(const GridFunction& u, std::size_t step) {
  if (!u.finite())
    throw std::runtime_error(cat("solver state non-finite at step ", step));
}

}  // namespace

std::size_t SolverConfig::steps() const {
  if (dt <= 0.0 || T <= 0.0)
    throw std::invalid_argument("solver requires T > 0 and dt > 0");
  const double k = T / dt;
  const auto n = static_cast<std::size_t>(std::llround(k));
  if (std::abs(k - static_cast<double>(n)) > 1e-9 || n == 0)
    throw std::invalid_argument("T must be an integral multiple of dt");
  return n;
}

TrajectoryRecord stochastic_convolution(const DirichletLaplacian& a,
                                        const DiffusionCoefficient& g,
                                        const WienerDriver& wd,
                                        std::uint64_t path_id,
                                        const SolverConfig& cfg) {
  TrajectoryRecord rec;
  rec.times = uniform_grid(cfg);
  const std::size_t k = cfg.steps();
  const std::size_t dim = a.dimension();
  rec.increments = wd.sample_increments(path_id, rec.times);
  rec.states.reserve(k + 1);
  rec.states.emplace_back(dim);
  rec.noise_values.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const NoiseOperatorValue gj = g.evaluate(rec.times[j], rec.states[j]);
    GridFunction next =
        rec.states[j] + noise_kick(gj, rec.increments[j], dim);
    next = a.semigroup_apply(cfg.dt, next);
    check_finite(next, j + 1);
    rec.noise_values.push_back(gj);
    rec.states.push_back(std::move(next));
  }
  return rec;
}

TrajectoryRecord solve_regularized(const SolverConfig& cfg,
                                   const MonotoneGraph& f,
                                   const DiffusionCoefficient& b,
                                   const DirichletLaplacian& a,
                                   const GridFunction& u0,
                                   const WienerDriver& wd,
                                   std::uint64_t path_id) {
  if (cfg.lambda <= 0.0)
    throw std::invalid_argument("solve_regularized requires lambda > 0");
  TrajectoryRecord rec;
  rec.times = uniform_grid(cfg);
  const std::size_t k = cfg.steps();
  const std::size_t dim = a.dimension();
  rec.increments = wd.sample_increments(path_id, rec.times);
  rec.states.reserve(k + 1);
  rec.states.push_back(u0);
  for (std::size_t j = 0; j < k; ++j) {
    const GridFunction& u = rec.states[j];
    const NoiseOperatorValue bj = b.evaluate(rec.times[j], u);
    GridFunction g(dim);
    for (std::size_t i = 0; i < dim; ++i) g[i] = f.yosida(cfg.lambda, u[i]);
    GridFunction rhs = u + noise_kick(bj, rec.increments[j], dim);
    for (std::size_t i = 0; i < dim; ++i)
      rhs[i] += cfg.dt * (cfg.eta * u[i] - g[i]);
    GridFunction next = a.resolvent_apply(cfg.dt, rhs);
    check_finite(next, j + 1);
    rec.selections.push_back(std::move(g));
    rec.noise_values.push_back(bj);
    rec.states.push_back(std::move(next));
  }
  return rec;
}

namespace {

TrajectoryRecord proximal_core(
    const SolverConfig& cfg, const MonotoneGraph& f, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id,
    const std::function<NoiseOperatorValue(std::size_t, const GridFunction&)>&
        noise_at) {
  TrajectoryRecord rec;
  rec.times = uniform_grid(cfg);
  const std::size_t k = cfg.steps();
  const std::size_t dim = a.dimension();
  rec.increments = wd.sample_increments(path_id, rec.times);
  rec.states.reserve(k + 1);
  rec.states.push_back(u0);
  for (std::size_t j = 0; j < k; ++j) {
    const GridFunction& u = rec.states[j];
    const NoiseOperatorValue bj = noise_at(j, u);
    GridFunction rhs = u + noise_kick(bj, rec.increments[j], dim);
    for (std::size_t i = 0; i < dim; ++i) rhs[i] += cfg.dt * cfg.eta * u[i];
    const GridFunction v = a.resolvent_apply(cfg.dt, rhs);
    GridFunction next(dim), g(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      next[i] = f.resolvent(cfg.dt, v[i]);
      // the proximal increment, nudged into the graph interval so
      // later convex-duality identities see an exact selection
      const Interval fi = f(next[i]);
      g[i] = std::clamp((v[i] - next[i]) / cfg.dt, fi.lo, fi.hi);
    }
    check_finite(next, j + 1);
    rec.selections.push_back(std::move(g));
    rec.noise_values.push_back(bj);
    rec.states.push_back(std::move(next));
  }
  return rec;
}

}  // namespace

TrajectoryRecord solve_proximal(const SolverConfig& cfg, const MonotoneGraph& f,
                                const DiffusionCoefficient& b,
                                const DirichletLaplacian& a,
                                const GridFunction& u0, const WienerDriver& wd,
                                std::uint64_t path_id) {
  TrajectoryRecord rec = proximal_core(
      cfg, f, a, u0, wd, path_id,
      [&](std::size_t j, const GridFunction& u) {
        return b.evaluate(cfg.dt * static_cast<double>(j), u);
      });
  return rec;
}

TrajectoryRecord solve_proximal_frozen_noise(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const std::vector<NoiseOperatorValue>& frozen, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id) {
  if (frozen.size() < cfg.steps())
    throw std::invalid_argument("frozen noise table shorter than step count");
  return proximal_core(cfg, f, a, u0, wd, path_id,
                       [&](std::size_t j, const GridFunction&) {
                         return frozen[j];
                       });
}

TrajectoryRecord solve_lipschitz_fixed_point(
    const SolverConfig& cfg, const std::function<double(double)>& f_lipschitz,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id,
    std::size_t max_iters, double tol, FixedPointLog* log) {
  const std::size_t k = cfg.steps();
  const std::size_t dim = a.dimension();
  const std::vector<double> times = uniform_grid(cfg);
  const auto increments = wd.sample_increments(path_id, times);

  std::vector<GridFunction> cur(k + 1, u0);
  FixedPointLog local;
  FixedPointLog& lg = log ? *log : local;
  for (std::size_t n = 0; n < max_iters; ++n) {
    std::vector<GridFunction> next;
    next.reserve(k + 1);
    next.push_back(u0);
    GridFunction w = u0;
    for (std::size_t j = 0; j < k; ++j) {
      const GridFunction& uj = cur[j];
      GridFunction rhs = w + noise_kick(b.evaluate(times[j], uj),
                                        increments[j], dim);
      for (std::size_t i = 0; i < dim; ++i)
        rhs[i] += cfg.dt * (cfg.eta * uj[i] - f_lipschitz(uj[i]));
      w = a.semigroup_apply(cfg.dt, rhs);
      check_finite(w, j + 1);
      next.push_back(w);
    }
    double dist = 0.0;
    for (std::size_t j = 0; j <= k; ++j)
      dist = std::max(dist, norm_q(next[j] - cur[j], cfg.q));
    lg.sup_distance.push_back(dist);
    if (lg.sup_distance.size() >= 2) {
      const double prev = lg.sup_distance[lg.sup_distance.size() - 2];
      lg.ratio.push_back(prev > 0.0 ? dist / prev : 0.0);
    }
    cur = std::move(next);
    lg.iterations = n + 1;
    if (dist <= tol) {
      lg.converged = true;
      break;
    }
  }
  if (!lg.converged)
    throw std::runtime_error(cat("fixed point not reached in ", lg.iterations,
                                 " sweeps (last distance ",
                                 lg.sup_distance.back(), ")"));

  TrajectoryRecord rec;
  rec.times = times;
  rec.increments = increments;
  rec.states = std::move(cur);
  for (std::size_t j = 0; j < k; ++j) {
    const GridFunction& uj = rec.states[j];
    GridFunction g(dim);
    for (std::size_t i = 0; i < dim; ++i) g[i] = f_lipschitz(uj[i]);
    rec.selections.push_back(std::move(g));
    rec.noise_values.push_back(b.evaluate(times[j], uj));
  }
  return rec;
}

std::vector<TrajectoryRecord> gamma_iteration(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id,
    std::size_t n_outer) {
  if (n_outer < 1)
    throw std::invalid_argument("gamma_iteration requires n_outer >= 1");
  const std::size_t k = cfg.steps();
  std::vector<TrajectoryRecord> iterates;
  iterates.reserve(n_outer + 1);

  TrajectoryRecord base;  // u^0: constant-in-time initial datum
  base.times = uniform_grid(cfg);
  base.increments = wd.sample_increments(path_id, base.times);
  base.states.assign(k + 1, u0);
  for (std::size_t j = 0; j < k; ++j)
    base.noise_values.push_back(b.evaluate(base.times[j], u0));
  iterates.push_back(std::move(base));

  for (std::size_t n = 0; n < n_outer; ++n) {
    const TrajectoryRecord& prev = iterates.back();
    std::vector<NoiseOperatorValue> frozen;
    frozen.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
      frozen.push_back(b.evaluate(prev.times[j], prev.states[j]));
    iterates.push_back(
        solve_proximal_frozen_noise(cfg, f, frozen, a, u0, wd, path_id));
  }
  return iterates;
}

double mild_residual(const TrajectoryRecord& traj, const DirichletLaplacian& a,
                     double eta, const GridFunction& u0, double q,
                     std::size_t checkpoint_stride) {
  const std::size_t k = traj.step_count();
  const std::size_t dim = a.dimension();
  if (checkpoint_stride == 0) checkpoint_stride = (k + 15) / 16;
  const double dt = traj.times[1] - traj.times[0];

  GridFunction drift_sum(dim);   // sum S(t_k - t_j)(g_j - eta u_j) dt
  GridFunction noise_sum(dim);   // sum S(t_k - t_j) B_j dW_j
  GridFunction flow = u0;        // S(t_k) u0
  double worst = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    GridFunction d = drift_sum;
    const GridFunction& uj = traj.states[j];
    if (!traj.selections.empty())
      for (std::size_t i = 0; i < dim; ++i)
        d[i] += dt * (traj.selections[j][i] - eta * uj[i]);
    else
      for (std::size_t i = 0; i < dim; ++i) d[i] += dt * (-eta * uj[i]);
    drift_sum = a.semigroup_apply(dt, d);

    GridFunction n = noise_sum;
    if (!traj.noise_values.empty())
      n += noise_kick(traj.noise_values[j], traj.increments[j], dim);
    noise_sum = a.semigroup_apply(dt, n);
    flow = a.semigroup_apply(dt, flow);

    const std::size_t step = j + 1;
    if (step % checkpoint_stride == 0 || step == k) {
      const GridFunction defect =
          traj.states[step] + drift_sum - flow - noise_sum;
      worst = std::max(worst, norm_q(defect, q));
    }
  }
  return worst;
}

std::vector<double> ito_inequality_residual(const TrajectoryRecord& traj,
                                            double eta, double q) {
  const std::size_t k = traj.step_count();
  const std::size_t dim = traj.states.front().size();
  const double dt = traj.times[1] - traj.times[0];
  std::vector<double> slack(k + 1, 0.0);
  const double u0q = phi_q_value(traj.states.front(), q);
  double rhs = u0q;
  for (std::size_t j = 0; j < k; ++j) {
    const GridFunction& uj = traj.states[j];
    const GridFunction grad = phi_q_grad(uj, q);
    GridFunction drift(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double g =
          traj.selections.empty() ? 0.0 : traj.selections[j][i];
      drift[i] = -g + eta * uj[i];
    }
    rhs += dt * inner(grad, drift);
    if (!traj.noise_values.empty()) {
      rhs += inner(grad,
                   noise_kick(traj.noise_values[j], traj.increments[j], dim));
      const double gn = gamma_norm(traj.noise_values[j], q);
      rhs += 0.5 * q * (q - 1.0) * dt * gn * gn *
             (q == 2.0 ? 1.0 : std::pow(norm_q(uj, q), q - 2.0));
    }
    slack[j + 1] = rhs - phi_q_value(traj.states[j + 1], q);
  }
  return slack;
}

}  // namespace spde
