#include "spde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spde/rng.hpp"
#include "spde/strfmt.hpp"

namespace spde {

namespace {

struct MeanStd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / (n - 1.0));
  }
  return r;
}

double regression_slope(std::span<const double> xs,
                        std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

// (max - min) / max, guarded near zero
double band_variation(std::span<const double> xs, double zero_floor = 1e-9) {
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (*mx <= zero_floor) return 0.0;
  return (*mx - *mn) / *mx;
}

double sup_distance_power(const std::vector<GridFunction>& a,
                          const std::vector<GridFunction>& b, double p,
                          double q, double alpha, const std::vector<double>& t) {
  double sup = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    sup = std::max(sup,
                   std::exp(-alpha * t[k]) * norm_q(a[k] - b[k], q));
  return std::pow(sup, p);
}

}  // namespace

MonteCarloEstimate power_mean(std::span<const double> samples, double p,
                              std::string tag) {
  if (samples.size() < 2)
    throw std::invalid_argument("power_mean needs at least two samples");
  MonteCarloEstimate est;
  est.n_paths = samples.size();
  est.tag = std::move(tag);
  const MeanStd ms = mean_std(samples);
  const double n = static_cast<double>(samples.size());
  est.value = ms.mean <= 0.0 ? 0.0 : std::pow(ms.mean, 1.0 / p);
  if (p >= 1.0) {
    const double hw_mean = 1.96 * ms.sd / std::sqrt(n);
    est.half_width = ms.mean <= 0.0
                         ? 0.0
                         : hw_mean / p * std::pow(ms.mean, 1.0 / p - 1.0);
  } else {
    // quasi-norm regime: bootstrap percentile CI
    constexpr std::size_t kResamples = 1000;
    std::vector<double> boot(kResamples);
    for (std::size_t b = 0; b < kResamples; ++b) {
      double m = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::uint64_t idx =
            mix64(combine(combine(0xb007u, b), i)) % samples.size();
        m += samples[idx];
      }
      m /= n;
      boot[b] = m <= 0.0 ? 0.0 : std::pow(m, 1.0 / p);
    }
    std::sort(boot.begin(), boot.end());
    est.half_width = 0.5 * (boot[974] - boot[24]);
  }
  return est;
}

double path_sup_functional(const TrajectoryRecord& traj, double p, double q,
                           double alpha) {
  double sup = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    sup = std::max(sup, std::exp(-alpha * traj.times[k]) *
                            norm_q(traj.states[k], q));
  return std::pow(sup, p);
}

MonteCarloEstimate hp_norm(std::span<const TrajectoryRecord> paths, double p,
                           double q, double alpha) {
  if (paths.empty()) throw std::invalid_argument("hp_norm: empty path set");
  std::vector<double> samples;
  samples.reserve(paths.size());
  for (const auto& traj : paths)
    samples.push_back(path_sup_functional(traj, p, q, alpha));
  return power_mean(samples, p, "hp_norm");
}

CauchyStudyReport cauchy_in_lambda_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const std::vector<double>& lambdas,
    const WienerDriver& wd, std::size_t n_paths) {
  if (lambdas.size() < 3)
    throw std::invalid_argument("cauchy study needs >= 3 lambda values");
  CauchyStudyReport rep;
  const std::size_t pairs = lambdas.size() - 1;
  std::vector<std::vector<double>> samples(pairs);

  for (std::size_t path = 0; path < n_paths; ++path) {
    std::vector<std::vector<GridFunction>> states;
    std::vector<double> times;
    for (double lam : lambdas) {
      SolverConfig c = cfg;
      c.lambda = lam;
      TrajectoryRecord rec =
          lam > 0.0 ? solve_regularized(c, f, b, a, u0, wd, path)
                    : solve_proximal(c, f, b, a, u0, wd, path);
      times = rec.times;
      states.push_back(std::move(rec.states));
    }
    for (std::size_t i = 0; i < pairs; ++i)
      samples[i].push_back(sup_distance_power(states[i], states[i + 1], cfg.p,
                                              cfg.q, cfg.alpha, times));
  }

  std::vector<double> lx, ly;
  rep.ci_ok = true;
  for (std::size_t i = 0; i < pairs; ++i) {
    rep.lambda_pairs.push_back(lambdas[i] + lambdas[i + 1]);
    rep.distances.push_back(
        power_mean(samples[i], cfg.p,
                   cat("lambda ", lambdas[i], "+", lambdas[i + 1])));
    const MonteCarloEstimate& e = rep.distances.back();
    if (e.relative_ci() > 0.30) rep.ci_ok = false;
    if (e.value > 0.0) {
      lx.push_back(std::log(rep.lambda_pairs.back()));
      ly.push_back(std::log(e.value));
    }
  }
  rep.required_slope = (1.0 / cfg.q) * (1.0 - 0.25);
  rep.slope = lx.size() >= 2 ? regression_slope(lx, ly) : 0.0;
  rep.pass = rep.ci_ok && rep.slope >= rep.required_slope;
  return rep;
}

AprioriStudyReport apriori_bound_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0_base, const std::vector<double>& u0_scales,
    const std::vector<double>& lambdas, const WienerDriver& wd,
    std::size_t n_paths) {
  AprioriStudyReport rep;
  rep.lambdas = lambdas;
  rep.u0_scales = u0_scales;
  rep.pass = true;
  for (double scale : u0_scales) {
    GridFunction u0 = scale * u0_base;
    const double denom = 1.0 + std::pow(norm_q(u0, cfg.q), cfg.p);
    std::vector<double> row;
    for (double lam : lambdas) {
      SolverConfig c = cfg;
      c.lambda = lam;
      std::vector<double> samples;
      samples.reserve(n_paths);
      for (std::size_t path = 0; path < n_paths; ++path) {
        TrajectoryRecord rec =
            lam > 0.0 ? solve_regularized(c, f, b, a, u0, wd, path)
                      : solve_proximal(c, f, b, a, u0, wd, path);
        samples.push_back(path_sup_functional(rec, cfg.p, cfg.q, cfg.alpha));
      }
      row.push_back(mean_std(samples).mean / denom);
    }
    rep.max_variation = std::max(rep.max_variation, band_variation(row));
    rep.ratio.push_back(std::move(row));
  }
  rep.pass = rep.max_variation < 0.50;
  return rep;
}

DependenceStudyReport lipschitz_dependence_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const GridFunction& direction,
    const std::vector<double>& distances, const WienerDriver& wd,
    std::size_t n_paths) {
  DependenceStudyReport rep;
  auto solve = [&](const GridFunction& init, std::size_t path) {
    if (cfg.lambda > 0.0)
      return solve_regularized(cfg, f, b, a, init, wd, path);
    return solve_proximal(cfg, f, b, a, init, wd, path);
  };
  for (double dist : distances) {
    GridFunction u0b = u0;
    const double dn = norm_q(direction, cfg.q);
    for (std::size_t i = 0; i < u0b.size(); ++i)
      u0b[i] += dist / dn * direction[i];
    const double denom = norm_q(u0b - u0, cfg.q);
    std::vector<double> samples;
    samples.reserve(n_paths);
    for (std::size_t path = 0; path < n_paths; ++path) {
      const TrajectoryRecord r1 = solve(u0, path);
      const TrajectoryRecord r2 = solve(u0b, path);
      samples.push_back(sup_distance_power(r1.states, r2.states, cfg.p, cfg.q,
                                           cfg.alpha, r1.times));
    }
    rep.perturbation.push_back(denom);
    rep.constant.push_back(power_mean(samples, cfg.p).value / denom);
  }
  rep.variation = band_variation(rep.constant);
  rep.pass = rep.variation < 0.50;
  return rep;
}

DependenceStudyReport two_noise_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const std::vector<GridFunction>& base_columns,
    const GridFunction& column_perturbation, const std::vector<double>& deltas,
    const DirichletLaplacian& a, const GridFunction& u0,
    const WienerDriver& wd, std::size_t n_paths) {
  DependenceStudyReport rep;
  const DiffusionCoefficient b1 = DiffusionCoefficient::additive(base_columns);
  for (double delta : deltas) {
    std::vector<GridFunction> cols = base_columns;
    for (std::size_t i = 0; i < cols.front().size(); ++i)
      cols.front()[i] += delta * column_perturbation[i];
    const DiffusionCoefficient b2 = DiffusionCoefficient::additive(cols);

    NoiseOperatorValue diff;
    diff.columns.push_back(delta * column_perturbation);
    const double denom = std::sqrt(cfg.T) * gamma_norm(diff, cfg.q);

    std::vector<double> samples;
    samples.reserve(n_paths);
    for (std::size_t path = 0; path < n_paths; ++path) {
      const TrajectoryRecord r1 = solve_proximal(cfg, f, b1, a, u0, wd, path);
      const TrajectoryRecord r2 = solve_proximal(cfg, f, b2, a, u0, wd, path);
      samples.push_back(sup_distance_power(r1.states, r2.states, cfg.p, cfg.q,
                                           cfg.alpha, r1.times));
    }
    rep.perturbation.push_back(delta);
    rep.constant.push_back(power_mean(samples, cfg.p).value / denom);
  }
  rep.variation = band_variation(rep.constant);
  rep.pass = rep.variation < 0.50;
  return rep;
}

MaximalInequalityReport maximal_inequality_study(
    const DirichletLaplacian& a, const std::vector<GridFunction>& g_columns,
    const std::vector<double>& p_list, const std::vector<double>& scales,
    double q, const SolverConfig& cfg, const WienerDriver& wd,
    std::size_t n_paths) {
  MaximalInequalityReport rep;
  const double base_gn = gamma_norm(NoiseOperatorValue{g_columns}, q);

  // simulate once at unit scale; c G scales every path exactly by c
  const DiffusionCoefficient g = DiffusionCoefficient::additive(g_columns);
  std::vector<double> per_path_sup(n_paths);
  for (std::size_t path = 0; path < n_paths; ++path) {
    const TrajectoryRecord rec = stochastic_convolution(a, g, wd, path, cfg);
    double sup = 0.0;
    for (const auto& u : rec.states) sup = std::max(sup, norm_q(u, q));
    per_path_sup[path] = sup;
  }

  rep.scale_invariant = true;
  rep.bounded = true;
  for (double p : p_list) {
    double reference = -1.0;
    for (double c : scales) {
      double num = 0.0;
      for (double s : per_path_sup)
        num += std::pow(c * s, p);
      num /= static_cast<double>(n_paths);
      const double den =
          std::pow(cfg.T * c * c * base_gn * base_gn, 0.5 * p);
      const double ratio = den == 0.0 ? 0.0 : num / den;
      rep.rows.push_back({p, c, ratio});
      if (reference < 0.0)
        reference = ratio;
      else if (std::abs(ratio - reference) >
               1e-12 * std::max(1.0, std::abs(reference)))
        rep.scale_invariant = false;
      if (!(ratio < 50.0)) rep.bounded = false;
    }
  }
  rep.pass = rep.scale_invariant && rep.bounded;
  return rep;
}

namespace {

IntegrabilityReport::Row certificate_row(
    std::string label, const SolverConfig& cfg, double lambda,
    const MonotoneGraph& f, const CompositeGraphs& comp,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::size_t n_paths) {
  IntegrabilityReport::Row row;
  row.label = std::move(label);
  SolverConfig c = cfg;
  c.lambda = lambda;
  const std::size_t steps = c.steps();
  const std::size_t stride = std::max<std::size_t>(1, steps / 64);
  const double h = u0.h();
  for (std::size_t path = 0; path < n_paths; ++path) {
    const TrajectoryRecord rec =
        lambda > 0.0 ? solve_regularized(c, f, b, a, u0, wd, path)
                     : solve_proximal(c, f, b, a, u0, wd, path);
    for (std::size_t k = 0; k < steps; ++k)
      row.pairing += c.dt * inner(phi_q_grad(rec.states[k + 1], c.q),
                                  rec.selections[k]);
    for (std::size_t k = 0; k < steps; k += stride) {
      const double w = c.dt * static_cast<double>(
                                  std::min(stride, steps - k));
      for (std::size_t i = 0; i < u0.size(); ++i) {
        row.potential += w * h * comp.F_hat(rec.states[k + 1][i]);
        row.conjugate += w * h * comp.F_tilde_star(rec.selections[k][i]);
      }
    }
  }
  const double n = static_cast<double>(n_paths);
  row.pairing /= n;
  row.potential /= n;
  row.conjugate /= n;
  return row;
}

}  // namespace

IntegrabilityReport selection_integrability_certificate(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const CompositeGraphs& comp, const DiffusionCoefficient& b,
    const DirichletLaplacian& a, const GridFunction& u0,
    const std::vector<double>& extra_lambdas, const WienerDriver& wd,
    std::size_t n_paths) {
  IntegrabilityReport rep;
  for (double dt : {cfg.dt, 0.5 * cfg.dt}) {
    SolverConfig c = cfg;
    c.dt = dt;
    rep.rows.push_back(certificate_row(cat("dt=", dt, " lambda=prox"), c, 0.0,
                                       f, comp, b, a, u0, wd, n_paths));
    for (double lam : extra_lambdas)
      rep.rows.push_back(certificate_row(cat("dt=", dt, " lambda=", lam), c,
                                         lam, f, comp, b, a, u0, wd,
                                         n_paths));
  }
  std::vector<double> pair_col, pot_col, conj_col;
  for (const auto& r : rep.rows) {
    pair_col.push_back(r.pairing);
    pot_col.push_back(r.potential);
    conj_col.push_back(r.conjugate);
  }
  rep.max_variation = std::max({band_variation(pair_col),
                                band_variation(pot_col),
                                band_variation(conj_col)});
  rep.pass = rep.max_variation < 0.25;
  return rep;
}

double fenchel_young_on_paths(std::span<const TrajectoryRecord> paths,
                              const CompositeGraphs& comp, double q,
                              std::size_t checkpoint_stride) {
  double worst = 0.0;
  for (const auto& rec : paths) {
    for (std::size_t k = 0; k < rec.step_count(); k += checkpoint_stride) {
      const GridFunction& u = rec.states[k + 1];
      const GridFunction& g = rec.selections[k];
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = phi_q(q, u[i]);
        const double viol =
            std::abs(g[i] * v - comp.F_tilde(v) - comp.F_tilde_star(g[i]));
        worst = std::max(worst, viol);
      }
    }
  }
  return worst;
}

GammaContractionReport gamma_contraction_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::size_t n_paths,
    std::size_t n_outer) {
  GammaContractionReport rep;
  std::vector<std::vector<double>> samples(n_outer);
  for (std::size_t path = 0; path < n_paths; ++path) {
    const std::vector<TrajectoryRecord> its =
        gamma_iteration(cfg, f, b, a, u0, wd, path, n_outer);
    for (std::size_t n = 1; n < its.size(); ++n)
      samples[n - 1].push_back(sup_distance_power(its[n - 1].states,
                                                  its[n].states, cfg.p, cfg.q,
                                                  cfg.alpha, its[n].times));
  }
  std::vector<MonteCarloEstimate> dists;
  for (auto& s : samples) dists.push_back(power_mean(s, cfg.p));
  for (const auto& d : dists) rep.iterate_distance.push_back(d.value);
  rep.pass = true;
  for (std::size_t n = 1; n < dists.size(); ++n) {
    const double prev_low = dists[n - 1].value - dists[n - 1].half_width;
    const double cur_high = dists[n].value + dists[n].half_width;
    const double ratio = dists[n - 1].value > 0.0
                             ? dists[n].value / dists[n - 1].value
                             : 0.0;
    rep.ratio.push_back(ratio);
    const double upper = prev_low > 0.0 ? cur_high / prev_low : 0.0;
    rep.max_ratio_upper95 = std::max(rep.max_ratio_upper95, upper);
  }
  rep.pass = rep.max_ratio_upper95 < 1.0;
  return rep;
}

}  // namespace spde
