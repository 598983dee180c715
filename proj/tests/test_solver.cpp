#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "spde/mild_solver.hpp"
#include "spde/rng.hpp"

using namespace spde;

namespace {

MonotoneGraph zero_graph() {
  return MonotoneGraph("zero", [](double) { return Interval{0.0, 0.0}; }, 1.0,
                       1e-300);
}

GridFunction random_grid(std::size_t m, std::uint64_t tag, double scale = 1.0) {
  GridFunction u(m);
  for (std::size_t i = 0; i < m; ++i)
    u[i] = scale * counter_normal(21, tag, i, 0);
  return u;
}

double sup_state_distance(const TrajectoryRecord& a, const TrajectoryRecord& b,
                          double q) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.states.size(); ++j)
    d = std::max(d, norm_q(a.states[j] - b.states[j], q));
  return d;
}

}  // namespace

TEST_CASE("stochastic convolution reduces to a scalar recursion per mode") {
  DirichletLaplacian a(31);
  const double c = 0.7;
  const DiffusionCoefficient g =
      DiffusionCoefficient::additive({c * a.eigenvector(1)});
  const WienerDriver wd(1, 2024);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const TrajectoryRecord rec = stochastic_convolution(a, g, wd, 1, cfg);

  const double decay = std::exp(-cfg.dt * a.eigenvalue(1));
  double coeff = 0.0;
  const GridFunction v1 = a.eigenvector(1);
  for (std::size_t k = 0; k < cfg.steps(); ++k) {
    coeff = decay * (coeff + c * rec.increments[k][0]);
    double ck = 0.0;  // modal coefficient 2h <u, v_1>
    for (std::size_t i = 0; i < 31; ++i) ck += rec.states[k + 1][i] * v1[i];
    ck *= 2.0 * rec.states[k + 1].h();
    CHECK(ck == doctest::Approx(coeff).epsilon(1e-11));
  }

  // zero coefficient keeps the convolution at the origin
  const DiffusionCoefficient z =
      DiffusionCoefficient::additive({GridFunction(31)});
  const TrajectoryRecord recz = stochastic_convolution(a, z, wd, 1, cfg);
  for (const auto& u : recz.states) CHECK(norm_q(u, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("discrete ito isometry for the convolution endpoint") {
  DirichletLaplacian a(31);
  const double c = 1.3;
  const DiffusionCoefficient g =
      DiffusionCoefficient::additive({c * a.eigenvector(2)});
  const WienerDriver wd(1, 77);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const std::size_t kk = cfg.steps();
  const double mu = a.eigenvalue(2);
  double expect_coeff_sq = 0.0;
  for (std::size_t j = 0; j < kk; ++j)
    expect_coeff_sq +=
        c * c * cfg.dt *
        std::exp(-2.0 * mu * cfg.dt * static_cast<double>(kk - j));
  const double expect = 0.5 * expect_coeff_sq;  // ||v_2||_2^2 = 1/2

  const std::size_t n = 3000;
  double mean = 0.0;
  for (std::size_t path = 1; path <= n; ++path) {
    const TrajectoryRecord rec = stochastic_convolution(a, g, wd, path, cfg);
    const double nm = norm_q(rec.states.back(), 2.0);
    mean += nm * nm;
  }
  mean /= static_cast<double>(n);
  CHECK(mean == doctest::Approx(expect).epsilon(0.12));
}

TEST_CASE("deterministic linear decay with inactive drift") {
  DirichletLaplacian a(63);
  const DiffusionCoefficient off =
      DiffusionCoefficient::additive({GridFunction(63)});
  const WienerDriver wd(1, 5);
  SolverConfig cfg;
  cfg.T = 0.1;
  cfg.dt = 1e-3;
  cfg.lambda = 0.5;
  const GridFunction v1 = a.eigenvector(1);

  const TrajectoryRecord rec =
      solve_regularized(cfg, zero_graph(), off, a, v1, wd, 1);
  const double factor =
      std::pow(1.0 + cfg.dt * a.eigenvalue(1), -static_cast<double>(cfg.steps()));
  for (std::size_t i = 0; i < 63; i += 8)
    CHECK(rec.states.back()[i] == doctest::Approx(factor * v1[i]).epsilon(1e-10));

  // discontinuous drift fixed at the origin keeps the origin
  const TrajectoryRecord z =
      solve_regularized(cfg, make_graph("sign"), off, a, GridFunction(63), wd, 1);
  for (const auto& u : z.states) CHECK(norm_q(u, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("proximal step soft-thresholds and records exact selections") {
  DirichletLaplacian a(63);
  const DiffusionCoefficient off =
      DiffusionCoefficient::additive({GridFunction(63)});
  const WienerDriver wd(1, 6);
  const MonotoneGraph sg = make_graph("sign");
  SolverConfig cfg;
  cfg.T = 1e-3;
  cfg.dt = 1e-3;
  const GridFunction u0 = random_grid(63, 1, 0.01);

  const TrajectoryRecord one = solve_proximal(cfg, sg, off, a, u0, wd, 1);
  const GridFunction v = a.resolvent_apply(cfg.dt, u0);
  for (std::size_t i = 0; i < 63; ++i) {
    const double shrunk =
        std::abs(v[i]) <= cfg.dt ? 0.0
                                 : v[i] - cfg.dt * (v[i] > 0 ? 1.0 : -1.0);
    CHECK(one.states[1][i] == doctest::Approx(shrunk).epsilon(1e-12));
  }

  // graph consistency of selections along a noisy run
  const DiffusionCoefficient noisy = DiffusionCoefficient::nemytskii_diagonal(
      {[](double x) { return 0.5 * std::sin(x) + 0.2; }}, {1.0}, 0.5);
  cfg.T = 0.05;
  const TrajectoryRecord run = solve_proximal(cfg, sg, noisy, a, u0, wd, 3);
  for (std::size_t k = 0; k < run.step_count(); ++k)
    for (std::size_t i = 0; i < 63; ++i)
      CHECK(sg(run.states[k + 1][i]).contains(run.selections[k][i], 1e-9));
}

TEST_CASE("yosida scheme approaches the proximal scheme as lambda vanishes") {
  DirichletLaplacian a(31);
  const MonotoneGraph f = make_graph("signed_power:3");
  const DiffusionCoefficient b = DiffusionCoefficient::nemytskii_diagonal(
      {[](double x) { return 0.3 * std::cos(x); }}, {1.0}, 0.3);
  const WienerDriver wd(1, 321);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const GridFunction u0 = 0.5 * a.eigenvector(1);

  // the two schemes differ by O(lambda + dt); with lambda well below dt
  // the gap saturates at the scheme difference instead of vanishing
  const TrajectoryRecord prox = solve_proximal(cfg, f, b, a, u0, wd, 9);
  for (double lam : {1e-1, 1e-2, 1e-3}) {
    SolverConfig c2 = cfg;
    c2.lambda = lam;
    const TrajectoryRecord reg = solve_regularized(c2, f, b, a, u0, wd, 9);
    const double d = sup_state_distance(reg, prox, 2.0);
    CHECK(d <= 0.05 * (lam + cfg.dt));
    if (lam <= cfg.dt) CHECK(d < 1e-4);
  }
}

TEST_CASE("picard sweeps contract for lipschitz drift") {
  DirichletLaplacian a(31);
  const DiffusionCoefficient b = DiffusionCoefficient::nemytskii_diagonal(
      {[](double x) { return 0.4 * std::sin(x); }}, {1.0}, 0.4);
  const WienerDriver wd(1, 404);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const GridFunction u0 = random_grid(31, 2, 0.3);

  FixedPointLog log;
  const TrajectoryRecord rec = solve_lipschitz_fixed_point(
      cfg, [](double x) { return std::sin(x); }, b, a, u0, wd, 4, 50, 1e-12,
      &log);
  CHECK(log.converged);
  CHECK(log.iterations >= 3);
  for (std::size_t i = 1; i + 1 < log.ratio.size(); ++i)
    CHECK(log.ratio[i] < 1.0);
  CHECK(rec.states.size() == cfg.steps() + 1);

  // state-independent right-hand side converges in two sweeps
  const DiffusionCoefficient add =
      DiffusionCoefficient::additive({0.2 * a.eigenvector(1)});
  FixedPointLog fast;
  solve_lipschitz_fixed_point(cfg, [](double) { return 0.0; }, add, a, u0, wd,
                              4, 50, 1e-12, &fast);
  CHECK(fast.iterations <= 2);
}

TEST_CASE("outer iteration collapses for state-independent noise") {
  DirichletLaplacian a(31);
  const MonotoneGraph f = make_graph("sign");
  const WienerDriver wd(1, 500);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const GridFunction u0 = random_grid(31, 3, 0.2);

  const DiffusionCoefficient add =
      DiffusionCoefficient::additive({0.3 * a.eigenvector(2)});
  const auto its = gamma_iteration(cfg, f, add, a, u0, wd, 7, 3);
  REQUIRE(its.size() == 4);
  CHECK(sup_state_distance(its[1], its[2], 2.0) == doctest::Approx(0.0));
  CHECK(sup_state_distance(its[2], its[3], 2.0) == doctest::Approx(0.0));

  const DiffusionCoefficient off =
      DiffusionCoefficient::additive({GridFunction(31)});
  const auto quiet = gamma_iteration(cfg, f, off, a, u0, wd, 7, 2);
  CHECK(sup_state_distance(quiet[1], quiet[2], 2.0) == doctest::Approx(0.0));
}

TEST_CASE("variation-of-constants defect: exact for exponential euler") {
  DirichletLaplacian a(31);
  const DiffusionCoefficient g =
      DiffusionCoefficient::additive({0.8 * a.eigenvector(1),
                                      0.4 * a.eigenvector(3)});
  const WienerDriver wd(2, 808);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const TrajectoryRecord rec = stochastic_convolution(a, g, wd, 4, cfg);
  CHECK(mild_residual(rec, a, 0.0, GridFunction(31), 2.0) < 1e-12);
}

TEST_CASE("variation-of-constants defect shrinks at first order in dt") {
  DirichletLaplacian a(31);
  const MonotoneGraph f = make_graph("signed_power:3");
  const DiffusionCoefficient b = DiffusionCoefficient::nemytskii_diagonal(
      {[](double x) { return 0.3 * std::cos(x); }}, {1.0}, 0.3);
  const WienerDriver wd(1, 909);
  const GridFunction u0 = 0.5 * a.eigenvector(1);
  double res[2];
  int i = 0;
  for (double dt : {1e-3, 5e-4}) {
    SolverConfig cfg;
    cfg.T = 0.05;
    cfg.dt = dt;
    const TrajectoryRecord rec = solve_proximal(cfg, f, b, a, u0, wd, 11);
    res[i++] = mild_residual(rec, a, 0.0, u0, 2.0);
  }
  CHECK(res[0] / res[1] == doctest::Approx(2.0).epsilon(0.5));
}

TEST_CASE("energy inequality slack on deterministic contractions") {
  DirichletLaplacian a(63);
  const DiffusionCoefficient off =
      DiffusionCoefficient::additive({GridFunction(63)});
  const WienerDriver wd(1, 42);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const GridFunction u0 = random_grid(63, 4, 0.5);

  for (double q : {2.0, 4.0}) {
    SolverConfig c2 = cfg;
    c2.q = q;
    const TrajectoryRecord rec =
        solve_proximal(c2, make_graph("sign"), off, a, u0, wd, 1);
    const auto slack = ito_inequality_residual(rec, 0.0, q);
    for (double s : slack) CHECK(s >= -1e-12);
  }

  // the zero trajectory has identically zero slack
  const TrajectoryRecord z =
      solve_proximal(cfg, make_graph("sign"), off, a, GridFunction(63), wd, 1);
  for (double s : ito_inequality_residual(z, 0.0, 2.0))
    CHECK(s == doctest::Approx(0.0));
}

TEST_CASE("bitwise reproducibility and unconditional norm decay") {
  DirichletLaplacian a(63);
  const MonotoneGraph f = make_graph("step_plus_power:2");
  const DiffusionCoefficient b = DiffusionCoefficient::nemytskii_diagonal(
      {[](double x) { return 0.5 * std::sin(x); }}, {1.0}, 0.5);
  const WienerDriver wd(1, 606);
  SolverConfig cfg;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  const GridFunction u0 = random_grid(63, 5, 0.4);

  const TrajectoryRecord r1 = solve_proximal(cfg, f, b, a, u0, wd, 13);
  const TrajectoryRecord r2 = solve_proximal(cfg, f, b, a, u0, wd, 13);
  for (std::size_t j = 0; j < r1.states.size(); ++j)
    CHECK(r1.states[j].values == r2.states[j].values);

  // with noise off and no reaction term every step is a contraction
  const DiffusionCoefficient off =
      DiffusionCoefficient::additive({GridFunction(63)});
  for (double q : {1.0, 2.0, 4.0}) {
    const TrajectoryRecord det = solve_proximal(cfg, f, off, a, u0, wd, 13);
    for (std::size_t j = 0; j < det.step_count(); ++j)
      CHECK(norm_q(det.states[j + 1], q) <= norm_q(det.states[j], q) + 1e-12);
  }
}

TEST_CASE("yosida approximations are ordered in the parameter") {
  for (const char* name : {"sign", "power:3", "step_plus_power:2"}) {
    const MonotoneGraph g = make_graph(name);
    for (double x = -3.0; x <= 3.0; x += 0.41)
      CHECK(std::abs(g.yosida(0.5, x)) <= std::abs(g.yosida(0.05, x)) + 1e-10);
  }
}
