#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "spde/monotone_graph.hpp"
#include "spde/rng.hpp"

using namespace spde;

namespace {

double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
               double lo, double hi) {
  const double u = to_unit(mix64(combine(combine(seed, a), b)));
  return lo + (hi - lo) * u;
}

std::vector<MonotoneGraph> builtin_graphs() {
  std::vector<MonotoneGraph> gs;
  gs.push_back(make_graph("identity"));
  gs.push_back(make_graph("sign"));
  gs.push_back(make_graph("power:3"));
  gs.push_back(make_graph("signed_power:3"));
  gs.push_back(make_graph("signed_power:2"));
  gs.push_back(make_graph("step_plus_power:2"));
  return gs;
}

}  // namespace

TEST_CASE("registry resolvents match closed-form values") {
  const MonotoneGraph id = make_graph("identity");
  CHECK(id.resolvent(1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  const MonotoneGraph sg = make_graph("sign");
  CHECK(sg.resolvent(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sg.resolvent(0.5, 0.3) == doctest::Approx(0.0));
  CHECK(sg.resolvent(0.5, -1.0) == doctest::Approx(-0.5).epsilon(1e-12));

  const MonotoneGraph cube = make_graph("power:3");
  CHECK(cube.resolvent(1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("closed-form hooks agree with generic bisection") {
  for (const MonotoneGraph& g : builtin_graphs()) {
    MonotoneGraph plain(g.name(), [&g](double x) { return g(x); },
                        g.growth_exponent(), g.growth_constant(),
                        g.jump_points());
    for (int s = 0; s < 50; ++s) {
      const double x = uniform(1, s, 0, -4.0, 4.0);
      const double lam = uniform(1, s, 1, 0.01, 2.0);
      CHECK(g.resolvent(lam, x) ==
            doctest::Approx(plain.resolvent(lam, x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("yosida values and fixed point at zero") {
  const MonotoneGraph id = make_graph("identity");
  CHECK(id.yosida(1.0, 2.0) == doctest::Approx(1.0));
  const MonotoneGraph sg = make_graph("sign");
  CHECK(sg.yosida(0.5, 0.3) == doctest::Approx(0.6));
  for (const MonotoneGraph& g : builtin_graphs())
    CHECK(g.yosida(0.7, 0.0) == doctest::Approx(0.0).epsilon(1e-11));
}

TEST_CASE("regularization properties on sampled points") {
  for (const MonotoneGraph& g : builtin_graphs()) {
    for (int s = 0; s < 200; ++s) {
      const double x = uniform(2, s, 0, -5.0, 5.0);
      const double y = uniform(2, s, 1, -5.0, 5.0);
      const double lam = uniform(2, s, 2, 1e-3, 2.0);
      const double jx = g.resolvent(lam, x);
      const double jy = g.resolvent(lam, y);
      // resolvent contraction
      CHECK(std::abs(jx - jy) <= std::abs(x - y) + 1e-9);
      // Yosida Lipschitz bound 2/lambda
      const double fx = (x - jx) / lam;
      const double fy = (y - jy) / lam;
      CHECK(std::abs(fx - fy) <= 2.0 / lam * std::abs(x - y) + 1e-9);
      // minimal-section bound
      CHECK(std::abs(fx) <= std::abs(g.minimal_section(x)) + 1e-9);
      // inclusion f_lambda(x) in f(J_lambda x)
      CHECK(g(jx).contains(fx, 1e-8));
    }
    // resolvent convergence as lambda -> 0
    for (double x : {-2.5, 0.7, 3.0}) {
      double prev = 1e100;
      for (double lam : {1.0, 0.1, 0.01, 0.001}) {
        const double gap = std::abs(g.resolvent(lam, x) - x);
        CHECK(gap <= prev + 1e-12);
        prev = gap;
      }
      CHECK(prev <= 0.001 * std::abs(g.minimal_section(x)) + 1e-9);
    }
  }
}

TEST_CASE("maximal monotone extension fills jumps") {
  const MonotoneGraph cube = extend_increasing(
      [](double x) { return x * x * x; }, {}, 3.0, 1.0, "cube");
  CHECK(cube(1.5).lo == doctest::Approx(1.5 * 1.5 * 1.5));
  CHECK(cube(1.5).hi == doctest::Approx(1.5 * 1.5 * 1.5));

  const MonotoneGraph sg = extend_increasing(
      [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }, {0.0}, 1.0,
      1.0, "sgn0");
  CHECK(sg(0.0).lo == doctest::Approx(-1.0));
  CHECK(sg(0.0).hi == doctest::Approx(1.0));

  const MonotoneGraph stairs = extend_increasing(
      [](double x) { return x + std::floor(x); }, {0.0}, 1.0, 3.0, "stairs");
  CHECK(stairs(0.0).lo == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(stairs(0.0).hi == doctest::Approx(0.0).epsilon(1e-6));

  CHECK_THROWS_AS(extend_increasing([](double x) { return -x; }, {}, 1.0, 1.0),
                  GraphError);
}

TEST_CASE("potentials integrate the minimal section") {
  const ConvexPotential fid = potential_from_graph(make_graph("identity"));
  CHECK(fid(2.0) == doctest::Approx(2.0));
  const ConvexPotential fsg = potential_from_graph(make_graph("sign"));
  CHECK(fsg(-3.0) == doctest::Approx(3.0));
  const ConvexPotential fcube = potential_from_graph(make_graph("power:3"));
  CHECK(fcube(2.0) == doctest::Approx(4.0));

  // quadrature path (no primitive hook) against the analytic value
  MonotoneGraph bare("bare-cube", [](double x) {
    const double y = x * x * x;
    return Interval{y, y};
  }, 3.0, 1.0);
  const ConvexPotential fq = potential_from_graph(bare);
  CHECK(fq(2.0) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(fq(-1.3) == doctest::Approx(std::pow(1.3, 4) / 4).epsilon(1e-9));
}

TEST_CASE("conjugates: frozen values, Fenchel-Young, biconjugation") {
  const ConvexPotential half_sq = potential_from_graph(make_graph("identity"));
  CHECK(conjugate(half_sq, 3.0) == doctest::Approx(4.5).epsilon(1e-8));

  const ConvexPotential quart =
      potential_from_graph(make_graph("signed_power:3"));  // x^4/4
  CHECK(conjugate(quart, 2.0) ==
        doctest::Approx(0.75 * std::pow(2.0, 4.0 / 3.0)).epsilon(1e-8));

  const ConvexPotential abs_pot = potential_from_graph(make_graph("sign"));
  CHECK(conjugate(abs_pot, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(conjugate(abs_pot, 1.0) == doctest::Approx(0.0).epsilon(1e-9));

  for (const ConvexPotential* F : {&half_sq, &quart}) {
    const ConvexPotential Fs = conjugate_potential(*F);
    for (double x = -2.0; x <= 2.0; x += 0.5)
      for (double y = -2.0; y <= 2.0; y += 0.5) {
        CHECK(x * y <= (*F)(x) + Fs(y) + 1e-8);
        const Interval dfx = F->subgradient(x);
        if (dfx.contains(y))
          CHECK(x * y == doctest::Approx((*F)(x) + Fs(y)).epsilon(1e-7));
      }
    // biconjugation
    const ConvexPotential Fss = conjugate_potential(Fs);
    for (double x = -2.0; x <= 2.0; x += 0.25)
      CHECK(Fss(x) == doctest::Approx((*F)(x)).epsilon(1e-6));
  }

  // superlinearity of F* for full-domain polynomial graphs
  const ConvexPotential qs = conjugate_potential(quart);
  double prev = 0.0;
  for (double y : {10.0, 100.0, 1000.0}) {
    const double ratio = qs(y) / y;
    CHECK(ratio > prev);
    prev = ratio;
  }
  CHECK(prev > 5.0);
}

TEST_CASE("q-power maps and their inverses") {
  CHECK(phi_q(2.0, -1.7) == doctest::Approx(-1.7));
  CHECK(phi_q(4.0, 2.0) == doctest::Approx(8.0));
  CHECK(phi_q_inverse(4.0, 8.0) == doctest::Approx(2.0));
  CHECK(phi_q(3.0, -2.0) == doctest::Approx(-4.0));
  for (double q : {2.0, 3.0, 4.0, 6.0})
    for (double x = -3.0; x <= 3.0; x += 0.37)
      CHECK(phi_q_inverse(q, phi_q(q, x)) == doctest::Approx(x).epsilon(1e-10));
  CHECK(phi_q_derivative(4.0, 2.0) == doctest::Approx(12.0));
}

TEST_CASE("composite family of drift and q-power") {
  const CompositeGraphs c2 = composite_graphs(make_graph("identity"), 2.0);
  CHECK(c2.F_hat(2.0) == doctest::Approx(2.0));
  CHECK(c2.f_tilde(1.5).lo == doctest::Approx(1.5));

  const CompositeGraphs cc = composite_graphs(make_graph("power:3"), 2.0);
  CHECK(cc.F_hat(2.0) == doctest::Approx(4.0));
  CHECK(cc.F_tilde_star(8.0) == doctest::Approx(12.0).epsilon(1e-7));

  const CompositeGraphs cs = composite_graphs(make_graph("sign"), 4.0);
  CHECK(cs.F_hat(2.0) == doctest::Approx(8.0).epsilon(1e-8));
  CHECK(cs.F_tilde(8.0) == doctest::Approx(8.0).epsilon(1e-8));  // |v|

  // subgradient of F_hat equals f * phi_q' at continuity points
  const MonotoneGraph f = make_graph("signed_power:2");
  const CompositeGraphs cf = composite_graphs(f, 4.0);
  for (double x : {-2.0, -0.5, 0.7, 1.8}) {
    const double expected = f.minimal_section(x) * phi_q_derivative(4.0, x);
    CHECK(cf.F_hat.subgradient(x).lo == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("symmetry reports") {
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(0.1 * i);

  const ConvexPotential half_sq = potential_from_graph(make_graph("identity"));
  CHECK(check_symmetry(half_sq, grid).symmetric);
  CHECK(check_symmetry(potential_from_graph(make_graph("sign")), grid)
            .symmetric);

  const ConvexPotential skew(
      [](double x) { return 0.5 * x * x + (x > 0 ? x * x * x : 0.0); },
      [](double x) { return Interval{x, x}; });
  const SymmetryReport rep = check_symmetry(skew, grid);
  CHECK_FALSE(rep.symmetric);
  CHECK(std::abs(skew(1.0) - skew(-1.0)) == doctest::Approx(1.0));
}

TEST_CASE("growth bound on sampled minimal sections") {
  for (const MonotoneGraph& g : builtin_graphs())
    for (int s = 0; s < 200; ++s) {
      const double x = uniform(3, s, 0, -6.0, 6.0);
      CHECK(std::abs(g.minimal_section(x)) <=
            g.growth_constant() *
                (1.0 + std::pow(std::abs(x), g.growth_exponent())) + 1e-12);
    }
}
