#include "spde/monotone_graph.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "spde/strfmt.hpp"
#include <utility>

namespace spde {

namespace {

constexpr double kResolventTol = 1e-12;
constexpr double kGoldenTol = 1e-10;
constexpr double kLimitOffset = 1e-9;

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGlNode[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                               0.9061798459386640, -0.9061798459386640};
constexpr double kGlWeight[5] = {0.5688888888888889, 0.4786286704993665,
                                 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};

double gl5(const std::function<double(double)>& g, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += kGlWeight[i] * g(c + r * kGlNode[i]);
  return r * s;
}

// Table-accelerated primitive x -> int_0^x g, exact per-cell quadrature
// with declared discontinuities snapped to cell edges.
class CumulativePrimitive {
 public:
  CumulativePrimitive(std::function<double(double)> g,
                      std::vector<double> breakpoints, double range, int cells)
      : g_(std::move(g)), range_(range) {
    edges_.reserve(static_cast<std::size_t>(cells) + breakpoints.size() + 3);
    for (int i = 0; i <= cells; ++i)
      edges_.push_back(-range + 2.0 * range * i / cells);
    edges_.push_back(0.0);
    for (double b : breakpoints)
      if (std::abs(b) < range) edges_.push_back(b);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    cum_.assign(edges_.size(), 0.0);
    const auto zero = static_cast<std::size_t>(
        std::lower_bound(edges_.begin(), edges_.end(), 0.0) - edges_.begin());
    for (std::size_t i = zero; i + 1 < edges_.size(); ++i)
      cum_[i + 1] = cum_[i] + gl5(g_, edges_[i], edges_[i + 1]);
    for (std::size_t i = zero; i > 0; --i)
      cum_[i - 1] = cum_[i] - gl5(g_, edges_[i - 1], edges_[i]);
  }

  double operator()(double x) const {
    if (std::abs(x) >= range_)
      throw GraphError(cat("potential quadrature: argument ", x,
                           " outside tabulated range ", range_));
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const auto idx = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return cum_[idx] + gl5(g_, edges_[idx], x);
  }

  double range() const { return range_; }

 private:
  std::function<double(double)> g_;
  double range_;
  std::vector<double> edges_;
  std::vector<double> cum_;
};

double signed_pow(double x, double a) {
  return x >= 0 ? std::pow(x, a) : -std::pow(-x, a);
}

// Newton for t + lambda * t^d = rhs, t >= 0, rhs >= 0. The map is
// increasing and convex, so iteration from t = rhs is monotone.
double power_resolvent_abs(double d, double lambda, double rhs) {
  if (rhs <= 0.0) return 0.0;
  double t = rhs;
  for (int it = 0; it < 200; ++it) {
    const double td = std::pow(t, d);
    const double f = t + lambda * td - rhs;
    if (std::abs(f) < kResolventTol * (1.0 + rhs)) break;
    const double fp = 1.0 + lambda * d * (t > 0 ? td / t : 0.0);
    double step = f / fp;
    if (t - step < 0.0) step = t * 0.5;
    t -= step;
  }
  return t;
}

}  // namespace

MonotoneGraph::MonotoneGraph(std::string name, EvalFn eval,
                             double growth_exponent, double growth_constant,
                             std::vector<double> jump_points)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      d_(growth_exponent),
      c_(growth_constant),
      jumps_(std::move(jump_points)) {
  if (d_ < 1.0) throw GraphError("growth exponent must be >= 1");
  if (c_ <= 0.0) throw GraphError("growth constant must be > 0");
  std::sort(jumps_.begin(), jumps_.end());
}

double MonotoneGraph::minimal_section(double x) const {
  const Interval i = eval_(x);
  if (i.lo <= 0.0 && i.hi >= 0.0) return 0.0;
  return i.lo > 0.0 ? i.lo : i.hi;
}

double MonotoneGraph::resolvent(double lambda, double x) const {
  if (lambda <= 0.0) throw GraphError("resolvent requires lambda > 0");
  if (hook_) return hook_(lambda, x);
  const double reach = lambda * c_ * (1.0 + std::pow(std::abs(x), d_)) + 1.0;
  double lo = x - reach;
  double hi = x + reach;
  if (lo + lambda * eval_(lo).lo > x || hi + lambda * eval_(hi).hi < x)
    throw GraphError(cat("resolvent bracket failed for graph '", name_,
                         "' at x=", x, ", lambda=", lambda,
                         " (growth bound violated?)"));
  while (hi - lo > kResolventTol) {
    const double mid = 0.5 * (lo + hi);
    const Interval i = eval_(mid);
    if (mid + lambda * i.hi < x) {
      lo = mid;
    } else if (mid + lambda * i.lo > x) {
      hi = mid;
    } else {
      return mid;  // x in mid + lambda f(mid): exact hit at a jump
    }
  }
  return 0.5 * (lo + hi);
}

double MonotoneGraph::yosida(double lambda, double x) const {
  return (x - resolvent(lambda, x)) / lambda;
}

MonotoneGraph extend_increasing(const std::function<double(double)>& g0,
                                std::vector<double> jump_points,
                                double growth_exponent, double growth_constant,
                                std::string name) {
  // monotonicity scan over the working range
  constexpr double kLo = -8.0, kHi = 8.0;
  constexpr int kSamples = 512;
  double prev_x = kLo, prev_y = g0(kLo);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = kLo + (kHi - kLo) * i / kSamples;
    const double y = g0(x);
    if (y < prev_y - 1e-12)
      throw GraphError(cat("extend_increasing: non-monotone sample g0(",
                           prev_x, ")=", prev_y, " > g0(", x, ")=", y));
    prev_x = x;
    prev_y = y;
  }
  std::sort(jump_points.begin(), jump_points.end());
  auto jumps = jump_points;
  auto eval = [g0, jumps](double x) -> Interval {
    auto it = std::lower_bound(jumps.begin(), jumps.end(), x - kLimitOffset);
    if (it != jumps.end() && std::abs(*it - x) <= kLimitOffset)
      return {g0(*it - kLimitOffset), g0(*it + kLimitOffset)};
    const double y = g0(x);
    return {y, y};
  };
  return MonotoneGraph(std::move(name), eval, growth_exponent, growth_constant,
                       std::move(jump_points));
}

MonotoneGraph make_graph(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  double d = 1.0;
  if (colon != std::string::npos) d = std::stod(spec.substr(colon + 1));

  if (kind == "identity") {
    MonotoneGraph g(spec, [](double x) -> Interval { return {x, x}; }, 1.0,
                    1.0);
    g.set_resolvent_hook(
        [](double lambda, double x) { return x / (1.0 + lambda); });
    g.set_primitive([](double x) { return 0.5 * x * x; });
    return g;
  }
  if (kind == "sign") {
    MonotoneGraph g(spec,
                    [](double x) -> Interval {
                      if (x > 0.0) return {1.0, 1.0};
                      if (x < 0.0) return {-1.0, -1.0};
                      return {-1.0, 1.0};
                    },
                    1.0, 1.0, {0.0});
    g.set_resolvent_hook([](double lambda, double x) {
      if (x > lambda) return x - lambda;
      if (x < -lambda) return x + lambda;
      return 0.0;
    });
    g.set_primitive([](double x) { return std::abs(x); });
    return g;
  }
  if (kind == "power") {
    const int n = static_cast<int>(d);
    if (n < 1 || n % 2 == 0 || n != d)
      throw GraphError("power:<d> requires an odd positive integer exponent");
    MonotoneGraph g(spec,
                    [n](double x) -> Interval {
                      const double y = std::pow(x, n);
                      return {y, y};
                    },
                    static_cast<double>(n), 1.0);
    g.set_resolvent_hook([n](double lambda, double x) {
      const double t = power_resolvent_abs(n, lambda, std::abs(x));
      return x >= 0 ? t : -t;
    });
    g.set_primitive(
        [n](double x) { return std::pow(x, n + 1) / (n + 1); });
    return g;
  }
  if (kind == "signed_power") {
    if (d < 1.0) throw GraphError("signed_power:<d> requires d >= 1");
    MonotoneGraph g(spec,
                    [d](double x) -> Interval {
                      const double y = signed_pow(x, d);
                      return {y, y};
                    },
                    d, 1.0);
    g.set_resolvent_hook([d](double lambda, double x) {
      const double t = power_resolvent_abs(d, lambda, std::abs(x));
      return x >= 0 ? t : -t;
    });
    g.set_primitive(
        [d](double x) { return std::pow(std::abs(x), d + 1.0) / (d + 1.0); });
    return g;
  }
  if (kind == "step_plus_power") {
    if (d < 1.0) throw GraphError("step_plus_power:<d> requires d >= 1");
    MonotoneGraph g(spec,
                    [d](double x) -> Interval {
                      if (x > 0.0) {
                        const double y = 1.0 + std::pow(x, d);
                        return {y, y};
                      }
                      if (x < 0.0) {
                        const double y = -1.0 - std::pow(-x, d);
                        return {y, y};
                      }
                      return {-1.0, 1.0};
                    },
                    d, 2.0, {0.0});
    g.set_resolvent_hook([d](double lambda, double x) {
      if (std::abs(x) <= lambda) return 0.0;
      const double t = power_resolvent_abs(d, lambda, std::abs(x) - lambda);
      return x >= 0 ? t : -t;
    });
    g.set_primitive([d](double x) {
      return std::abs(x) + std::pow(std::abs(x), d + 1.0) / (d + 1.0);
    });
    return g;
  }
  throw GraphError("unknown graph spec: " + spec);
}

ConvexPotential potential_from_graph(const MonotoneGraph& f) {
  auto subgrad = [f](double x) { return f(x); };
  if (f.primitive()) {
    auto prim = f.primitive();
    const double at0 = prim(0.0);
    return ConvexPotential([prim, at0](double x) { return prim(x) - at0; },
                           std::move(subgrad));
  }
  auto table = std::make_shared<CumulativePrimitive>(
      [f](double r) { return f.minimal_section(r); }, f.jump_points(), 512.0,
      1 << 15);
  return ConvexPotential([table](double x) { return (*table)(x); },
                         std::move(subgrad));
}

namespace {

// shared by conjugate() and conjugate_potential(): returns {value, argmax}
std::pair<double, double> conjugate_impl(const ConvexPotential& F, double y) {
  const auto h = [&](double x) { return x * y - F(x); };
  double lo = -1.0, hi = 1.0;
  constexpr double kCap = 1e8;
  for (int iter = 0;; ++iter) {
    const double w = (hi - lo) * 1e-3;
    const double slack = 1e-12 * (1.0 + std::abs(h(lo)) + std::abs(h(hi)));
    const bool open_left = h(lo) > h(lo + w) + slack;
    const bool open_right = h(hi) > h(hi - w) + slack;
    if (!open_left && !open_right) break;
    if (iter > 60 || hi - lo > kCap)
      throw GraphError(cat("conjugate: maximizer of x*", y,
                           " - F(x) escapes every bracket"));
    if (open_left) lo = 2.0 * lo - 1.0;
    if (open_right) hi = 2.0 * hi + 1.0;
  }
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double h1 = h(x1), h2 = h(x2);
  while (b - a > kGoldenTol) {
    if (h1 < h2) {
      a = x1;
      x1 = x2;
      h1 = h2;
      x2 = a + kInvPhi * (b - a);
      h2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      h2 = h1;
      x1 = b - kInvPhi * (b - a);
      h1 = h(x1);
    }
  }
  double xs = 0.5 * (a + b);
  double vs = h(xs);
  if (h(0.0) > vs) {  // F(0) = 0 forces F* >= 0
    xs = 0.0;
    vs = h(0.0);
  }
  return {vs, xs};
}

}  // namespace

double conjugate(const ConvexPotential& F, double y) {
  return conjugate_impl(F, y).first;
}

ConvexPotential conjugate_potential(const ConvexPotential& F) {
  auto Fp = std::make_shared<ConvexPotential>(F);
  return ConvexPotential(
      [Fp](double y) { return conjugate_impl(*Fp, y).first; },
      [Fp](double y) -> Interval {
        const double x = conjugate_impl(*Fp, y).second;
        return {x, x};
      });
}

double phi_q(double q, double x) {
  if (q == 2.0) return x;
  return x * std::pow(std::abs(x), q - 2.0);
}

double phi_q_inverse(double q, double y) {
  if (q == 2.0) return y;
  if (y == 0.0) return 0.0;
  return signed_pow(y, 1.0 / (q - 1.0));
}

double phi_q_derivative(double q, double x) {
  if (q == 2.0) return 1.0;
  return (q - 1.0) * std::pow(std::abs(x), q - 2.0);
}

CompositeGraphs composite_graphs(const MonotoneGraph& f, double q) {
  if (q < 2.0) throw GraphError("composite_graphs requires q >= 2");
  if (!f(0.0).contains(0.0))
    throw GraphError("composite_graphs requires 0 in f(0)");

  std::vector<double> tilde_jumps;
  for (double j : f.jump_points()) tilde_jumps.push_back(phi_q(q, j));
  const double d_tilde = std::max(1.0, f.growth_exponent() / (q - 1.0));
  const double c_tilde =
      std::pow(2.0, f.growth_exponent()) * f.growth_constant();
  MonotoneGraph f_tilde(
      f.name() + "~",
      [f, q](double v) { return f(phi_q_inverse(q, v)); }, d_tilde, c_tilde,
      tilde_jumps);

  ConvexPotential F_hat = [&]() {
    if (q == 2.0) return potential_from_graph(f);
    auto table = std::make_shared<CumulativePrimitive>(
        [f, q](double r) {
          return f.minimal_section(r) * phi_q_derivative(q, r);
        },
        f.jump_points(), 512.0, 1 << 15);
    auto sub = [f, q](double x) -> Interval {
      const Interval i = f(x);
      const double w = phi_q_derivative(q, x);  // >= 0
      return {i.lo * w, i.hi * w};
    };
    return ConvexPotential([table](double x) { return (*table)(x); }, sub);
  }();

  ConvexPotential F_tilde(
      [F_hat, q](double v) { return F_hat(phi_q_inverse(q, v)); },
      [f_tilde](double v) { return f_tilde(v); });

  ConvexPotential F_tilde_star = conjugate_potential(F_tilde);

  return {std::move(f_tilde), std::move(F_tilde), std::move(F_tilde_star),
          std::move(F_hat)};
}

SymmetryReport check_symmetry(const ConvexPotential& F,
                              std::span<const double> grid, double tol) {
  SymmetryReport r;
  for (double x : grid) {
    const double dev = std::abs(F(x) - F(-x));
    if (dev > r.max_deviation) {
      r.max_deviation = dev;
      r.arg_max = x;
    }
  }
  r.symmetric = r.max_deviation <= tol;
  return r;
}

}  // namespace spde
