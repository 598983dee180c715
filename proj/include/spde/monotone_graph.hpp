#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// One-dimensional maximal monotone graphs: interval-valued evaluation,
// resolvents (proximal maps), Yosida approximants, and the convex
// potential / Legendre-Fenchel machinery built on top of them.

namespace spde {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const {
    return v >= lo - tol && v <= hi + tol;
  }
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MonotoneGraph {
 public:
  using EvalFn = std::function<Interval(double)>;
  using ResolventHook = std::function<double(double, double)>;
  using PrimitiveFn = std::function<double(double)>;

  MonotoneGraph(std::string name, EvalFn eval, double growth_exponent,
                double growth_constant, std::vector<double> jump_points = {});

  /// closed interval [f(x-), f(x+)]
  Interval operator()(double x) const { return eval_(x); }

  /// element of f(x) with smallest absolute value
  double minimal_section(double x) const;

  double growth_exponent() const { return d_; }
  double growth_constant() const { return c_; }
  const std::vector<double>& jump_points() const { return jumps_; }
  const std::string& name() const { return name_; }

  /// the unique y with x in y + lambda f(y); closed form where
  /// available, monotone bisection otherwise
  double resolvent(double lambda, double x) const;

  /// (x - resolvent(lambda, x)) / lambda
  double yosida(double lambda, double x) const;

  void set_resolvent_hook(ResolventHook hook) { hook_ = std::move(hook); }
  void set_primitive(PrimitiveFn primitive) { primitive_ = std::move(primitive); }
  const PrimitiveFn& primitive() const { return primitive_; }

 private:
  std::string name_;
  EvalFn eval_;
  double d_;
  double c_;
  std::vector<double> jumps_;
  ResolventHook hook_;
  PrimitiveFn primitive_;
};

/// Maximal monotone extension of a pointwise increasing function:
/// the jump at each declared discontinuity is filled with the closed
/// interval [g0(x-), g0(x+)]. Rejects non-monotone inputs.
MonotoneGraph extend_increasing(const std::function<double(double)>& g0,
                                std::vector<double> jump_points,
                                double growth_exponent, double growth_constant,
                                std::string name = "extended");

/// Registry of built-in graphs addressable by name in config files:
///   identity | sign | power:<d> | signed_power:<d> | step_plus_power:<d>
MonotoneGraph make_graph(const std::string& spec);

class ConvexPotential {
 public:
  using ValueFn = std::function<double(double)>;
  using SubgradFn = std::function<Interval(double)>;

  ConvexPotential(ValueFn value, SubgradFn subgradient)
      : value_(std::move(value)), subgradient_(std::move(subgradient)) {}

  double operator()(double x) const { return value_(x); }
  Interval subgradient(double x) const { return subgradient_(x); }

 private:
  ValueFn value_;
  SubgradFn subgradient_;
};

/// F(x) = int_0^x minimal_section(r) dr, F(0) = 0. Uses the analytic
/// primitive when the graph carries one, quadrature otherwise.
ConvexPotential potential_from_graph(const MonotoneGraph& f);

/// F*(y) = sup_x (xy - F(x)) by golden-section on a geometrically
/// grown bracket. Throws GraphError if the maximizer escapes every
/// admissible bracket (non-superlinear F with |y| too large).
double conjugate(const ConvexPotential& F, double y);

/// F* packaged as a potential; the subgradient is the recorded maximizer.
ConvexPotential conjugate_potential(const ConvexPotential& F);

double phi_q(double q, double x);
double phi_q_inverse(double q, double y);
double phi_q_derivative(double q, double x);  // (q-1)|x|^{q-2}

struct CompositeGraphs {
  MonotoneGraph f_tilde;          // f o phi_q^{-1}
  ConvexPotential F_tilde;        // potential of f_tilde
  ConvexPotential F_tilde_star;   // conjugate of F_tilde
  ConvexPotential F_hat;          // F_tilde o phi_q
};

/// Builds the composite family used by the mild-solution certificates.
/// Requires 0 in f(0).
CompositeGraphs composite_graphs(const MonotoneGraph& f, double q);

struct SymmetryReport {
  double max_deviation = 0.0;
  double arg_max = 0.0;
  bool symmetric = false;
};

SymmetryReport check_symmetry(const ConvexPotential& F,
                              std::span<const double> grid,
                              double tol = 1e-9);

}  // namespace spde
