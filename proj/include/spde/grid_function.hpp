#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

// Discretized L_q(0,1) calculus on a uniform interior-node mesh:
// norms, duality map, the Phi_q derivative stack, and finite-mode
// gamma-radonifying norms and traces.

namespace spde {

struct GridFunction {
  std::vector<double> values;  // interior nodes, mesh width h = 1/(M+1)

  GridFunction() = default;
  explicit GridFunction(std::size_t m, double fill = 0.0) : values(m, fill) {}

  std::size_t size() const { return values.size(); }
  double h() const { return 1.0 / (static_cast<double>(values.size()) + 1.0); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  GridFunction& operator+=(const GridFunction& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  GridFunction& operator*=(double c) {
    for (double& v : values) v *= c;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) {
    return a += b;
  }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) {
    return a -= b;
  }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

  bool finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// rectangle-rule L_q norm (h * sum |u_i|^q)^{1/q}; q = infinity -> max
double norm_q(const GridFunction& u, double q);

/// discrete L^2(0,1) inner product h * sum u_i v_i
double inner(const GridFunction& u, const GridFunction& v);

/// J(u) = ||u||^{2-q} |u|^{q-2} u, the duality map of L_q; J(0) = 0
GridFunction duality_map(const GridFunction& u, double q);

/// Phi_q(u) = ||u||_q^q
double phi_q_value(const GridFunction& u, double q);

/// gradient density q |u|^{q-2} u (an L_{q'} grid function);
/// Phi_q'(u) v = inner(grad, v)
GridFunction phi_q_grad(const GridFunction& u, double q);

/// Hessian bilinear form q(q-1) integral |u|^{q-2} v w
double phi_q_hess_apply(const GridFunction& u, double q, const GridFunction& v,
                        const GridFunction& w);

// Finite-mode operator value: one column per retained noise mode.
struct NoiseOperatorValue {
  std::vector<GridFunction> columns;

  std::size_t mode_count() const { return columns.size(); }

  NoiseOperatorValue& operator-=(const NoiseOperatorValue& o) {
    for (std::size_t k = 0; k < columns.size(); ++k) columns[k] -= o.columns[k];
    return *this;
  }
  friend NoiseOperatorValue operator-(NoiseOperatorValue a,
                                      const NoiseOperatorValue& b) {
    return a -= b;
  }
};

/// || (sum_k |col_k|^2)^{1/2} ||_{L_q}, the L_q(l_2) norm
double gamma_norm(const NoiseOperatorValue& t, double q);

/// tr_T Phi_q''(u) = sum_k Phi_q''(u)(col_k, col_k)
double trace_form(const NoiseOperatorValue& t, const GridFunction& u, double q);

struct IdealBoundReport {
  double lhs = 0.0;         // ||L T||_gamma
  double operator_norm = 0.0;  // power-iteration estimate of ||L||
  double rhs = 0.0;         // ||L||_op * ||T||_gamma
  double ratio = 0.0;       // lhs / rhs (0 when rhs = 0)
  bool bounded = false;
};

/// checks ||L T||_gamma <= ||L||_op ||T||_gamma with ||L||_op from
/// power iteration on seeded random inputs
IdealBoundReport ideal_bound_check(
    const std::function<GridFunction(const GridFunction&)>& L,
    const NoiseOperatorValue& t, double q, std::size_t dim);

}  // namespace spde
