#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spde/grid_function.hpp"

// Discrete linear m-accretive operator: the 1-D finite-difference
// Dirichlet Laplacian on (0,1), with tridiagonal resolvents and an
// exact eigen-expansion semigroup.

namespace spde {

class DirichletLaplacian {
 public:
  explicit DirichletLaplacian(std::size_t m);

  std::size_t dimension() const { return m_; }
  double mesh_width() const { return h_; }

  /// A u = (-u_{i-1} + 2 u_i - u_{i+1}) / h^2, zero boundary
  GridFunction apply(const GridFunction& u) const;

  /// (I + eps A)^{-1} u by tridiagonal elimination
  GridFunction resolvent_apply(double eps, const GridFunction& u) const;

  /// S(t) u = sum_k e^{-mu_k t} c_k v_k (exact for the discrete operator)
  GridFunction semigroup_apply(double t, const GridFunction& u) const;

  /// mu_k = (2/h^2)(1 - cos(k pi h)), k = 1..M
  double eigenvalue(std::size_t k) const { return mu_[k - 1]; }

  /// nodal values of v_k = sin(k pi x)
  GridFunction eigenvector(std::size_t k) const;

  /// modal coefficients c_k with u = sum c_k v_k
  std::vector<double> modal_coefficients(const GridFunction& u) const;

  /// min over samples of Phi_q'(u) . (A u); accretivity demands >= -tol
  double accretivity_certificate(double q, std::size_t samples,
                                 std::uint64_t seed = 7) const;

 private:
  std::size_t m_;
  double h_;
  std::vector<double> mu_;    // eigenvalues
  std::vector<double> evec_;  // row-major v_k(i) = sin(k pi i h)
};

struct HypercontractivityReport {
  std::vector<std::size_t> meshes;
  std::vector<double> sup_norm;  // sup over unit-L1 spikes of ||R^sigma u||_q
  double max_ratio = 0.0;        // max consecutive growth factor
  bool stabilizes = false;
};

/// certifies the discrete analogue of R_lambda^sigma(L_1) subset L_q:
/// spike inputs of unit discrete L_1 norm, meshes {31, 63, 127}
HypercontractivityReport hypercontractivity_check(std::size_t sigma, double q,
                                                  double lambda);

}  // namespace spde
