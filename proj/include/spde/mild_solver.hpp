#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spde/accretive_operator.hpp"
#include "spde/grid_function.hpp"
#include "spde/monotone_graph.hpp"
#include "spde/noise_model.hpp"

// Semi-implicit mild time steppers: stochastic convolution, the
// Yosida-regularized drift scheme, the proximal (exact-resolvent)
// scheme producing the drift selection g, Picard iteration of the
// discrete mild map, and pathwise residual checks.

namespace spde {

struct SolverConfig {
  double T = 0.5;
  double dt = 1e-3;
  double lambda = 0.0;  // Yosida parameter; 0 selects the proximal scheme
  double eta = 0.0;     // reaction coefficient
  double alpha = 0.0;   // discount used analysis-side only
  double q = 2.0;
  double p = 2.0;

  std::size_t steps() const;
};

struct TrajectoryRecord {
  std::vector<double> times;                     // K+1 grid points
  std::vector<GridFunction> states;              // u(t_k), K+1 entries
  std::vector<GridFunction> selections;          // g(t_k), K entries
  std::vector<NoiseOperatorValue> noise_values;  // B(t_k, u(t_k)), K entries
  std::vector<std::vector<double>> increments;   // dW_k, K x m

  std::size_t step_count() const { return times.empty() ? 0 : times.size() - 1; }
};

/// u_{k+1} = S(dt)(u_k + G(t_k) dW_k), u_0 = 0 (exponential Euler)
TrajectoryRecord stochastic_convolution(const DirichletLaplacian& a,
                                        const DiffusionCoefficient& g,
                                        const WienerDriver& wd,
                                        std::uint64_t path_id,
                                        const SolverConfig& cfg);

/// u_{k+1} = (I+dt A)^{-1}(u_k - dt f_lambda(u_k) + dt eta u_k + B dW_k)
TrajectoryRecord solve_regularized(const SolverConfig& cfg,
                                   const MonotoneGraph& f,
                                   const DiffusionCoefficient& b,
                                   const DirichletLaplacian& a,
                                   const GridFunction& u0,
                                   const WienerDriver& wd,
                                   std::uint64_t path_id);

/// drift by exact nodewise graph resolvent:
///   v = (I+dt A)^{-1}(u_k + dt eta u_k + B dW_k),
///   u_{k+1} = prox_{dt f}(v), g = (v - u_{k+1})/dt projected onto f(u_{k+1})
TrajectoryRecord solve_proximal(const SolverConfig& cfg, const MonotoneGraph& f,
                                const DiffusionCoefficient& b,
                                const DirichletLaplacian& a,
                                const GridFunction& u0, const WienerDriver& wd,
                                std::uint64_t path_id);

/// proximal scheme with a frozen per-step noise coefficient (used by
/// the Gamma iteration); frozen[k] plays the role of B(t_k, u(t_k))
TrajectoryRecord solve_proximal_frozen_noise(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const std::vector<NoiseOperatorValue>& frozen, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id);

struct FixedPointLog {
  std::vector<double> sup_distance;  // per Picard sweep
  std::vector<double> ratio;         // consecutive contraction factors
  bool converged = false;
  std::size_t iterations = 0;
};

/// Picard iteration of the discrete mild map for Lipschitz drift
TrajectoryRecord solve_lipschitz_fixed_point(
    const SolverConfig& cfg, const std::function<double(double)>& f_lipschitz,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id,
    std::size_t max_iters, double tol, FixedPointLog* log = nullptr);

/// outer iterates u^n solving the proximal scheme with noise frozen at
/// the previous iterate; u^0 is the constant-in-time initial datum
std::vector<TrajectoryRecord> gamma_iteration(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::uint64_t path_id,
    std::size_t n_outer);

/// max over checkpoints of the L_q defect in the discrete
/// variation-of-constants identity
double mild_residual(const TrajectoryRecord& traj, const DirichletLaplacian& a,
                     double eta, const GridFunction& u0, double q,
                     std::size_t checkpoint_stride = 0);

/// slack(t_k) = RHS - LHS of the discrete energy inequality
///   ||u(t)||_q^q <= ||u0||_q^q + int Phi'(u) b + int Phi'(u) G dW
///                   + (q(q-1)/2) int ||G||_gamma^2 ||u||^{q-2}
/// with b = -g + eta u and left-endpoint sums
std::vector<double> ito_inequality_residual(const TrajectoryRecord& traj,
                                            double eta, double q);

}  // namespace spde
