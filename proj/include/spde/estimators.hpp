#pragma once

#include <span>
#include <string>
#include <vector>

#include "spde/mild_solver.hpp"

// Monte Carlo functionals and the quantitative certificates: H_p(L_q)
// norms, Cauchy-in-lambda rates, a priori bounds, Lipschitz and
// two-noise dependence, the maximal inequality for stochastic
// convolutions, Gamma-iteration contraction, and convex-duality
// integrability certificates.

namespace spde {

struct MonteCarloEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 95% CI half width
  std::size_t n_paths = 0;
  std::string tag;

  double relative_ci() const {
    return value == 0.0 ? 0.0 : half_width / value;
  }
};

/// (mean of samples)^{1/p} with a delta-method CI (bootstrap with 1000
/// resamples when p < 1, where the delta method degrades)
MonteCarloEstimate power_mean(std::span<const double> samples, double p,
                              std::string tag = "");

/// per-path functional max_k (e^{-alpha t_k} ||u(t_k)||_q)^p
double path_sup_functional(const TrajectoryRecord& traj, double p, double q,
                           double alpha);

/// (E max_k ||e^{-alpha t} u||_q^p)^{1/p} over a stored path set
MonteCarloEstimate hp_norm(std::span<const TrajectoryRecord> paths, double p,
                           double q, double alpha);

// ---------------------------------------------------------------- studies
// All studies couple compared configurations through identical Wiener
// increments (same driver seed and path ids).

struct CauchyStudyReport {
  std::vector<double> lambda_pairs;            // lambda + mu per row
  std::vector<MonteCarloEstimate> distances;   // ||u_lambda - u_mu||_{H_p}
  double slope = 0.0;                          // log-log regression
  double required_slope = 0.0;
  bool ci_ok = false;
  bool pass = false;
};

CauchyStudyReport cauchy_in_lambda_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const std::vector<double>& lambdas,
    const WienerDriver& wd, std::size_t n_paths);

struct AprioriStudyReport {
  std::vector<double> lambdas;
  std::vector<double> u0_scales;
  std::vector<std::vector<double>> ratio;  // [scale][lambda]
  double max_variation = 0.0;              // worst (max-min)/min over lambda
  bool pass = false;
};

AprioriStudyReport apriori_bound_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0_base, const std::vector<double>& u0_scales,
    const std::vector<double>& lambdas, const WienerDriver& wd,
    std::size_t n_paths);

struct DependenceStudyReport {
  std::vector<double> perturbation;  // pair distance or delta
  std::vector<double> constant;      // estimated Lipschitz / two-noise ratio
  double variation = 0.0;
  bool pass = false;
};

DependenceStudyReport lipschitz_dependence_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const GridFunction& direction,
    const std::vector<double>& distances, const WienerDriver& wd,
    std::size_t n_paths);

DependenceStudyReport two_noise_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const std::vector<GridFunction>& base_columns,
    const GridFunction& column_perturbation, const std::vector<double>& deltas,
    const DirichletLaplacian& a, const GridFunction& u0,
    const WienerDriver& wd, std::size_t n_paths);

struct MaximalInequalityReport {
  struct Row {
    double p = 0.0;
    double scale = 0.0;
    double ratio = 0.0;  // E sup ||S*G||^p / E (int ||G||_gamma^2)^{p/2}
  };
  std::vector<Row> rows;
  bool scale_invariant = false;
  bool bounded = false;
  bool pass = false;
};

MaximalInequalityReport maximal_inequality_study(
    const DirichletLaplacian& a, const std::vector<GridFunction>& g_columns,
    const std::vector<double>& p_list, const std::vector<double>& scales,
    double q, const SolverConfig& cfg, const WienerDriver& wd,
    std::size_t n_paths);

struct IntegrabilityReport {
  struct Row {
    std::string label;       // e.g. "dt=1e-3 lambda=prox"
    double pairing = 0.0;    // E int Phi_q'(u) g dt
    double potential = 0.0;  // E int F_hat(u) dx dt
    double conjugate = 0.0;  // E int F_tilde_star(g) dx dt
  };
  std::vector<Row> rows;
  double max_variation = 0.0;
  bool pass = false;
};

/// the three certificates across dt halving and lambda in
/// {proximal} + extra_lambdas; pass when each varies < 25%
IntegrabilityReport selection_integrability_certificate(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const CompositeGraphs& comp, const DiffusionCoefficient& b,
    const DirichletLaplacian& a, const GridFunction& u0,
    const std::vector<double>& extra_lambdas, const WienerDriver& wd,
    std::size_t n_paths);

/// max over (path, checkpoint, node) of
/// |g phi_q(u) - F_tilde(phi_q(u)) - F_tilde_star(g)|
double fenchel_young_on_paths(std::span<const TrajectoryRecord> paths,
                              const CompositeGraphs& comp, double q,
                              std::size_t checkpoint_stride = 1);

struct GammaContractionReport {
  std::vector<double> iterate_distance;  // H_p distance of successive iterates
  std::vector<double> ratio;
  double max_ratio_upper95 = 0.0;
  bool pass = false;
};

GammaContractionReport gamma_contraction_study(
    const SolverConfig& cfg, const MonotoneGraph& f,
    const DiffusionCoefficient& b, const DirichletLaplacian& a,
    const GridFunction& u0, const WienerDriver& wd, std::size_t n_paths,
    std::size_t n_outer);

}  // namespace spde
