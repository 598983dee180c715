#include "spde/accretive_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spde/rng.hpp"

namespace spde {

DirichletLaplacian::DirichletLaplacian(std::size_t m)
    : m_(m), h_(1.0 / (static_cast<double>(m) + 1.0)) {
  mu_.resize(m_);
  evec_.resize(m_ * m_);
  for (std::size_t k = 1; k <= m_; ++k) {
    mu_[k - 1] = 2.0 / (h_ * h_) *
                 (1.0 - std::cos(static_cast<double>(k) * std::numbers::pi * h_));
    for (std::size_t i = 1; i <= m_; ++i)
      evec_[(k - 1) * m_ + (i - 1)] =
          std::sin(static_cast<double>(k) * std::numbers::pi *
                   static_cast<double>(i) * h_);
  }
}

GridFunction DirichletLaplacian::apply(const GridFunction& u) const {
  GridFunction r(m_);
  const double s = 1.0 / (h_ * h_);
  for (std::size_t i = 0; i < m_; ++i) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double right = i + 1 < m_ ? u[i + 1] : 0.0;
    r[i] = s * (-left + 2.0 * u[i] - right);
  }
  return r;
}

GridFunction DirichletLaplacian::resolvent_apply(double eps,
                                                 const GridFunction& u) const {
  // Thomas algorithm for the SPD tridiagonal (I + eps A)
  const double off = -eps / (h_ * h_);
  const double diag = 1.0 - 2.0 * off;
  std::vector<double> c(m_), d(m_);
  double beta = diag;
  c[0] = off / beta;
  d[0] = u[0] / beta;
  for (std::size_t i = 1; i < m_; ++i) {
    beta = diag - off * c[i - 1];
    c[i] = off / beta;
    d[i] = (u[i] - off * d[i - 1]) / beta;
  }
  GridFunction y(m_);
  y[m_ - 1] = d[m_ - 1];
  for (std::size_t i = m_ - 1; i-- > 0;) y[i] = d[i] - c[i] * y[i + 1];
  return y;
}

GridFunction DirichletLaplacian::eigenvector(std::size_t k) const {
  GridFunction v(m_);
  for (std::size_t i = 0; i < m_; ++i) v[i] = evec_[(k - 1) * m_ + i];
  return v;
}

std::vector<double> DirichletLaplacian::modal_coefficients(
    const GridFunction& u) const {
  // sum_i v_k(i) v_l(i) = delta_kl / (2h)
  std::vector<double> c(m_);
  for (std::size_t k = 0; k < m_; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) s += evec_[k * m_ + i] * u[i];
    c[k] = 2.0 * h_ * s;
  }
  return c;
}

GridFunction DirichletLaplacian::semigroup_apply(double t,
                                                 const GridFunction& u) const {
  if (t == 0.0) return u;
  const std::vector<double> c = modal_coefficients(u);
  GridFunction r(m_);
  for (std::size_t k = 0; k < m_; ++k) {
    const double a = std::exp(-mu_[k] * t) * c[k];
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < m_; ++i) r[i] += a * evec_[k * m_ + i];
  }
  return r;
}

double DirichletLaplacian::accretivity_certificate(double q,
                                                   std::size_t samples,
                                                   std::uint64_t seed) const {
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    GridFunction u(m_);
    for (std::size_t i = 0; i < m_; ++i)
      u[i] = counter_normal(seed, s, i, 1);
    worst = std::min(worst, inner(phi_q_grad(u, q), apply(u)));
  }
  return worst;
}

HypercontractivityReport hypercontractivity_check(std::size_t sigma, double q,
                                                  double lambda) {
  HypercontractivityReport rep;
  rep.meshes = {31, 63, 127};
  for (std::size_t m : rep.meshes) {
    DirichletLaplacian a(m);
    const double h = a.mesh_width();
    double sup = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      GridFunction u(m);
      u[i] = 1.0 / h;  // unit discrete L_1 spike
      for (std::size_t s = 0; s < sigma; ++s) u = a.resolvent_apply(lambda, u);
      sup = std::max(sup, norm_q(u, q));
    }
    rep.sup_norm.push_back(sup);
  }
  for (std::size_t j = 1; j < rep.sup_norm.size(); ++j)
    rep.max_ratio =
        std::max(rep.max_ratio, rep.sup_norm[j] / rep.sup_norm[j - 1]);
  rep.stabilizes = rep.max_ratio <= 1.25;
  return rep;
}

}  // namespace spde
