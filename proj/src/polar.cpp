#include "tepid/polar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tepid {

std::vector<double> polar_amplitudes(const std::vector<double>& phi) {
  const std::size_t m = phi.size() + 1;
  std::vector<double> r(m);
  double sin_prod = 1.0;  // prod_{k<j} sin phi_k
  for (std::size_t j = 0; j + 1 < m; ++j) {
    r[j] = sin_prod * std::cos(phi[j]);
    sin_prod *= std::sin(phi[j]);
  }
  r[m - 1] = sin_prod;
  return r;
}

std::vector<double> polar_to_mu(const std::vector<double>& phi) {
  std::vector<double> mu = polar_amplitudes(phi);
  for (double& v : mu) v *= v;
  return mu;
}

Eigen::MatrixXd polar_jacobian(const std::vector<double>& phi) {
  const std::size_t n = phi.size();
  const std::size_t m = n + 1;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, n);
  std::vector<double> s(n), c(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = std::sin(phi[k]);
    c[k] = std::cos(phi[k]);
  }
  // Row j < m-1 is sqrt(mu_j) = s_0 ... s_{j-1} c_j; the last row has no
  // closing cosine. Derivatives are explicit products (differentiating one
  // factor at a time), never divisions, so vanishing angles stay exact.
  for (std::size_t j = 0; j < m; ++j) {
    const bool last = (j == m - 1);
    const std::size_t n_angles = last ? n : j + 1;
    for (std::size_t l = 0; l < n_angles; ++l) {
      double v = 1.0;
      for (std::size_t k = 0; k < n_angles; ++k) {
        const bool closing_cos = (!last && k == j);
        if (closing_cos) {
          v *= (k == l) ? -s[k] : c[k];
        } else {
          v *= (k == l) ? c[k] : s[k];
        }
      }
      jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = v;
    }
  }
  return jac;
}

std::vector<double> invert_polar(const std::vector<double>& mu) {
  const std::size_t m = mu.size();
  if (m == 0) throw std::invalid_argument("empty probability vector");
  double sum = 0.0;
  for (double p : mu) {
    if (p < -1e-12) throw std::invalid_argument("negative probability component");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
  // Suffix sums keep the remaining mass exact: trailing zero weights give a
  // zero tail, so they invert to exactly zero angles instead of leaving
  // cancellation crumbs behind a running subtraction.
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t j = m; j-- > 0;) tail[j] = tail[j + 1] + std::max(mu[j], 0.0);
  std::vector<double> phi(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    if (tail[j] <= 1e-300) {
      phi[j] = 0.0;  // nothing left to place; angle is arbitrary, pick 0
      continue;
    }
    const double ratio = std::clamp(std::max(mu[j], 0.0) / tail[j], 0.0, 1.0);
    phi[j] = std::acos(std::sqrt(ratio));
  }
  return phi;
}

}  // namespace tepid
