#pragma once

// Polar reparametrization of a probability simplex: m-1 unconstrained angles
// phi encode m probabilities through
//
//   sqrt(mu_j) = (prod_{k<j} sin phi_k) cos phi_j        (j < m)
//   sqrt(mu_m) =  prod_{k<m} sin phi_k
//
// so sum_j mu_j = 1 holds identically and simplex constraints never reach
// the optimizer.

#include <vector>

#include <Eigen/Dense>

namespace tepid {

// Signed amplitudes r_j(phi) (size m): r_j = (prod_{k<j} sin phi_k) cos phi_j
// with the closing cosine dropped on the last entry. These are the actual
// purification amplitudes — outside [0, pi/2] they go negative, and every
// consumer must keep the sign so values, gradients (polar_jacobian rows are
// d r_j / d phi_l), and compiled rotation circuits stay consistent.
std::vector<double> polar_amplitudes(const std::vector<double>& phi);

// phi (size m-1) -> mu (size m), mu_j = r_j^2. phi empty means m = 1, mu = {1}.
std::vector<double> polar_to_mu(const std::vector<double>& phi);

// Jacobian d sqrt(mu_j) / d phi_l, shape (m, m-1). Row j only depends on
// angles up to j, so the upper triangle (l > j) vanishes.
Eigen::MatrixXd polar_jacobian(const std::vector<double>& phi);

// Recover angles in [0, pi/2] from a probability vector (components >= 0,
// sum 1 within 1e-10) via tail sums. Zero tails map to zero angles.
std::vector<double> invert_polar(const std::vector<double>& mu);

}  // namespace tepid
