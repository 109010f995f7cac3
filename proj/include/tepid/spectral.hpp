#pragma once

// Exact-diagonalization utilities: eigensystems with degeneracy grouping,
// Uhlmann / pure-state / subspace fidelities, and spectral entropy. These are
// the oracles every variational result is checked against.

#include <vector>

#include <Eigen/Dense>

#include "tepid/pauli.hpp"
#include "tepid/state.hpp"

namespace tepid {

inline constexpr double kDefaultGroupTol = 1e-8;

struct EigenSystem {
  int n_qubits = 0;
  double group_tol = kDefaultGroupTol;
  Eigen::VectorXd energies;   // ascending
  Eigen::MatrixXcd vectors;   // column k pairs with energies[k]
  // Indices into `energies`, consecutive, grouped by gap <= group_tol.
  std::vector<std::vector<int>> degeneracy_groups;

  // The group containing sorted level k.
  const std::vector<int>& group_of(int k) const;
};

// Full eigendecomposition of a Hermitian observable (dense; refuses registers
// wider than kMaxDenseQubits).
EigenSystem eigensystem(const Observable& obs, double group_tol = kDefaultGroupTol);

// Ascending eigenvalues only — much cheaper, used by the scaling study.
Eigen::VectorXd eigenvalues_only(const Observable& obs);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Eigenvalues of
// the inputs in [-1e-10, 0) are clipped to zero; anything more negative is a
// violated positivity contract.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// |<a|b>|^2 for normalized pure states.
double pure_fidelity(const StateVector& a, const StateVector& b);

// sum_j |<psi|basis_j>|^2 against an orthonormal set spanning a degenerate
// eigenspace.
double subspace_fidelity(const StateVector& psi, const std::vector<StateVector>& basis);

// Von Neumann entropy (natural log) from the spectrum of rho, with the same
// clipping rule as fidelity.
double von_neumann_entropy(const DensityMatrix& rho);

// Tr(H rho) - entropy(rho) / beta. The dual route to the variational cost;
// used by invariance and floor checks.
double free_energy_of_state(const Observable& obs, const DensityMatrix& rho, double beta);

}  // namespace tepid
