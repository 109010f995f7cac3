#pragma once

// The Heisenberg XXZ chain and its thermal reference states: the exact Gibbs
// state and the rank-m truncated Gibbs state whose free energy is the floor
// any m-level variational preparation is measured against.

#include <string>
#include <vector>

#include "tepid/pauli.hpp"
#include "tepid/spectral.hpp"
#include "tepid/state.hpp"

namespace tepid {

struct XXZConfig {
  int n_sites = 0;
  double j_z = 0.0;
};

// Anisotropy regimes of the chain.
enum class XXZPhase { ferromagnetic, paramagnetic, antiferromagnetic, boundary };
XXZPhase classify_phase(double j_z);
std::string phase_name(XXZPhase phase);

// sum_{k=1}^{n-1} (X_k X_{k+1} + Y_k Y_{k+1} + j_z Z_k Z_{k+1}), open chain.
Observable build_xxz(const XXZConfig& config);

enum class TruncationMode { strict, permissive };

struct TruncatedGibbs {
  DensityMatrix state;
  // Free energy of the rank-m truncation: the floor for an m-level ansatz.
  double free_energy_floor = 0.0;
  // Boltzmann weights actually assigned to the lowest levels (size m or, in
  // permissive mode, up to the end of the cut degeneracy group).
  std::vector<double> weights;
};

// Thermal reference bundle for one (H, beta): eigendecomposition shared by
// the exact state, truncations, and free energies. Weights are computed with
// the ground-energy shift exp(-beta (E_k - E_min)) so no Boltzmann factor
// overflows.
class GibbsReference {
 public:
  GibbsReference(const Observable& hamiltonian, double beta,
                 double group_tol = kDefaultGroupTol);

  const Observable& hamiltonian() const { return hamiltonian_; }
  double beta() const { return beta_; }
  const EigenSystem& spectrum() const { return spectrum_; }
  const std::vector<double>& weights() const { return weights_; }

  DensityMatrix exact_state() const;
  double free_energy_exact() const;

  // Rank-m truncation. In strict mode a cut that would split a degeneracy
  // group (within group_tol) is an error; in permissive mode the cut group's
  // captured weight is spread uniformly over the whole group.
  TruncatedGibbs truncated(int m, TruncationMode mode = TruncationMode::strict) const;

 private:
  Observable hamiltonian_;
  double beta_;
  EigenSystem spectrum_;
  std::vector<double> weights_;  // normalized Boltzmann weights, ascending E
};

// Convenience wrappers used by tests and the CLI.
DensityMatrix gibbs_exact(const Observable& hamiltonian, double beta);
TruncatedGibbs gibbs_truncated(const Observable& hamiltonian, double beta, int m,
                               TruncationMode mode = TruncationMode::strict);

struct RelativeError {
  double value = 0.0;
  // True when |reference| < 1e-300 and the absolute error was reported.
  bool absolute_fallback = false;
};

// |(value - reference) / reference|, falling back to |value - reference|
// when the reference vanishes.
RelativeError relative_error(double value, double reference);

}  // namespace tepid
