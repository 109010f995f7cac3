#pragma once

// The variational cost F = <H> - S(mu)/beta, its analytic gradient, and the
// operator-pool gradients that drive the adaptive growth.
//
// Gradient strategy: one forward sweep caches every prefix state
// sigma_l = E_l ... E_1 |Phi>, one backward sweep peels adjoints off
// lambda = H|Psi>; each theta gradient is -2 Im <lambda_l| T_l |sigma_l> and
// the angle gradients contract <lambda_0| with the sparse derivative of the
// purification plus the entropy term. Total cost is O(N) exponentials, the
// same order as a single evaluation.

#include <span>
#include <vector>

#include "tepid/ansatz.hpp"
#include "tepid/pauli.hpp"
#include "tepid/state.hpp"

namespace tepid {

// Shannon entropy (natural log) of a probability vector: components >= -1e-12
// (small negatives clipped), sum within 1e-10 of 1. Probabilities below
// 1e-300 contribute nothing.
double shannon_entropy(const std::vector<double>& mu);

struct GradientVector {
  std::vector<double> d_phi;
  std::vector<double> d_theta;
  double inf_norm() const;
};

// Stateful evaluator binding (H, beta, subspace); generators grow as the
// ansatz adapts. Parameter vectors pack [phi; theta]. Workspaces are reused
// across evaluations, so a given instance must not be shared across threads.
class FreeEnergyObjective {
 public:
  FreeEnergyObjective(const Observable& hamiltonian, double beta,
                      const ComputationalSubspace& subspace);

  void set_generators(std::vector<PauliString> generators);
  void push_generator(const PauliString& generator);
  const std::vector<PauliString>& generators() const { return generators_; }

  int n_phi() const { return subspace_.m() - 1; }
  int n_theta() const { return static_cast<int>(generators_.size()); }
  int n_parameters() const { return n_phi() + n_theta(); }

  double value(std::span<const double> x);
  double value_and_gradient(std::span<const double> x, std::span<double> grad);

  // The purified state at x (fresh buffers; safe to keep).
  StateVector state(std::span<const double> x) const;
  AdaptiveAnsatz ansatz_at(std::span<const double> x) const;

  const Observable& hamiltonian() const { return hamiltonian_; }
  double beta() const { return beta_; }
  const ComputationalSubspace& subspace() const { return subspace_; }

 private:
  void build_purification(std::span<const double> phi, std::complex<double>* out) const;
  double energy_and_h(const std::complex<double>* psi, std::complex<double>* h);

  Observable hamiltonian_;
  double beta_;
  ComputationalSubspace subspace_;
  int n_ancilla_;
  int n_total_;
  std::size_t dim_;
  std::vector<std::pair<double, kernels::PauliMasks>> padded_terms_;
  std::vector<PauliString> generators_;
  std::vector<kernels::PauliMasks> generator_masks_;  // padded to n_total_
  // Workspaces.
  std::vector<std::complex<double>> sigma_;  // (N+1) stacked prefix states
  std::vector<std::complex<double>> h_, lambda_, scratch_;
};

// Convenience single-shot forms.
double free_energy(const Observable& hamiltonian, double beta,
                   const ComputationalSubspace& subspace, const std::vector<double>& phi,
                   const AdaptiveAnsatz& ansatz);
GradientVector analytic_gradient(const Observable& hamiltonian, double beta,
                                 const ComputationalSubspace& subspace,
                                 const std::vector<double>& phi,
                                 const AdaptiveAnsatz& ansatz);

// d/dtheta of <H> for a candidate exp(i theta T) appended outermost,
// evaluated at theta = 0: -2 Im <H psi| T psi>. The entropy never moves
// under system-register unitaries, so this is the full cost gradient.
// `workers` > 1 splits the pool across threads (results independent of the
// split).
std::vector<double> pool_gradients(const StateVector& psi,
                                   const std::vector<PauliString>& pool,
                                   const Observable& hamiltonian, int workers = 1);

// Every non-identity Pauli word on n_system qubits, lexicographic
// (I < X < Y < Z), optionally capped at a maximum weight (0 = no cap).
std::vector<PauliString> full_pauli_pool(int n_system, int max_weight = 0);

}  // namespace tepid
