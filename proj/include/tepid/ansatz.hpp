#pragma once

// State preparation: the computational subspace, the Givens-cascade ancilla
// state carrying the occupation amplitudes, the purified product state, and
// the adaptively grown unitary acting on the system register only.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tepid/pauli.hpp"
#include "tepid/state.hpp"

namespace tepid {

// An ordered set of m distinct computational basis states of the system
// register; element j is the basis label paired with occupation mu_{j+1}.
struct ComputationalSubspace {
  int n_system = 0;
  std::vector<std::uint64_t> elements;

  static ComputationalSubspace from_bitstrings(int n_system,
                                               const std::vector<std::string>& bits);
  static ComputationalSubspace from_indices(int n_system,
                                            std::vector<std::uint64_t> indices);

  int m() const { return static_cast<int>(elements.size()); }
  std::vector<std::string> bitstrings() const;
};

// Ancillas needed to label m subspace elements: ceil(log2 m), zero for m = 1.
int ancilla_count(int m);

// The plane rotation G^{(k,k+1)}(angle), k 1-based, as a dim x dim matrix:
// identity except for the 2x2 block [[cos, -sin], [sin, cos]] on components
// k-1 and k (0-based). exp(angle * gamma) for the antisymmetric generator
// gamma with gamma[k,k-1] = 1 = -gamma[k-1,k].
Eigen::MatrixXd givens_rotation(int k, double angle, int dim);

// |xi> = G^{(m-1,m)} ... G^{(2,3)} G^{(1,2)} |0...0> on n_ancilla qubits;
// the lowest rotation acts first, which reproduces the polar amplitudes:
// amplitude on |j-1> is sqrt(mu_j).
StateVector prepare_ancilla_state(const std::vector<double>& phi, int n_ancilla);

// |Phi> = sum_j sqrt(mu_j) |c_j>|j-1> on the purified register (system
// qubits first, then ancillas). phi has m-1 entries.
StateVector prepare_purification(const std::vector<double>& phi,
                                 const ComputationalSubspace& subspace);

// The adaptively grown unitary: an ordered product of Pauli-word
// exponentials exp(i theta_l T_l) on the system register. The newest
// operator is applied last (outermost).
struct AdaptiveAnsatz {
  int n_system = 0;
  std::vector<PauliString> generators;  // unit-coefficient words, width n_system
  std::vector<double> angles;

  int size() const { return static_cast<int>(generators.size()); }
};

// state <- exp(i theta P) state, P padded with identities on the right to
// the state's width. Uses exp(i theta P) = cos(theta) I + i sin(theta) P.
void apply_pauli_exponential_inplace(StateVector& state, StateVector& scratch,
                                     const PauliString& generator, double theta);

// Apply every exponential in order. The state may be the purified register
// (ancillas ride along untouched) or the bare system register.
void apply_adaptive_inplace(const AdaptiveAnsatz& ansatz, StateVector& state);
StateVector apply_adaptive(const AdaptiveAnsatz& ansatz, const StateVector& state);

}  // namespace tepid
