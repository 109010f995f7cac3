#pragma once

// Dense statevectors, density matrices, and the operations connecting them.
// A purified register is laid out system-first: the combined basis index of
// system index s and ancilla index a is s * 2^{n_ancilla} + a.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tepid/pauli.hpp"

namespace tepid {

class StateVector {
 public:
  // |0...0>. Zero qubits is legal and denotes the trivial one-dimensional
  // register (amplitude vector {1}).
  explicit StateVector(int n_qubits);
  static StateVector basis_state(int n_qubits, std::uint64_t index);
  // All-zero amplitudes (workspace, not a valid quantum state until filled).
  static StateVector zero_workspace(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::complex<double>* data() { return amps_.data(); }
  const std::complex<double>* data() const { return amps_.data(); }
  std::vector<std::complex<double>>& amplitudes() { return amps_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
  std::complex<double> amplitude(std::uint64_t index) const { return amps_.at(index); }

  double norm() const;

 private:
  StateVector(int n_qubits, std::vector<std::complex<double>> amps)
      : n_qubits_(n_qubits), amps_(std::move(amps)) {}
  int n_qubits_ = 0;
  std::vector<std::complex<double>> amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits);
  DensityMatrix(int n_qubits, Eigen::MatrixXcd entries);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  Eigen::MatrixXcd& entries() { return entries_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }

  double trace_real() const { return entries_.trace().real(); }
  // Larger of the Hermiticity residue and |trace - 1|.
  double contract_residue() const;

 private:
  int n_qubits_ = 0;
  Eigen::MatrixXcd entries_;
};

// dst = (coefficient * word) src, on a register of matching width.
StateVector apply_pauli(const PauliString& op, const StateVector& psi);

// out = H |psi>. H may act on a register narrower than psi; it is padded
// with identities on the right (system-first layout).
StateVector apply_observable(const Observable& obs, const StateVector& psi);
void apply_observable_into(StateVector& out, StateVector& scratch,
                           const Observable& obs, const StateVector& psi);

// <psi|H|psi>, checking that the imaginary residue stays below tolerance
// (a large residue means a non-Hermitian observable or corrupted state).
double expectation(const Observable& obs, const StateVector& psi);
double expectation(const Observable& obs, const DensityMatrix& rho);

// Trace out the trailing ancilla register of a purified state.
DensityMatrix partial_trace_ancilla(const StateVector& psi, int n_system, int n_ancilla);

}  // namespace tepid
