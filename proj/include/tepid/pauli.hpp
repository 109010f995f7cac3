#pragma once

// Pauli words and Hermitian observables built from them.
//
// Qubit convention used everywhere: qubit 0 is the leftmost label of a ket,
// so for an n-qubit register, qubit q corresponds to bit n-1-q of a basis
// index. |0...01> is index 1 and its rightmost qubit is qubit n-1.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tepid/kernels.hpp"

namespace tepid {

enum class PauliOp : std::uint8_t { I, X, Y, Z };

char pauli_char(PauliOp op);

// A Pauli word (tensor product of single-qubit I/X/Y/Z) with a complex
// coefficient. The word is stored leftmost-qubit-first, mirroring ket labels.
class PauliString {
 public:
  PauliString() = default;  // zero-qubit identity
  explicit PauliString(std::string_view word,
                       std::complex<double> coefficient = {1.0, 0.0});
  static PauliString identity(int n_qubits);

  int n_qubits() const { return static_cast<int>(letters_.size()); }
  PauliOp letter(int qubit) const { return letters_.at(qubit); }
  const std::vector<PauliOp>& letters() const { return letters_; }
  std::complex<double> coefficient() const { return coefficient_; }
  std::string word() const;
  bool is_identity_word() const;
  int weight() const;  // number of non-identity letters

  // Mask form consumed by the kernels; the stored coefficient is NOT folded
  // in (kernels apply the bare word). Registers wider than 64 qubits are
  // rejected, far beyond anything dense simulation allows anyway.
  kernels::PauliMasks masks() const;

  // Same word acting on a register extended by `extra_qubits` identity
  // qubits appended on the right (e.g. ancillas after the system register).
  PauliString padded(int extra_qubits) const;

  friend bool operator==(const PauliString& a, const PauliString& b) = default;

 private:
  std::vector<PauliOp> letters_;
  std::complex<double> coefficient_{1.0, 0.0};
};

// Shift a system-register mask onto a wider register with `extra_qubits`
// identity qubits appended on the right. Cheap enough for hot loops.
inline kernels::PauliMasks pad_masks(const kernels::PauliMasks& pm, int extra_qubits) {
  return {pm.flip << extra_qubits, pm.phase << extra_qubits, pm.i_power};
}

// A Hermitian observable: a real-weighted sum of Pauli words. Canonical
// form: duplicate words merged, exact-zero weights dropped, terms sorted by
// word (lexicographic), so equal observables compare equal and iteration
// order is deterministic.
class Observable {
 public:
  struct Term {
    double weight;
    PauliString op;  // unit coefficient
  };

  explicit Observable(int n_qubits) : n_qubits_(n_qubits) {}
  Observable(int n_qubits, std::vector<std::pair<double, std::string>> terms);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t n_terms() const { return terms_.size(); }

  // <x|H|x> for a basis index; only I/Z-only words contribute.
  double diagonal_element(std::uint64_t basis_index) const;

  // Dense matrix in the computational basis. Guarded by the register-width
  // cap shared with the eigensolver (see spectral.hpp).
  Eigen::MatrixXcd to_dense() const;

 private:
  int n_qubits_;
  std::vector<Term> terms_;
};

// Widest register dense materialization / eigendecomposition will accept.
inline constexpr int kMaxDenseQubits = 15;

}  // namespace tepid
