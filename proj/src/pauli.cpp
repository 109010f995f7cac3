#include "tepid/pauli.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

#include "tepid/errors.hpp"

namespace tepid {

char pauli_char(PauliOp op) {
  switch (op) {
    case PauliOp::I: return 'I';
    case PauliOp::X: return 'X';
    case PauliOp::Y: return 'Y';
    default: return 'Z';
  }
}

static PauliOp pauli_from_char(char c) {
  switch (c) {
    case 'I': return PauliOp::I;
    case 'X': return PauliOp::X;
    case 'Y': return PauliOp::Y;
    case 'Z': return PauliOp::Z;
    default:
      throw std::invalid_argument(std::string("invalid Pauli letter '") + c +
                                  "' (expected I, X, Y, or Z)");
  }
}

PauliString::PauliString(std::string_view word, std::complex<double> coefficient)
    : coefficient_(coefficient) {
  letters_.reserve(word.size());
  for (char c : word) letters_.push_back(pauli_from_char(c));
}

PauliString PauliString::identity(int n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("negative qubit count");
  PauliString p;
  p.letters_.assign(static_cast<std::size_t>(n_qubits), PauliOp::I);
  return p;
}

std::string PauliString::word() const {
  std::string w;
  w.reserve(letters_.size());
  for (PauliOp op : letters_) w.push_back(pauli_char(op));
  return w;
}

bool PauliString::is_identity_word() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](PauliOp op) { return op == PauliOp::I; });
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(),
                                        [](PauliOp op) { return op != PauliOp::I; }));
}

kernels::PauliMasks PauliString::masks() const {
  const int n = n_qubits();
  if (n > 64) throw ResourceError("Pauli mask form limited to 64 qubits");
  kernels::PauliMasks pm;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t(1) << (n - 1 - q);
    switch (letters_[q]) {
      case PauliOp::I: break;
      case PauliOp::X: pm.flip |= bit; break;
      case PauliOp::Y:
        pm.flip |= bit;
        pm.phase |= bit;
        pm.i_power = (pm.i_power + 1u) & 3u;
        break;
      case PauliOp::Z: pm.phase |= bit; break;
    }
  }
  return pm;
}

PauliString PauliString::padded(int extra_qubits) const {
  if (extra_qubits < 0) throw std::invalid_argument("negative padding");
  PauliString p = *this;
  p.letters_.insert(p.letters_.end(), static_cast<std::size_t>(extra_qubits), PauliOp::I);
  return p;
}

Observable::Observable(int n_qubits, std::vector<std::pair<double, std::string>> terms)
    : n_qubits_(n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("negative qubit count");
  std::map<std::string, double> merged;
  for (auto& [weight, word] : terms) {
    if (static_cast<int>(word.size()) != n_qubits) {
      throw std::invalid_argument("observable term '" + word +
                                  "' does not match the register width");
    }
    merged[word] += weight;
  }
  for (auto& [word, weight] : merged) {
    if (weight == 0.0) continue;
    terms_.push_back({weight, PauliString(word)});
  }
}

double Observable::diagonal_element(std::uint64_t basis_index) const {
  double value = 0.0;
  for (const Term& t : terms_) {
    const kernels::PauliMasks pm = t.op.masks();
    if (pm.flip != 0) continue;  // any X or Y letter has no diagonal part
    const bool neg = std::popcount(basis_index & pm.phase) & 1u;
    value += neg ? -t.weight : t.weight;
  }
  return value;
}

Eigen::MatrixXcd Observable::to_dense() const {
  if (n_qubits_ > kMaxDenseQubits) {
    throw ResourceError("dense materialization refused beyond " +
                        std::to_string(kMaxDenseQubits) + " qubits");
  }
  const std::size_t dim = std::size_t(1) << n_qubits_;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  constexpr std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const Term& t : terms_) {
    const kernels::PauliMasks pm = t.op.masks();
    for (std::size_t x = 0; x < dim; ++x) {
      const bool neg = std::popcount(x & pm.phase) & 1u;
      std::complex<double> v = t.weight * i_pow[pm.i_power & 3u];
      if (neg) v = -v;
      mat(static_cast<Eigen::Index>(x ^ pm.flip), static_cast<Eigen::Index>(x)) += v;
    }
  }
  return mat;
}

}  // namespace tepid
