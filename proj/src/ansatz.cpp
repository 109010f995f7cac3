#include "tepid/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "tepid/errors.hpp"
#include "tepid/kernels.hpp"
#include "tepid/polar.hpp"

namespace tepid {

ComputationalSubspace ComputationalSubspace::from_bitstrings(
    int n_system, const std::vector<std::string>& bits) {
  std::vector<std::uint64_t> indices;
  indices.reserve(bits.size());
  for (const std::string& b : bits) {
    if (static_cast<int>(b.size()) != n_system) {
      throw std::invalid_argument("subspace bitstring '" + b +
                                  "' does not match the register width");
    }
    std::uint64_t index = 0;
    for (char c : b) {
      if (c != '0' && c != '1') {
        throw std::invalid_argument("subspace bitstring '" + b + "' has non-binary characters");
      }
      index = (index << 1) | static_cast<std::uint64_t>(c - '0');
    }
    indices.push_back(index);
  }
  return from_indices(n_system, std::move(indices));
}

ComputationalSubspace ComputationalSubspace::from_indices(int n_system,
                                                          std::vector<std::uint64_t> indices) {
  if (n_system < 1) throw std::invalid_argument("subspace needs at least one system qubit");
  if (n_system > 30) throw ResourceError("system register limited to 30 qubits");
  if (indices.empty()) throw std::invalid_argument("empty computational subspace");
  const std::uint64_t dim = std::uint64_t(1) << n_system;
  std::set<std::uint64_t> seen;
  for (std::uint64_t idx : indices) {
    if (idx >= dim) throw std::invalid_argument("subspace element out of register range");
    if (!seen.insert(idx).second) {
      throw std::invalid_argument("duplicate computational subspace element");
    }
  }
  if (indices.size() > dim) throw ResourceError("subspace larger than the register");
  ComputationalSubspace s;
  s.n_system = n_system;
  s.elements = std::move(indices);
  return s;
}

std::vector<std::string> ComputationalSubspace::bitstrings() const {
  std::vector<std::string> out;
  out.reserve(elements.size());
  for (std::uint64_t idx : elements) {
    std::string b(static_cast<std::size_t>(n_system), '0');
    for (int q = 0; q < n_system; ++q) {
      if ((idx >> (n_system - 1 - q)) & 1u) b[static_cast<std::size_t>(q)] = '1';
    }
    out.push_back(std::move(b));
  }
  return out;
}

int ancilla_count(int m) {
  if (m < 1) throw std::invalid_argument("subspace size must be positive");
  int bits = 0;
  while ((1 << bits) < m) ++bits;
  return bits;
}

Eigen::MatrixXd givens_rotation(int k, double angle, int dim) {
  if (dim < 2 || k < 1 || k >= dim) {
    throw std::invalid_argument("rotation plane out of range");
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(dim, dim);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  g(k - 1, k - 1) = c;
  g(k - 1, k) = -s;
  g(k, k - 1) = s;
  g(k, k) = c;
  return g;
}

StateVector prepare_ancilla_state(const std::vector<double>& phi, int n_ancilla) {
  const std::size_t m = phi.size() + 1;
  if ((std::size_t(1) << n_ancilla) < m) {
    throw std::invalid_argument("ancilla register too small for the amplitude count");
  }
  StateVector xi(n_ancilla);  // |0...0>
  auto& amps = xi.amplitudes();
  // Cascade of plane rotations, lowest plane first: step k applies
  // G^{(k+1,k+2)} to components k and k+1, pushing the residual amplitude
  // one component down. Afterwards amplitude j is exactly sqrt(mu_{j+1}).
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double c = std::cos(phi[k]);
    const double s = std::sin(phi[k]);
    const std::complex<double> hi = amps[k];
    const std::complex<double> lo = amps[k + 1];
    amps[k] = c * hi - s * lo;
    amps[k + 1] = s * hi + c * lo;
  }
  return xi;
}

StateVector prepare_purification(const std::vector<double>& phi,
                                 const ComputationalSubspace& subspace) {
  const std::size_t m = static_cast<std::size_t>(subspace.m());
  if (phi.size() + 1 != m) {
    throw std::invalid_argument("angle count does not match the subspace size");
  }
  const int n_anc = ancilla_count(subspace.m());
  // Signed amplitudes: the rotation-cascade circuits realize exactly these,
  // sign included, for any angles.
  const std::vector<double> amp = polar_amplitudes(phi);
  StateVector psi = StateVector::zero_workspace(subspace.n_system + n_anc);
  const std::uint64_t da = std::uint64_t(1) << n_anc;
  for (std::size_t j = 0; j < m; ++j) {
    psi.amplitudes()[subspace.elements[j] * da + j] = {amp[j], 0.0};
  }
  return psi;
}

void apply_pauli_exponential_inplace(StateVector& state, StateVector& scratch,
                                     const PauliString& generator, double theta) {
  const int extra = state.n_qubits() - generator.n_qubits();
  if (extra < 0) throw std::invalid_argument("generator wider than the register");
  if (scratch.dim() != state.dim()) {
    throw std::invalid_argument("scratch register width mismatch");
  }
  const kernels::PauliMasks pm = pad_masks(generator.masks(), extra);
  kernels::pauli_apply(scratch.data(), state.data(), state.dim(), pm);
  kernels::axpby({std::cos(theta), 0.0}, state.data(), {0.0, std::sin(theta)},
                 scratch.data(), state.dim());
}

void apply_adaptive_inplace(const AdaptiveAnsatz& ansatz, StateVector& state) {
  if (ansatz.generators.size() != ansatz.angles.size()) {
    throw std::invalid_argument("generator/angle count mismatch");
  }
  if (state.n_qubits() < ansatz.n_system) {
    throw std::invalid_argument("state narrower than the ansatz register");
  }
  StateVector scratch = StateVector::zero_workspace(state.n_qubits());
  for (std::size_t l = 0; l < ansatz.generators.size(); ++l) {
    const PauliString& gen = ansatz.generators[l];
    if (gen.n_qubits() != ansatz.n_system) {
      throw std::invalid_argument("generator '" + gen.word() +
                                  "' does not act on the system register");
    }
    apply_pauli_exponential_inplace(state, scratch, gen, ansatz.angles[l]);
  }
}

StateVector apply_adaptive(const AdaptiveAnsatz& ansatz, const StateVector& state) {
  StateVector out = state;
  apply_adaptive_inplace(ansatz, out);
  return out;
}

}  // namespace tepid
