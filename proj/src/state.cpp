#include "tepid/state.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "tepid/errors.hpp"
#include "tepid/kernels.hpp"

namespace tepid {

namespace {
constexpr double kImagResidueTol = 1e-10;

std::size_t checked_dim(int n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("negative qubit count");
  if (n_qubits > 30) throw ResourceError("statevector register limited to 30 qubits");
  return std::size_t(1) << n_qubits;
}
}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  amps_.assign(checked_dim(n_qubits), {0.0, 0.0});
  amps_[0] = {1.0, 0.0};
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t index) {
  const std::size_t dim = checked_dim(n_qubits);
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  std::vector<std::complex<double>> amps(dim, {0.0, 0.0});
  amps[index] = {1.0, 0.0};
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::zero_workspace(int n_qubits) {
  const std::size_t dim = checked_dim(n_qubits);
  return StateVector(n_qubits, std::vector<std::complex<double>>(dim, {0.0, 0.0}));
}

double StateVector::norm() const {
  return std::sqrt(kernels::norm_sq(amps_.data(), amps_.size()));
}

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
  const std::size_t dim = checked_dim(n_qubits);
  entries_ = Eigen::MatrixXcd::Zero(dim, dim);
}

DensityMatrix::DensityMatrix(int n_qubits, Eigen::MatrixXcd entries)
    : n_qubits_(n_qubits), entries_(std::move(entries)) {
  const std::size_t dim = checked_dim(n_qubits);
  if (entries_.rows() != static_cast<Eigen::Index>(dim) ||
      entries_.cols() != static_cast<Eigen::Index>(dim)) {
    throw std::invalid_argument("density matrix shape does not match qubit count");
  }
}

double DensityMatrix::contract_residue() const {
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  const double tr = std::abs(entries_.trace().real() - 1.0) +
                    std::abs(entries_.trace().imag());
  return std::max(herm, tr);
}

StateVector apply_pauli(const PauliString& op, const StateVector& psi) {
  if (op.n_qubits() != psi.n_qubits()) {
    throw std::invalid_argument("Pauli word width does not match the register");
  }
  StateVector out = StateVector::zero_workspace(psi.n_qubits());
  kernels::pauli_apply(out.data(), psi.data(), psi.dim(), op.masks());
  const std::complex<double> c = op.coefficient();
  if (c != std::complex<double>(1.0, 0.0)) {
    kernels::axpby(c, out.data(), {0.0, 0.0}, psi.data(), psi.dim());
  }
  return out;
}

void apply_observable_into(StateVector& out, StateVector& scratch,
                           const Observable& obs, const StateVector& psi) {
  const int extra = psi.n_qubits() - obs.n_qubits();
  if (extra < 0) throw std::invalid_argument("observable wider than the register");
  const std::size_t dim = psi.dim();
  std::fill(out.amplitudes().begin(), out.amplitudes().end(),
            std::complex<double>{0.0, 0.0});
  for (const Observable::Term& t : obs.terms()) {
    kernels::pauli_apply(scratch.data(), psi.data(), dim, pad_masks(t.op.masks(), extra));
    kernels::axpby({1.0, 0.0}, out.data(), {t.weight, 0.0}, scratch.data(), dim);
  }
}

StateVector apply_observable(const Observable& obs, const StateVector& psi) {
  StateVector out = StateVector::zero_workspace(psi.n_qubits());
  StateVector scratch = StateVector::zero_workspace(psi.n_qubits());
  apply_observable_into(out, scratch, obs, psi);
  return out;
}

double expectation(const Observable& obs, const StateVector& psi) {
  const int extra = psi.n_qubits() - obs.n_qubits();
  if (extra < 0) throw std::invalid_argument("observable wider than the register");
  std::complex<double> acc = 0.0;
  for (const Observable::Term& t : obs.terms()) {
    acc += t.weight *
           kernels::pauli_dot(psi.data(), psi.data(), psi.dim(), pad_masks(t.op.masks(), extra));
  }
  if (std::abs(acc.imag()) > kImagResidueTol) {
    throw NumericalError("expectation imaginary residue " + std::to_string(acc.imag()) +
                         " exceeds tolerance (observable not Hermitian?)");
  }
  return acc.real();
}

double expectation(const Observable& obs, const DensityMatrix& rho) {
  if (obs.n_qubits() != rho.n_qubits()) {
    throw std::invalid_argument("observable width does not match the density matrix");
  }
  const std::size_t dim = rho.dim();
  constexpr std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::complex<double> acc = 0.0;
  // Tr(P rho) = sum_x c(x^f) rho[x^f, x] with P|y> = c(y) |y^f>.
  for (const Observable::Term& t : obs.terms()) {
    const kernels::PauliMasks pm = t.op.masks();
    std::complex<double> tr = 0.0;
    for (std::size_t x = 0; x < dim; ++x) {
      const std::size_t y = x ^ pm.flip;
      const bool neg = std::popcount(y & pm.phase) & 1u;
      std::complex<double> c = i_pow[pm.i_power & 3u];
      if (neg) c = -c;
      tr += c * rho.entries()(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
    }
    acc += t.weight * tr;
  }
  if (std::abs(acc.imag()) > kImagResidueTol) {
    throw NumericalError("expectation imaginary residue exceeds tolerance");
  }
  return acc.real();
}

DensityMatrix partial_trace_ancilla(const StateVector& psi, int n_system, int n_ancilla) {
  if (n_system < 0 || n_ancilla < 0 || n_system + n_ancilla != psi.n_qubits()) {
    throw std::invalid_argument("system/ancilla split does not match the register");
  }
  const std::size_t ds = std::size_t(1) << n_system;
  const std::size_t da = std::size_t(1) << n_ancilla;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ds, ds);
  const std::complex<double>* amp = psi.data();
  for (std::size_t s = 0; s < ds; ++s) {
    for (std::size_t sp = 0; sp <= s; ++sp) {
      std::complex<double> acc = 0.0;
      for (std::size_t a = 0; a < da; ++a) {
        acc += amp[s * da + a] * std::conj(amp[sp * da + a]);
      }
      rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(sp)) = acc;
      if (sp != s) {
        rho(static_cast<Eigen::Index>(sp), static_cast<Eigen::Index>(s)) = std::conj(acc);
      }
    }
  }
  return DensityMatrix(n_system, std::move(rho));
}

}  // namespace tepid
