#include "tepid/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "tepid/errors.hpp"
#include "tepid/kernels.hpp"

namespace tepid {

namespace {

constexpr double kClipFloor = -1e-10;

// Clip the tiny negatives an eigensolver leaves on a PSD matrix; complain
// beyond the floor.
double clip_probability(double p, const char* what) {
  if (p >= 0.0) return p;
  if (p >= kClipFloor) return 0.0;
  throw NumericalError(std::string(what) + " eigenvalue " + std::to_string(p) +
                       " below the positivity floor");
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solve_hermitian(const Eigen::MatrixXcd& mat,
                                                                bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  solver.compute(mat, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed to converge");
  }
  return solver;
}

std::vector<std::vector<int>> group_by_gap(const Eigen::VectorXd& energies, double tol) {
  std::vector<std::vector<int>> groups;
  for (int k = 0; k < energies.size(); ++k) {
    if (groups.empty() || energies[k] - energies[groups.back().back()] > tol) {
      groups.push_back({k});
    } else {
      groups.back().push_back(k);
    }
  }
  return groups;
}

}  // namespace

const std::vector<int>& EigenSystem::group_of(int k) const {
  for (const auto& g : degeneracy_groups) {
    if (k >= g.front() && k <= g.back()) return g;
  }
  throw std::invalid_argument("eigenvalue index out of range");
}

EigenSystem eigensystem(const Observable& obs, double group_tol) {
  auto solver = solve_hermitian(obs.to_dense(), true);
  EigenSystem sys;
  sys.n_qubits = obs.n_qubits();
  sys.group_tol = group_tol;
  sys.energies = solver.eigenvalues();
  sys.vectors = solver.eigenvectors();
  sys.degeneracy_groups = group_by_gap(sys.energies, group_tol);
  return sys;
}

Eigen::VectorXd eigenvalues_only(const Observable& obs) {
  return solve_hermitian(obs.to_dense(), false).eigenvalues();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.n_qubits() != sigma.n_qubits()) {
    throw std::invalid_argument("fidelity requires equal register widths");
  }
  auto rho_eig = solve_hermitian(rho.entries(), true);
  Eigen::VectorXd sq = rho_eig.eigenvalues();
  for (Eigen::Index i = 0; i < sq.size(); ++i) {
    sq[i] = std::sqrt(clip_probability(sq[i], "density matrix"));
  }
  const Eigen::MatrixXcd root =
      rho_eig.eigenvectors() * sq.asDiagonal() * rho_eig.eigenvectors().adjoint();
  Eigen::MatrixXcd inner = root * sigma.entries() * root;
  inner = ((inner + inner.adjoint()) * 0.5).eval();  // scrub rounding skew
  auto inner_eig = solve_hermitian(inner, false);
  double total = 0.0;
  for (Eigen::Index i = 0; i < inner_eig.eigenvalues().size(); ++i) {
    total += std::sqrt(clip_probability(inner_eig.eigenvalues()[i], "fidelity kernel"));
  }
  return total * total;
}

double pure_fidelity(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("fidelity requires equal register widths");
  }
  return std::norm(kernels::dot(a.data(), b.data(), a.dim()));
}

double subspace_fidelity(const StateVector& psi, const std::vector<StateVector>& basis) {
  if (basis.empty()) throw std::invalid_argument("empty eigenspace basis");
  constexpr double kOrthoTol = 1e-8;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].n_qubits() != psi.n_qubits()) {
      throw std::invalid_argument("fidelity requires equal register widths");
    }
    for (std::size_t j = 0; j <= i; ++j) {
      const std::complex<double> g =
          kernels::dot(basis[i].data(), basis[j].data(), basis[i].dim());
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - expect) > kOrthoTol) {
        throw std::invalid_argument("eigenspace basis is not orthonormal");
      }
    }
  }
  double total = 0.0;
  for (const StateVector& b : basis) total += pure_fidelity(psi, b);
  return total;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  auto solver = solve_hermitian(rho.entries(), false);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = clip_probability(solver.eigenvalues()[i], "density matrix");
    if (p < 1e-300) continue;
    s -= p * std::log(p);
  }
  return s;
}

double free_energy_of_state(const Observable& obs, const DensityMatrix& rho, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("inverse temperature must be positive");
  return expectation(obs, rho) - von_neumann_entropy(rho) / beta;
}

}  // namespace tepid
