#include "tepid/xxz.hpp"

#include <cmath>
#include <stdexcept>

#include "tepid/errors.hpp"

namespace tepid {

XXZPhase classify_phase(double j_z) {
  if (j_z < -1.0) return XXZPhase::ferromagnetic;
  if (j_z > 1.0) return XXZPhase::antiferromagnetic;
  if (j_z == -1.0 || j_z == 1.0) return XXZPhase::boundary;
  return XXZPhase::paramagnetic;
}

std::string phase_name(XXZPhase phase) {
  switch (phase) {
    case XXZPhase::ferromagnetic: return "ferromagnetic";
    case XXZPhase::paramagnetic: return "paramagnetic";
    case XXZPhase::antiferromagnetic: return "antiferromagnetic";
    default: return "boundary";
  }
}

Observable build_xxz(const XXZConfig& config) {
  const int n = config.n_sites;
  if (n < 2) throw std::invalid_argument("XXZ chain needs at least 2 sites");
  std::vector<std::pair<double, std::string>> terms;
  for (int k = 0; k + 1 < n; ++k) {  // open chain: n-1 bonds
    for (char letter : {'X', 'Y', 'Z'}) {
      std::string word(static_cast<std::size_t>(n), 'I');
      word[static_cast<std::size_t>(k)] = letter;
      word[static_cast<std::size_t>(k + 1)] = letter;
      terms.emplace_back(letter == 'Z' ? config.j_z : 1.0, word);
    }
  }
  return Observable(n, std::move(terms));
}

GibbsReference::GibbsReference(const Observable& hamiltonian, double beta, double group_tol)
    : hamiltonian_(hamiltonian), beta_(beta) {
  if (beta <= 0.0) throw std::invalid_argument("inverse temperature must be positive");
  spectrum_ = eigensystem(hamiltonian, group_tol);
  const Eigen::VectorXd& e = spectrum_.energies;
  weights_.resize(static_cast<std::size_t>(e.size()));
  double total = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    weights_[static_cast<std::size_t>(k)] = std::exp(-beta * (e[k] - e[0]));
    total += weights_[static_cast<std::size_t>(k)];
  }
  for (double& w : weights_) w /= total;
}

DensityMatrix GibbsReference::exact_state() const {
  const Eigen::Index dim = spectrum_.energies.size();
  Eigen::VectorXd w(dim);
  for (Eigen::Index k = 0; k < dim; ++k) w[k] = weights_[static_cast<std::size_t>(k)];
  Eigen::MatrixXcd rho =
      spectrum_.vectors * w.asDiagonal() * spectrum_.vectors.adjoint();
  return DensityMatrix(spectrum_.n_qubits, std::move(rho));
}

double GibbsReference::free_energy_exact() const {
  const Eigen::VectorXd& e = spectrum_.energies;
  double z_shifted = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) z_shifted += std::exp(-beta_ * (e[k] - e[0]));
  return e[0] - std::log(z_shifted) / beta_;
}

TruncatedGibbs GibbsReference::truncated(int m, TruncationMode mode) const {
  const Eigen::Index dim = spectrum_.energies.size();
  if (m < 1 || m > dim) throw std::invalid_argument("truncation rank out of range");

  // Weights assigned to each retained level, possibly extended to the end of
  // the degeneracy group the cut lands in.
  std::vector<double> assigned(weights_.begin(), weights_.begin() + m);
  const std::vector<int>& cut_group = spectrum_.group_of(m - 1);
  if (cut_group.back() > m - 1) {
    if (mode == TruncationMode::strict) {
      throw NumericalError(
          "rank-" + std::to_string(m) + " truncation splits a degeneracy group (levels " +
          std::to_string(cut_group.front() + 1) + ".." + std::to_string(cut_group.back() + 1) +
          ")");
    }
    // Spread the captured weight of the cut group uniformly over the whole
    // group; total captured mass is unchanged.
    double captured = 0.0;
    for (int k = cut_group.front(); k < m; ++k) {
      captured += weights_[static_cast<std::size_t>(k)];
    }
    const double share = captured / static_cast<double>(cut_group.size());
    assigned.resize(static_cast<std::size_t>(cut_group.back()) + 1);
    for (int k : cut_group) assigned[static_cast<std::size_t>(k)] = share;
  }

  double total = 0.0;
  for (double w : assigned) total += w;
  for (double& w : assigned) w /= total;

  const Eigen::Index rank = static_cast<Eigen::Index>(assigned.size());
  Eigen::VectorXd w(rank);
  for (Eigen::Index k = 0; k < rank; ++k) w[k] = assigned[static_cast<std::size_t>(k)];
  const Eigen::MatrixXcd v = spectrum_.vectors.leftCols(rank);
  TruncatedGibbs out{DensityMatrix(spectrum_.n_qubits, v * w.asDiagonal() * v.adjoint()),
                     0.0, assigned};

  double energy = 0.0, entropy = 0.0;
  for (Eigen::Index k = 0; k < rank; ++k) {
    const double p = w[k];
    energy += p * spectrum_.energies[k];
    if (p >= 1e-300) entropy -= p * std::log(p);
  }
  out.free_energy_floor = energy - entropy / beta_;
  return out;
}

DensityMatrix gibbs_exact(const Observable& hamiltonian, double beta) {
  return GibbsReference(hamiltonian, beta).exact_state();
}

TruncatedGibbs gibbs_truncated(const Observable& hamiltonian, double beta, int m,
                               TruncationMode mode) {
  return GibbsReference(hamiltonian, beta).truncated(m, mode);
}

RelativeError relative_error(double value, double reference) {
  if (std::abs(reference) < 1e-300) {
    return {std::abs(value - reference), true};
  }
  return {std::abs((value - reference) / reference), false};
}

}  // namespace tepid
