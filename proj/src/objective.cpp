#include "tepid/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "tepid/errors.hpp"
#include "tepid/polar.hpp"
#include "parallel_util.hpp"

namespace tepid {

namespace {
constexpr double kGradResidueTol = 1e-9;
constexpr double kZeroProb = 1e-300;

double entropy_unchecked(const std::vector<double>& mu) {
  double s = 0.0;
  for (double p : mu) {
    if (p < kZeroProb) continue;
    s -= p * std::log(p);
  }
  return s;
}
}  // namespace

double shannon_entropy(const std::vector<double>& mu) {
  if (mu.empty()) throw std::invalid_argument("empty probability vector");
  double sum = 0.0;
  for (double p : mu) {
    if (p < -1e-12) throw std::invalid_argument("negative probability component");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
  std::vector<double> clipped = mu;
  for (double& p : clipped) p = std::max(p, 0.0);
  return entropy_unchecked(clipped);
}

double GradientVector::inf_norm() const {
  double m = 0.0;
  for (double v : d_phi) m = std::max(m, std::abs(v));
  for (double v : d_theta) m = std::max(m, std::abs(v));
  return m;
}

FreeEnergyObjective::FreeEnergyObjective(const Observable& hamiltonian, double beta,
                                         const ComputationalSubspace& subspace)
    : hamiltonian_(hamiltonian), beta_(beta), subspace_(subspace) {
  if (beta <= 0.0) throw std::invalid_argument("inverse temperature must be positive");
  if (hamiltonian.n_qubits() != subspace.n_system) {
    throw std::invalid_argument("Hamiltonian width does not match the subspace register");
  }
  n_ancilla_ = ancilla_count(subspace_.m());
  n_total_ = subspace_.n_system + n_ancilla_;
  if (n_total_ > 30) throw ResourceError("purified register limited to 30 qubits");
  dim_ = std::size_t(1) << n_total_;
  for (const Observable::Term& t : hamiltonian_.terms()) {
    padded_terms_.emplace_back(t.weight, pad_masks(t.op.masks(), n_ancilla_));
  }
  h_.resize(dim_);
  lambda_.resize(dim_);
  scratch_.resize(dim_);
  sigma_.resize(dim_);
}

void FreeEnergyObjective::set_generators(std::vector<PauliString> generators) {
  generator_masks_.clear();
  generators_ = std::move(generators);
  for (const PauliString& g : generators_) {
    if (g.n_qubits() != subspace_.n_system) {
      throw std::invalid_argument("generator '" + g.word() +
                                  "' does not act on the system register");
    }
    generator_masks_.push_back(pad_masks(g.masks(), n_ancilla_));
  }
  sigma_.resize((generators_.size() + 1) * dim_);
}

void FreeEnergyObjective::push_generator(const PauliString& generator) {
  if (generator.n_qubits() != subspace_.n_system) {
    throw std::invalid_argument("generator '" + generator.word() +
                                "' does not act on the system register");
  }
  generators_.push_back(generator);
  generator_masks_.push_back(pad_masks(generator.masks(), n_ancilla_));
  sigma_.resize((generators_.size() + 1) * dim_);
}

void FreeEnergyObjective::build_purification(std::span<const double> phi,
                                             std::complex<double>* out) const {
  std::fill(out, out + dim_, std::complex<double>{0.0, 0.0});
  // Signed amplitudes keep the value consistent with polar_jacobian (and the
  // compiled rotation circuits) when the optimizer leaves the first quadrant.
  const std::vector<double> amp =
      polar_amplitudes(std::vector<double>(phi.begin(), phi.end()));
  const std::uint64_t da = std::uint64_t(1) << n_ancilla_;
  for (std::size_t j = 0; j < amp.size(); ++j) {
    out[subspace_.elements[j] * da + j] = {amp[j], 0.0};
  }
}

double FreeEnergyObjective::energy_and_h(const std::complex<double>* psi,
                                         std::complex<double>* h) {
  std::fill(h, h + dim_, std::complex<double>{0.0, 0.0});
  for (const auto& [w, pm] : padded_terms_) {
    kernels::pauli_apply(scratch_.data(), psi, dim_, pm);
    kernels::axpby({1.0, 0.0}, h, {w, 0.0}, scratch_.data(), dim_);
  }
  const std::complex<double> e = kernels::dot(psi, h, dim_);
  if (std::abs(e.imag()) > kGradResidueTol) {
    throw NumericalError("energy imaginary residue exceeds tolerance");
  }
  return e.real();
}

double FreeEnergyObjective::value(std::span<const double> x) {
  if (static_cast<int>(x.size()) != n_parameters()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  const auto phi = x.first(static_cast<std::size_t>(n_phi()));
  const std::vector<double> mu = polar_to_mu(std::vector<double>(phi.begin(), phi.end()));
  std::complex<double>* psi = sigma_.data();
  build_purification(phi, psi);
  for (std::size_t l = 0; l < generators_.size(); ++l) {
    const double theta = x[static_cast<std::size_t>(n_phi()) + l];
    kernels::pauli_apply(scratch_.data(), psi, dim_, generator_masks_[l]);
    kernels::axpby({std::cos(theta), 0.0}, psi, {0.0, std::sin(theta)}, scratch_.data(),
                   dim_);
  }
  const double energy = energy_and_h(psi, h_.data());
  return energy - entropy_unchecked(mu) / beta_;
}

double FreeEnergyObjective::value_and_gradient(std::span<const double> x,
                                               std::span<double> grad) {
  if (static_cast<int>(x.size()) != n_parameters() || grad.size() != x.size()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  const std::size_t n = generators_.size();
  const auto phi_span = x.first(static_cast<std::size_t>(n_phi()));
  const std::vector<double> phi(phi_span.begin(), phi_span.end());
  const std::vector<double> amp = polar_amplitudes(phi);
  std::vector<double> mu = amp;
  for (double& v : mu) v *= v;

  // Forward sweep: sigma_l for l = 0..N, sigma_0 the bare purification.
  build_purification(phi_span, sigma_.data());
  for (std::size_t l = 0; l < n; ++l) {
    const double theta = x[static_cast<std::size_t>(n_phi()) + l];
    std::complex<double>* prev = sigma_.data() + l * dim_;
    std::complex<double>* next = sigma_.data() + (l + 1) * dim_;
    kernels::pauli_apply(next, prev, dim_, generator_masks_[l]);
    // next = cos(theta) prev + i sin(theta) (T prev)
    kernels::axpby({0.0, std::sin(theta)}, next, {std::cos(theta), 0.0}, prev, dim_);
  }
  const std::complex<double>* psi = sigma_.data() + n * dim_;

  const double energy = energy_and_h(psi, h_.data());

  // Backward sweep: lambda_l = E_{l+1}^dag ... E_N^dag H|Psi>.
  std::copy(h_.begin(), h_.end(), lambda_.begin());
  for (std::size_t l = n; l-- > 0;) {
    const double theta = x[static_cast<std::size_t>(n_phi()) + l];
    const std::complex<double> inner = kernels::pauli_dot(
        lambda_.data(), sigma_.data() + (l + 1) * dim_, dim_, generator_masks_[l]);
    grad[static_cast<std::size_t>(n_phi()) + l] = -2.0 * inner.imag();
    // lambda <- exp(-i theta T) lambda
    kernels::pauli_apply(scratch_.data(), lambda_.data(), dim_, generator_masks_[l]);
    kernels::axpby({std::cos(theta), 0.0}, lambda_.data(), {0.0, -std::sin(theta)},
                   scratch_.data(), dim_);
  }

  // Angle gradients: energy part contracts lambda_0 with the sparse
  // derivative of the purification; entropy part follows the chain rule
  // through mu = r^2 with the signed amplitude r (sign matters outside the
  // first quadrant, where sqrt(mu) would flip the derivative).
  const Eigen::MatrixXd jac = polar_jacobian(phi);
  const std::uint64_t da = std::uint64_t(1) << n_ancilla_;
  for (int l = 0; l < n_phi(); ++l) {
    double acc = 0.0;
    for (int j = 0; j < subspace_.m(); ++j) {
      const std::size_t idx =
          subspace_.elements[static_cast<std::size_t>(j)] * da + static_cast<std::size_t>(j);
      const double jac_jl = jac(j, l);
      if (jac_jl != 0.0) acc += 2.0 * lambda_[idx].real() * jac_jl;
      const double p = mu[static_cast<std::size_t>(j)];
      if (p >= kZeroProb) {
        acc += (2.0 / beta_) * amp[static_cast<std::size_t>(j)] * (std::log(p) + 1.0) *
               jac_jl;
      }
    }
    grad[static_cast<std::size_t>(l)] = acc;
  }

  return energy - entropy_unchecked(mu) / beta_;
}

StateVector FreeEnergyObjective::state(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_parameters()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  const auto phi = x.first(static_cast<std::size_t>(n_phi()));
  StateVector psi =
      prepare_purification(std::vector<double>(phi.begin(), phi.end()), subspace_);
  StateVector scratch = StateVector::zero_workspace(n_total_);
  for (std::size_t l = 0; l < generators_.size(); ++l) {
    apply_pauli_exponential_inplace(psi, scratch, generators_[l],
                                    x[static_cast<std::size_t>(n_phi()) + l]);
  }
  return psi;
}

AdaptiveAnsatz FreeEnergyObjective::ansatz_at(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_parameters()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  AdaptiveAnsatz a;
  a.n_system = subspace_.n_system;
  a.generators = generators_;
  a.angles.assign(x.begin() + n_phi(), x.end());
  return a;
}

double free_energy(const Observable& hamiltonian, double beta,
                   const ComputationalSubspace& subspace, const std::vector<double>& phi,
                   const AdaptiveAnsatz& ansatz) {
  FreeEnergyObjective obj(hamiltonian, beta, subspace);
  obj.set_generators(ansatz.generators);
  std::vector<double> x = phi;
  x.insert(x.end(), ansatz.angles.begin(), ansatz.angles.end());
  return obj.value(x);
}

GradientVector analytic_gradient(const Observable& hamiltonian, double beta,
                                 const ComputationalSubspace& subspace,
                                 const std::vector<double>& phi,
                                 const AdaptiveAnsatz& ansatz) {
  FreeEnergyObjective obj(hamiltonian, beta, subspace);
  obj.set_generators(ansatz.generators);
  std::vector<double> x = phi;
  x.insert(x.end(), ansatz.angles.begin(), ansatz.angles.end());
  std::vector<double> g(x.size());
  obj.value_and_gradient(x, g);
  GradientVector out;
  out.d_phi.assign(g.begin(), g.begin() + static_cast<long>(phi.size()));
  out.d_theta.assign(g.begin() + static_cast<long>(phi.size()), g.end());
  return out;
}

std::vector<double> pool_gradients(const StateVector& psi,
                                   const std::vector<PauliString>& pool,
                                   const Observable& hamiltonian, int workers) {
  const int extra = psi.n_qubits() - hamiltonian.n_qubits();
  if (extra < 0) throw std::invalid_argument("observable wider than the register");
  const StateVector h = apply_observable(hamiltonian, psi);
  // Hermiticity guard: <psi|H|psi> must be real.
  const std::complex<double> e = kernels::dot(psi.data(), h.data(), psi.dim());
  if (std::abs(e.imag()) > kGradResidueTol) {
    throw NumericalError("pool gradient consistency: energy residue exceeds tolerance");
  }
  // Validate and pre-pad the masks before forking: worker threads must not
  // throw.
  std::vector<kernels::PauliMasks> masks;
  masks.reserve(pool.size());
  for (const PauliString& op : pool) {
    if (op.n_qubits() != hamiltonian.n_qubits()) {
      throw std::invalid_argument("pool operator width does not match the system register");
    }
    masks.push_back(pad_masks(op.masks(), extra));
  }
  std::vector<double> grads(pool.size());
  parallel_chunks(pool.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::complex<double> z =
          kernels::pauli_dot(h.data(), psi.data(), psi.dim(), masks[i]);
      grads[i] = -2.0 * z.imag();
    }
  });
  return grads;
}

std::vector<PauliString> full_pauli_pool(int n_system, int max_weight) {
  if (n_system < 1 || n_system > 15) {
    throw std::invalid_argument("pool register width out of range");
  }
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  const std::uint64_t count = std::uint64_t(1) << (2 * n_system);
  std::vector<PauliString> pool;
  for (std::uint64_t code = 1; code < count; ++code) {  // 0 is the identity
    std::string word(static_cast<std::size_t>(n_system), 'I');
    int weight = 0;
    for (int q = 0; q < n_system; ++q) {
      const unsigned digit = (code >> (2 * (n_system - 1 - q))) & 3u;
      word[static_cast<std::size_t>(q)] = letters[digit];
      if (digit != 0) ++weight;
    }
    if (max_weight > 0 && weight > max_weight) continue;
    pool.emplace_back(word);
  }
  return pool;
}

}  // namespace tepid
