#include "tepid/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tepid/format.hpp"
#include "tepid/objective.hpp"
#include "tepid/polar.hpp"

namespace tepid {

namespace {

constexpr double kTieTol = 1e-12;      // pool-gradient tie window
constexpr double kWeightFloor = 1e-300;  // below this a weight counts as zero

// Minimizes sum_k mu_k(phi) <c_k|H|c_k> - S(mu)/beta over the weight angles,
// starting from uniform weights. With no entangler applied the purification's
// energy is exactly this diagonal restriction, so every evaluation here is a
// genuine free-energy value.
MinimizeResult minimize_mu_objective(const Observable& hamiltonian, double beta,
                                     const ComputationalSubspace& subspace,
                                     const OptimizerConfig& opt) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (hamiltonian.n_qubits() != subspace.n_system)
    throw std::invalid_argument("hamiltonian width does not match the subspace register");
  const int m = subspace.m();
  std::vector<double> diag(m);
  for (int k = 0; k < m; ++k)
    diag[k] = hamiltonian.diagonal_element(subspace.elements[static_cast<std::size_t>(k)]);

  ObjectiveFn fg = [&diag, beta, m](std::span<const double> x, std::span<double> grad) {
    std::vector<double> phi(x.begin(), x.end());
    const std::vector<double> amp = polar_amplitudes(phi);  // signed, mu = amp^2
    double f = 0.0;
    std::vector<double> dmu(m);  // df / dmu_k
    for (int k = 0; k < m; ++k) {
      const double mu_k = amp[static_cast<std::size_t>(k)] * amp[static_cast<std::size_t>(k)];
      f += mu_k * diag[static_cast<std::size_t>(k)];
      dmu[static_cast<std::size_t>(k)] = diag[static_cast<std::size_t>(k)];
      if (mu_k >= kWeightFloor) {
        const double lg = std::log(mu_k);
        f += mu_k * lg / beta;  // - S(mu)/beta
        dmu[static_cast<std::size_t>(k)] += (lg + 1.0) / beta;
      }
    }
    // d mu_k / d phi_l = 2 r_k jac(k, l) with the signed amplitude r_k.
    const Eigen::MatrixXd jac = polar_jacobian(phi);
    for (std::size_t l = 0; l < x.size(); ++l) {
      double g = 0.0;
      for (int k = 0; k < m; ++k)
        g += dmu[static_cast<std::size_t>(k)] * 2.0 * amp[static_cast<std::size_t>(k)] *
             jac(k, static_cast<Eigen::Index>(l));
      grad[l] = g;
    }
    return f;
  };

  const std::vector<double> uniform(static_cast<std::size_t>(m), 1.0 / m);
  return minimize(fg, invert_polar(uniform), opt);
}

struct ExtractionCore {
  std::vector<double> energies_subspace_order;
  Extraction sorted;
};

ExtractionCore extract_core(const Observable& hamiltonian,
                            const ComputationalSubspace& subspace,
                            const AdaptiveAnsatz& ansatz) {
  const int m = subspace.m();
  ExtractionCore out;
  out.energies_subspace_order.resize(static_cast<std::size_t>(m));
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    StateVector sv = StateVector::basis_state(
        subspace.n_system, subspace.elements[static_cast<std::size_t>(k)]);
    sv = apply_adaptive(ansatz, sv);
    out.energies_subspace_order[static_cast<std::size_t>(k)] = expectation(hamiltonian, sv);
    states.push_back(std::move(sv));
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&out](int a, int b) {
    return out.energies_subspace_order[static_cast<std::size_t>(a)] <
           out.energies_subspace_order[static_cast<std::size_t>(b)];
  });
  for (int idx : order) {
    out.sorted.energies.push_back(out.energies_subspace_order[static_cast<std::size_t>(idx)]);
    out.sorted.subspace_index.push_back(idx);
    out.sorted.states.push_back(std::move(states[static_cast<std::size_t>(idx)]));
  }
  return out;
}

std::string bool_word(bool v) { return v ? "true" : "false"; }

}  // namespace

AdaptiveAnsatz RunResult::ansatz() const {
  return AdaptiveAnsatz{n_system, operators, theta_star};
}

std::vector<double> initial_mu_optimization(const Observable& hamiltonian, double beta,
                                            const ComputationalSubspace& subspace,
                                            const OptimizerConfig& opt) {
  return minimize_mu_objective(hamiltonian, beta, subspace, opt).x;
}

RunResult run_tepid_adapt(const Observable& hamiltonian, double beta_bar,
                          const ComputationalSubspace& subspace, const AdaptConfig& cfg,
                          const OptimizerConfig& opt) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("pool tolerance must be positive");
  if (cfg.max_operators < 0) throw std::invalid_argument("max_operators must be non-negative");
  std::vector<PauliString> pool =
      cfg.pool.empty() ? full_pauli_pool(subspace.n_system, cfg.pool_max_weight) : cfg.pool;
  for (const PauliString& op : pool)
    if (op.n_qubits() != subspace.n_system)
      throw std::invalid_argument("pool operator width does not match the system register");

  FreeEnergyObjective obj(hamiltonian, beta_bar, subspace);

  RunResult result;
  result.n_system = subspace.n_system;
  result.beta_bar = beta_bar;
  result.subspace = subspace;
  result.hamiltonian = hamiltonian;
  result.pool_epsilon = cfg.epsilon;
  result.grad_tol_inf = opt.grad_tol_inf;
  result.max_operators = cfg.max_operators;
  result.seed = cfg.seed;

  std::vector<double> x;
  bool last_converged = true;
  bool last_stalled = false;
  double min_f = std::numeric_limits<double>::infinity();
  if (subspace.m() > 1) {
    if (cfg.run_initial_mu_opt) {
      MinimizeResult mu_res = minimize_mu_objective(hamiltonian, beta_bar, subspace, opt);
      x = std::move(mu_res.x);
      last_converged = mu_res.converged;
      last_stalled = mu_res.stalled;
      min_f = std::min(min_f, mu_res.min_f_evaluated);
    } else {
      x = invert_polar(std::vector<double>(static_cast<std::size_t>(subspace.m()),
                                           1.0 / subspace.m()));
    }
  }

  ObjectiveFn fg = [&obj](std::span<const double> xs, std::span<double> gs) {
    return obj.value_and_gradient(xs, gs);
  };

  double f_cur = obj.value(x);
  min_f = std::min(min_f, f_cur);

  for (int adaptation = 0;; ++adaptation) {
    const StateVector psi = obj.state(x);
    const std::vector<double> g = pool_gradients(psi, pool, hamiltonian, cfg.workers);
    double ginf = 0.0;
    for (double v : g) ginf = std::max(ginf, std::abs(v));

    result.trace.push_back(TraceRow{adaptation, f_cur, ginf, "-", obj.n_parameters(),
                                    last_converged, last_stalled});
    if (cfg.record_path) {
      result.trace_parameters.push_back(x);
      result.trace_energies_sorted.push_back(
          extract_core(hamiltonian, subspace, obj.ansatz_at(x)).sorted.energies);
    }
    if (ginf <= cfg.epsilon) {
      result.terminated_by = "pool_tol";
      break;
    }
    if (obj.n_theta() >= cfg.max_operators) {
      result.terminated_by = "max_ops";
      break;
    }

    int pick = 0;
    while (std::abs(g[static_cast<std::size_t>(pick)]) < ginf - kTieTol) ++pick;
    result.trace.back().chosen_operator = pool[static_cast<std::size_t>(pick)].word();

    obj.push_generator(pool[static_cast<std::size_t>(pick)]);
    x.push_back(0.0);
    MinimizeResult r = minimize(fg, x, opt);
    x = std::move(r.x);
    f_cur = r.f;
    last_converged = r.converged;
    last_stalled = r.stalled;
    min_f = std::min(min_f, r.min_f_evaluated);
  }

  result.phi_star.assign(x.begin(), x.begin() + obj.n_phi());
  result.theta_star.assign(x.begin() + obj.n_phi(), x.end());
  result.operators = obj.generators();
  result.mu_star = polar_to_mu(result.phi_star);
  result.free_energy = f_cur;
  result.final_pool_grad_inf = result.trace.back().pool_grad_inf;
  result.min_free_energy_evaluated = min_f;

  ExtractionCore ext = extract_core(hamiltonian, subspace, result.ansatz());
  result.energies_subspace_order = std::move(ext.energies_subspace_order);
  result.eigen_energies = std::move(ext.sorted.energies);
  result.eigen_subspace_index = std::move(ext.sorted.subspace_index);
  result.eigen_states = std::move(ext.sorted.states);
  result.gaps = energy_gaps_from_mu(result.phi_star, beta_bar);
  result.gibbs_state =
      partial_trace_ancilla(obj.state(x), subspace.n_system, ancilla_count(subspace.m()));
  return result;
}

Extraction extract_eigenstates(const RunResult& result) {
  if (result.operators.size() != result.theta_star.size())
    throw std::invalid_argument("run result has mismatched operator and angle counts");
  ExtractionCore ext = extract_core(result.hamiltonian, result.subspace, result.ansatz());
  return std::move(ext.sorted);
}

GapEstimate energy_gaps_from_mu(const std::vector<double>& phi_star, double beta_bar) {
  if (!(beta_bar > 0.0)) throw std::invalid_argument("beta_bar must be positive");
  const std::vector<double> mu = polar_to_mu(phi_star);
  if (mu.front() < kWeightFloor)
    throw std::invalid_argument("first ancilla weight vanished; gaps are undefined");
  GapEstimate est;
  est.gaps.resize(mu.size());
  est.gaps[0] = 0.0;
  for (std::size_t k = 1; k < mu.size(); ++k) {
    if (mu[k] < kWeightFloor) {
      est.gaps[k] = std::numeric_limits<double>::infinity();
      est.has_infinite = true;
    } else {
      est.gaps[k] = std::log(mu.front() / mu[k]) / beta_bar;
    }
  }
  return est;
}

StateVector prepared_state(const ComputationalSubspace& subspace,
                           const std::vector<double>& phi, const AdaptiveAnsatz& ansatz) {
  StateVector state = prepare_purification(phi, subspace);
  apply_adaptive_inplace(ansatz, state);
  return state;
}

DensityMatrix prepared_gibbs(const ComputationalSubspace& subspace,
                             const std::vector<double>& phi, const AdaptiveAnsatz& ansatz) {
  const StateVector state = prepared_state(subspace, phi, ansatz);
  return partial_trace_ancilla(state, subspace.n_system, ancilla_count(subspace.m()));
}

DensityMatrix extrapolate_gibbs(const RunResult& result, double beta) {
  if (!(beta >= result.beta_bar))
    throw std::invalid_argument("extrapolation targets beta at or above the run's beta_bar");
  const std::vector<double>& energies = result.energies_subspace_order;
  if (energies.empty() || energies.size() != result.subspace.elements.size())
    throw std::invalid_argument("run result lacks extracted energies");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  std::vector<double> mu(energies.size());
  double z = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    mu[k] = std::exp(-beta * (energies[k] - e_min));
    z += mu[k];
  }
  for (double& v : mu) v /= z;
  return prepared_gibbs(result.subspace, invert_polar(mu), result.ansatz());
}

std::string format_run_result(const RunResult& result) {
  std::ostringstream os;
  os << "tepid-run-result v1\n";
  os << "n_system " << result.n_system << "\n";
  os << "n_ancilla " << ancilla_count(result.subspace.m()) << "\n";
  os << "m " << result.subspace.m() << "\n";
  os << "beta_bar " << format_double(result.beta_bar) << "\n";
  os << "subspace";
  for (const std::string& bits : result.subspace.bitstrings()) os << " " << bits;
  os << "\n";
  os << "pool_epsilon " << format_double(result.pool_epsilon) << "\n";
  os << "grad_tol_inf " << format_double(result.grad_tol_inf) << "\n";
  os << "max_operators " << result.max_operators << "\n";
  os << "seed " << result.seed << "\n";
  os << "terminated_by " << result.terminated_by << "\n";
  os << "adaptations " << result.trace.size() << "\n";
  os << "n_operators " << result.operators.size() << "\n";
  os << "free_energy " << format_double(result.free_energy) << "\n";
  os << "final_pool_grad_inf " << format_double(result.final_pool_grad_inf) << "\n";
  os << "min_free_energy_evaluated " << format_double(result.min_free_energy_evaluated)
     << "\n";
  os << "\n";

  os << "trace " << result.trace.size() << "\n";
  os << "adaptation free_energy pool_grad_inf chosen_operator n_parameters"
     << " vqe_converged vqe_stalled\n";
  for (const TraceRow& row : result.trace) {
    os << row.adaptation << " " << format_double(row.free_energy) << " "
       << format_double(row.pool_grad_inf) << " " << row.chosen_operator << " "
       << row.n_parameters << " " << bool_word(row.vqe_converged) << " "
       << bool_word(row.vqe_stalled) << "\n";
  }
  os << "\n";

  os << "eigenpairs " << result.eigen_energies.size() << "\n";
  os << "rank subspace_index energy mu gap_from_mu\n";
  for (std::size_t r = 0; r < result.eigen_energies.size(); ++r) {
    const int k = result.eigen_subspace_index[r];
    os << (r + 1) << " " << (k + 1) << " " << format_double(result.eigen_energies[r]) << " "
       << format_double(result.mu_star[static_cast<std::size_t>(k)]) << " "
       << format_double(result.gaps.gaps[static_cast<std::size_t>(k)]) << "\n";
  }
  os << "\n";

  os << "phi";
  for (double v : result.phi_star) os << " " << format_double(v);
  os << "\n";
  os << "theta";
  for (double v : result.theta_star) os << " " << format_double(v);
  os << "\n";
  os << "operators " << result.operators.size() << "\n";
  for (const PauliString& op : result.operators) os << op.word() << "\n";
  os << "end\n";
  return os.str();
}

}  // namespace tepid
