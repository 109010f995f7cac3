#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tepid/ansatz.hpp"
#include "tepid/bfgs.hpp"
#include "tepid/pauli.hpp"
#include "tepid/state.hpp"

namespace tepid {

// Configuration for the adaptive operator-growth loop.
struct AdaptConfig {
  // Candidate generator pool.  Empty means "use the full Pauli pool on the
  // system register" (every non-identity word, optionally weight-capped via
  // pool_max_weight).  All entries must act on n_system qubits.
  std::vector<PauliString> pool;
  int pool_max_weight = 0;  // 0 = no cap; only used when pool is empty

  double epsilon = 1e-6;    // stop when the pool-gradient inf-norm falls below
  int max_operators = 300;  // hard cap on ansatz growth
  bool run_initial_mu_opt = true;
  std::uint64_t seed = 0;   // recorded in results; reserved for stochastic extensions
  int workers = 1;          // worker threads for pool-gradient evaluation
  // When set, the result also stores the parameter vector and the extracted
  // energies at every trace row (tolerance and restart studies replay these).
  bool record_path = false;
};

// One row of the per-adaptation trace.  Row i describes the state of the run
// after the optimization that concluded adaptation i (row 0 is the state
// after ancilla-weight initialization, before any generator is appended).
struct TraceRow {
  int adaptation = 0;
  double free_energy = 0.0;
  double pool_grad_inf = 0.0;
  std::string chosen_operator = "-";  // "-" when the loop stopped at this row
  int n_parameters = 0;
  bool vqe_converged = true;  // optimizer status for the step that produced this row
  bool vqe_stalled = false;
};

// Energy gaps inferred from the converged ancilla weights:
//   gap[k] = log(mu[0] / mu[k]) / beta_bar   (subspace order, gap[0] == 0).
// A weight that underflowed to zero yields an infinite gap and sets the flag.
struct GapEstimate {
  std::vector<double> gaps;
  bool has_infinite = false;
};

// Full record of one adaptive run.  Eigen* arrays are sorted by ascending
// extracted energy; *_subspace_order arrays follow the subspace element
// order used by the ansatz itself.
struct RunResult {
  int n_system = 0;
  double beta_bar = 0.0;
  ComputationalSubspace subspace{1, {0}};
  Observable hamiltonian{1};

  std::vector<double> phi_star;            // m-1 ancilla-weight angles
  std::vector<double> theta_star;          // one angle per appended operator
  std::vector<PauliString> operators;      // appended generators, oldest first
  std::vector<TraceRow> trace;
  // Filled only when AdaptConfig::record_path is set; indexed like trace.
  std::vector<std::vector<double>> trace_parameters;
  std::vector<std::vector<double>> trace_energies_sorted;

  std::vector<double> mu_star;                     // subspace order
  std::vector<double> energies_subspace_order;     // <c_k| V^dag H V |c_k>
  GapEstimate gaps;                                // subspace order

  std::vector<double> eigen_energies;      // ascending
  std::vector<int> eigen_subspace_index;   // sorted rank -> subspace index
  std::vector<StateVector> eigen_states;   // system register, sorted rank order

  DensityMatrix gibbs_state{0};            // prepared state, ancilla traced out

  std::string terminated_by;               // "pool_tol" or "max_ops"
  double free_energy = 0.0;
  double final_pool_grad_inf = 0.0;
  // Smallest cost value seen across every optimizer evaluation in the run;
  // each evaluation is the exact free energy of a physical trial state, so
  // this must respect the variational bound.
  double min_free_energy_evaluated = std::numeric_limits<double>::infinity();

  // Echo of the configuration that produced the run.
  double pool_epsilon = 0.0;
  double grad_tol_inf = 0.0;
  int max_operators = 0;
  std::uint64_t seed = 0;

  AdaptiveAnsatz ansatz() const;
};

// Optimizes the ancilla-weight angles against the diagonal part of H
// restricted to the subspace, i.e. minimizes
//   sum_k mu_k(phi) <c_k|H|c_k>  -  S(mu)/beta
// starting from uniform weights.  Errors from the optimizer propagate.
std::vector<double> initial_mu_optimization(const Observable& hamiltonian,
                                            double beta,
                                            const ComputationalSubspace& subspace,
                                            const OptimizerConfig& opt = {});

// Runs the full adaptive loop: grow the ansatz one generator at a time
// (largest pool gradient, ties broken toward the lower pool index), fully
// re-optimizing all parameters after each append, until the pool-gradient
// inf-norm drops to cfg.epsilon or the operator cap is reached.
RunResult run_tepid_adapt(const Observable& hamiltonian,
                          double beta_bar,
                          const ComputationalSubspace& subspace,
                          const AdaptConfig& cfg = {},
                          const OptimizerConfig& opt = {});

// Rebuilds the energy-sorted eigenstate approximations V|c_k> recorded in a
// run result.  Returned states live on the system register only.
struct Extraction {
  std::vector<double> energies;            // ascending
  std::vector<int> subspace_index;         // sorted rank -> subspace index
  std::vector<StateVector> states;
};
Extraction extract_eigenstates(const RunResult& result);

// See GapEstimate.  phi_star is converted to weights internally; the first
// weight must be positive.
GapEstimate energy_gaps_from_mu(const std::vector<double>& phi_star, double beta_bar);

// The purified trial state |Phi(phi, theta)> on the combined register.
StateVector prepared_state(const ComputationalSubspace& subspace,
                           const std::vector<double>& phi,
                           const AdaptiveAnsatz& ansatz);

// The system-register mixed state obtained by tracing the ancillas out of
// prepared_state.
DensityMatrix prepared_gibbs(const ComputationalSubspace& subspace,
                             const std::vector<double>& phi,
                             const AdaptiveAnsatz& ansatz);

// Reweights a converged run to inverse temperature beta >= beta_bar without
// touching the optimized circuit: new weights e^{-beta E_k} are built from
// the extracted energies, converted back to angles, and the recorded ansatz
// is reapplied.  beta below beta_bar is a contract violation.
DensityMatrix extrapolate_gibbs(const RunResult& result, double beta);

// Deterministic plain-text report: versioned key-value header, the
// per-adaptation trace, the eigenpair table, gaps, and the final parameters.
std::string format_run_result(const RunResult& result);

}  // namespace tepid
