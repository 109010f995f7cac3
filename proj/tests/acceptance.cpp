// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
// Tolerances are pinned here, next to the check that uses them. The binary
// exits with the number of failed criteria (0 = all green).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tepid/ansatz.hpp"
#include "tepid/circuit.hpp"
#include "tepid/driver.hpp"
#include "tepid/experiments.hpp"
#include "tepid/fits.hpp"
#include "tepid/objective.hpp"
#include "tepid/pauli.hpp"
#include "tepid/polar.hpp"
#include "tepid/spectral.hpp"
#include "tepid/state.hpp"
#include "tepid/xxz.hpp"

using namespace tepid;

namespace {

// ---------------------------------------------------------------------- util

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> random_mu(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> mu(m);
  double total = 0.0;
  for (double& x : mu) total += (x = dist(rng));
  for (double& x : mu) x /= total;
  return mu;
}

ComputationalSubspace random_subspace(std::mt19937_64& rng, int n_system, int m) {
  std::vector<std::uint64_t> all(std::size_t(1) << n_system);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(m));
  return ComputationalSubspace::from_indices(n_system, all);
}

StateVector column_state(const Eigen::MatrixXcd& vectors, int column, int n_qubits) {
  StateVector s = StateVector::zero_workspace(n_qubits);
  for (std::uint64_t i = 0; i < s.dim(); ++i)
    s.amplitudes()[static_cast<std::size_t>(i)] = vectors(static_cast<Eigen::Index>(i),
                                                          column);
  return s;
}

// Orthonormal basis of the degeneracy group containing sorted level `rank`.
std::vector<StateVector> oracle_group_basis(const EigenSystem& spec, int rank,
                                            int n_qubits) {
  std::vector<StateVector> basis;
  for (int k : spec.group_of(rank)) basis.push_back(column_state(spec.vectors, k, n_qubits));
  return basis;
}

// The paper-fixed six-site subspaces (prefix order is the m-truncation order).
const std::vector<std::string> kAntiferroSubspace = {"010101", "010110", "010100",
                                                     "010111", "100101"};
const std::vector<std::string> kParaSubspace = {"010101", "010111", "010100",
                                                "100001", "010110", "011110"};

ComputationalSubspace prefix_subspace(const std::vector<std::string>& bits, int m) {
  return ComputationalSubspace::from_bitstrings(
      static_cast<int>(bits.front().size()),
      std::vector<std::string>(bits.begin(), bits.begin() + m));
}

// Shared fixtures produced by criterion 4/5 and reused downstream.
struct BenchmarkRun {
  int m = 0;
  RunResult run;
  double floor_rel = 0.0;  // relative free-energy error of the m-truncation floor
  double seconds = 0.0;
};
std::optional<std::vector<BenchmarkRun>> g_antiferro;  // m = 2, 3, 4
std::optional<RunResult> g_para4;
double g_antiferro_f_exact = 0.0;
double g_para_f_exact = 0.0;

RunResult benchmark_run(const Observable& h, const ComputationalSubspace& sub) {
  AdaptConfig cfg;
  cfg.epsilon = 1e-6;      // pool-gradient tolerance (pinned)
  cfg.max_operators = 300;
  cfg.workers = 4;         // split only the pool scoring; results are worker-independent
  OptimizerConfig opt;     // grad_tol_inf = 1e-10 (pinned default)
  return run_tepid_adapt(h, 3.0, sub, cfg, opt);
}

// --------------------------------------------------------------- criterion 1

bool criterion_1(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> phi_draw(0.1, 1.4);
  std::uniform_real_distribution<double> theta_draw(-1.2, 1.2);

  const double kStep = 1e-5;    // central-difference step (pinned)
  const double kRelTol = 1e-6;  // relative-error bound, floored at unit scale (pinned)
  int configs = 0, checked = 0;
  double worst = 0.0;

  for (int trial = 0; trial < 208; ++trial) {
    const int n_system = 2 + trial % 4;             // 2..5
    const int max_m = std::min(6, 1 << n_system);
    const int m = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_m - 1));
    const int n_ops = static_cast<int>(rng() % 9);  // 0..8

    const Observable h = build_xxz(XXZConfig{n_system, 1.5});
    const ComputationalSubspace sub = random_subspace(rng, n_system, m);
    const std::vector<PauliString> pool = full_pauli_pool(n_system);

    FreeEnergyObjective obj(h, 3.0, sub);
    std::vector<PauliString> gens;
    for (int l = 0; l < n_ops; ++l)
      gens.push_back(pool[rng() % pool.size()]);
    obj.set_generators(gens);

    std::vector<double> x;
    for (int j = 0; j < m - 1; ++j) x.push_back(phi_draw(rng));
    for (int l = 0; l < n_ops; ++l) x.push_back(theta_draw(rng));

    std::vector<double> grad(x.size());
    obj.value_and_gradient(x, grad);
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::vector<double> hi = x, lo = x;
      hi[i] += kStep;
      lo[i] -= kStep;
      const double fd = (obj.value(hi) - obj.value(lo)) / (2.0 * kStep);
      const double rel = std::abs(grad[i] - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      ++checked;
    }

    // Pool gradients: three sampled candidates per configuration.
    const StateVector psi = obj.state(x);
    const std::vector<double> pool_g = pool_gradients(psi, pool, h);
    for (int s = 0; s < 3; ++s) {
      const std::size_t t = rng() % pool.size();
      FreeEnergyObjective probe(h, 3.0, sub);
      std::vector<PauliString> aug = gens;
      aug.push_back(pool[t]);
      probe.set_generators(aug);
      std::vector<double> xh = x, xl = x;
      xh.push_back(kStep);
      xl.push_back(-kStep);
      const double fd = (probe.value(xh) - probe.value(xl)) / (2.0 * kStep);
      const double rel = std::abs(pool_g[t] - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      ++checked;
    }
    ++configs;
  }

  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << configs << " configs, " << checked << " derivatives, worst rel err " << worst
     << ", " << elapsed << " s";
  detail = os.str();
  return worst <= kRelTol && elapsed <= 120.0 && configs >= 200;
}

// --------------------------------------------------------------- criterion 2

bool criterion_2(std::string& detail) {
  std::mt19937_64 rng(202);
  const double kTraceTol = 1e-12;   // partial trace vs diag(mu) (pinned)
  const double kCircuitTol = 1e-10; // compiled circuits vs direct state (pinned)
  double worst_trace = 0.0, worst_circuit = 0.0;

  for (int draw = 0; draw < 100; ++draw) {
    const int n_system = 2 + draw % 5;  // 2..6
    const int max_m = std::min(8, 1 << n_system);
    const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_m));
    const ComputationalSubspace sub = random_subspace(rng, n_system, m);
    const std::vector<double> mu = random_mu(rng, m);
    const std::vector<double> phi = invert_polar(mu);

    const StateVector direct = prepare_purification(phi, sub);
    const DensityMatrix rho = partial_trace_ancilla(direct, n_system, ancilla_count(m));
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(rho.entries().rows(), rho.entries().cols());
    for (int j = 0; j < m; ++j)
      want(static_cast<Eigen::Index>(sub.elements[static_cast<std::size_t>(j)]),
           static_cast<Eigen::Index>(sub.elements[static_cast<std::size_t>(j)])) =
          mu[static_cast<std::size_t>(j)];
    worst_trace = std::max(worst_trace, (rho.entries() - want).cwiseAbs().maxCoeff());

    for (UmVariant variant : {UmVariant::intuitive, UmVariant::scalable}) {
      const StateVector compiled = simulate(build_um_circuit(phi, sub, variant));
      double diff = 0.0;
      for (std::uint64_t i = 0; i < direct.dim(); ++i)
        diff = std::max(diff, std::abs(compiled.amplitude(i) - direct.amplitude(i)));
      worst_circuit = std::max(worst_circuit, diff);
    }
  }

  std::ostringstream os;
  os << "100 draws, worst trace err " << worst_trace << ", worst circuit err "
     << worst_circuit;
  detail = os.str();
  return worst_trace <= kTraceTol && worst_circuit <= kCircuitTol;
}

// --------------------------------------------------------------- criterion 3

bool criterion_3(std::string& detail) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> theta_draw(-3.14159, 3.14159);
  const double kTol = 1e-10;  // Shannon vs von Neumann entropy (pinned)
  double worst = 0.0;

  for (int draw = 0; draw < 100; ++draw) {
    const int n_system = 2 + draw % 4;  // 2..5
    const int max_m = std::min(8, 1 << n_system);
    const int m = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_m - 1));
    const ComputationalSubspace sub = random_subspace(rng, n_system, m);
    const std::vector<double> mu = random_mu(rng, m);
    const std::vector<double> phi = invert_polar(mu);

    const std::vector<PauliString> pool = full_pauli_pool(n_system);
    AdaptiveAnsatz ansatz;
    ansatz.n_system = n_system;
    const int n_ops = 1 + static_cast<int>(rng() % 6);
    for (int l = 0; l < n_ops; ++l) {
      ansatz.generators.push_back(pool[rng() % pool.size()]);
      ansatz.angles.push_back(theta_draw(rng));
    }

    const StateVector psi = apply_adaptive(ansatz, prepare_purification(phi, sub));
    const DensityMatrix rho = partial_trace_ancilla(psi, n_system, ancilla_count(m));
    worst = std::max(worst, std::abs(shannon_entropy(mu) - von_neumann_entropy(rho)));
  }

  std::ostringstream os;
  os << "100 draws, worst entropy mismatch " << worst;
  detail = os.str();
  return worst <= kTol;
}

// --------------------------------------------------------------- criterion 4

bool criterion_4(std::string& detail) {
  const Observable h = build_xxz(XXZConfig{6, 1.5});
  const GibbsReference ref(h, 3.0);
  g_antiferro_f_exact = ref.free_energy_exact();

  const double kFloorGap = 1e-4;  // |rel err(run) - rel err(floor)|, absolute (pinned)
  std::vector<BenchmarkRun> runs;
  bool ok = true;
  std::ostringstream os;

  for (int m : {2, 3, 4}) {
    const auto t0 = std::chrono::steady_clock::now();
    BenchmarkRun b;
    b.m = m;
    b.run = benchmark_run(h, prefix_subspace(kAntiferroSubspace, m));
    b.seconds = seconds_since(t0);
    b.floor_rel = relative_error(ref.truncated(m, TruncationMode::permissive).free_energy_floor,
                                 g_antiferro_f_exact)
                      .value;
    const double run_rel = relative_error(b.run.free_energy, g_antiferro_f_exact).value;
    const double gap = std::abs(run_rel - b.floor_rel);

    const bool this_ok = b.run.terminated_by == "pool_tol" && gap <= kFloorGap &&
                         b.seconds <= 1800.0;
    os << "m=" << m << ": " << b.run.terminated_by << " after "
       << (b.run.trace.size() - 1) << " adaptations, rel err " << run_rel << " (floor "
       << b.floor_rel << ", gap " << gap << "), " << b.seconds << " s; ";
    ok = ok && this_ok;
    runs.push_back(std::move(b));
  }
  g_antiferro = std::move(runs);
  detail = os.str();
  return ok;
}

// --------------------------------------------------------------- criterion 5

bool criterion_5(std::string& detail) {
  if (!g_antiferro) {
    detail = "prerequisite antiferromagnetic runs missing";
    return false;
  }
  const double kFidelity = 0.999;  // per-state subspace fidelity bound (pinned)
  const double kEnergyRel = 1e-4;  // per-state relative energy bound (pinned)
  std::ostringstream os;
  bool ok = true;

  // Converged m = 4 antiferromagnetic run: all four states must be right.
  {
    const Observable h = build_xxz(XXZConfig{6, 1.5});
    const EigenSystem spec = eigensystem(h);
    const RunResult& run = (*g_antiferro)[2].run;
    for (int rank = 0; rank < 4; ++rank) {
      const double fid = subspace_fidelity(run.eigen_states[static_cast<std::size_t>(rank)],
                                           oracle_group_basis(spec, rank, 6));
      const double erel = relative_error(run.eigen_energies[static_cast<std::size_t>(rank)],
                                         spec.energies(rank))
                              .value;
      if (fid < kFidelity || erel > kEnergyRel) ok = false;
      os << "af state " << (rank + 1) << ": fid " << fid << ", e-rel " << erel << "; ";
    }
  }

  // Paramagnetic m = 4: the known third-excited-state failure must surface
  // as a flagged mismatch (some state below the fidelity bar), not a crash.
  {
    const Observable h = build_xxz(XXZConfig{6, 0.0});
    const GibbsReference ref(h, 3.0);
    g_para_f_exact = ref.free_energy_exact();
    try {
      RunResult run = benchmark_run(h, prefix_subspace(kParaSubspace, 4));
      int mismatches = 0;
      double lowest = 1.0;
      for (int rank = 0; rank < 4; ++rank) {
        const double fid = subspace_fidelity(run.eigen_states[static_cast<std::size_t>(rank)],
                                             oracle_group_basis(ref.spectrum(), rank, 6));
        lowest = std::min(lowest, fid);
        if (fid < kFidelity) ++mismatches;
      }
      os << "para m=4: " << mismatches << " flagged state(s), lowest fid " << lowest;
      if (mismatches == 0) ok = false;  // the documented failure must reproduce
      g_para4 = std::move(run);
    } catch (const std::exception& e) {
      os << "para m=4 crashed: " << e.what();
      ok = false;
    }
  }

  detail = os.str();
  return ok;
}

// --------------------------------------------------------------- criterion 6

bool criterion_6(std::string& detail) {
  if (!g_antiferro) {
    detail = "prerequisite antiferromagnetic runs missing";
    return false;
  }
  const Observable h = build_xxz(XXZConfig{6, 1.5});
  const RunResult& run = (*g_antiferro)[2].run;  // m = 4

  const double base_rel =
      relative_error(free_energy_of_state(h, run.gibbs_state, 3.0), g_antiferro_f_exact)
          .value;
  std::ostringstream os;
  os << "rel err at beta 3: " << base_rel;
  bool ok = true;
  for (double beta : {4.0, 5.0, 6.0}) {
    const DensityMatrix extrap = extrapolate_gibbs(run, beta);
    const GibbsReference ref(h, beta);
    const double rel =
        relative_error(free_energy_of_state(h, extrap, beta), ref.free_energy_exact()).value;
    os << "; beta " << beta << ": " << rel;
    if (rel > base_rel) ok = false;  // must not degrade below the trained point (pinned)
  }
  detail = os.str();
  return ok;
}

// --------------------------------------------------------------- criterion 7

bool criterion_7(std::string& detail) {
  if (!g_antiferro) {
    detail = "prerequisite antiferromagnetic runs missing";
    return false;
  }
  const double kTol = 1e-5;  // gap-vs-energy-difference agreement (pinned)
  double worst = 0.0;
  int compared = 0;

  auto check_run = [&](const RunResult& run) {
    if (run.terminated_by != "pool_tol") return;  // only converged runs
    for (std::size_t k = 0; k < run.gaps.gaps.size(); ++k) {
      if (std::isinf(run.gaps.gaps[k])) continue;
      const double direct = run.energies_subspace_order[k] - run.energies_subspace_order[0];
      worst = std::max(worst, std::abs(run.gaps.gaps[k] - direct));
      ++compared;
    }
  };
  for (const BenchmarkRun& b : *g_antiferro) check_run(b.run);
  if (g_para4) check_run(*g_para4);

  std::ostringstream os;
  os << compared << " gaps compared, worst mismatch " << worst;
  detail = os.str();
  return compared > 0 && worst <= kTol;
}

// --------------------------------------------------------------- criterion 8

bool criterion_8(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentConfig config;
  config.model = XXZConfig{6, 1.5};  // antiferromagnetic chain family
  config.beta_bar = 3.0;
  config.subspace = prefix_subspace(kAntiferroSubspace, 2);  // unused by the study
  config.fidelity_thresholds = {0.99, 0.999, 0.9999};
  config.scaling_n_min = 2;
  config.scaling_n_max = 12;
  config.scaling_beta = 3.0;
  config.scaling_fixed_m = 4;

  const std::vector<OutputFile> files = cmd_scaling_study(config, RunOptions{1, false});
  const double elapsed = seconds_since(t0);

  std::string fits_text;
  for (const OutputFile& f : files)
    if (f.name == "scaling_fits.csv") fits_text = f.content;
  const CsvTable fits = read_csv(fits_text);

  double exp_b = 1e300, pow_b = 1e300;
  for (const std::vector<std::string>& row : fits.rows) {
    if (row[0] != "0.98999999999999999" && row[0] != "0.99") continue;
    if (row[1] == "exponential") exp_b = std::stod(row[3]);
    if (row[1] == "power") pow_b = std::stod(row[3]);
  }

  // Synthetic exact-model recovery (pinned: MSE <= 1e-12 for both families).
  std::vector<FitPoint> pow_pts, exp_pts;
  for (double x : {1.0, 2.0, 3.0, 5.0, 8.0, 12.0}) {
    pow_pts.push_back({x, 2.0 * std::pow(x, 1.5)});
    exp_pts.push_back({x, 0.7 * std::expm1(0.35 * x)});
  }
  const FitResult pow_fit = fit_curve(pow_pts, FitKind::power);
  const FitResult exp_fit = fit_curve(exp_pts, FitKind::exponential);

  std::ostringstream os;
  os << "99% fits: exponential b " << exp_b << " (<= 0.01), power b " << pow_b
     << " (in [0.5, 1.2]); synthetic MSE " << pow_fit.mse << " / " << exp_fit.mse << "; "
     << elapsed << " s";
  detail = os.str();
  return exp_b <= 0.01 && pow_b >= 0.5 && pow_b <= 1.2 && pow_fit.ok && exp_fit.ok &&
         pow_fit.mse <= 1e-12 && exp_fit.mse <= 1e-12 && elapsed <= 600.0;
}

// --------------------------------------------------------------- criterion 9

bool criterion_9(std::string& detail) {
  if (!g_antiferro) {
    detail = "prerequisite antiferromagnetic runs missing";
    return false;
  }
  const double kSlack = 1e-10;  // variational-bound slack (pinned)
  double worst_violation = -1e300;
  int runs = 0;

  for (const BenchmarkRun& b : *g_antiferro) {
    worst_violation =
        std::max(worst_violation, g_antiferro_f_exact - b.run.min_free_energy_evaluated);
    ++runs;
  }
  if (g_para4) {
    worst_violation =
        std::max(worst_violation, g_para_f_exact - g_para4->min_free_energy_evaluated);
    ++runs;
  }

  std::ostringstream os;
  os << runs << " runs, worst F_exact - min F " << worst_violation;
  detail = os.str();
  return runs >= 3 && worst_violation <= kSlack;
}

// -------------------------------------------------------------- criterion 10

bool criterion_10(std::string& detail) {
  ExperimentConfig config;
  config.model = XXZConfig{6, 1.5};
  config.beta_bar = 3.0;
  config.subspace = prefix_subspace(kAntiferroSubspace, 4);
  config.pool_epsilon = 1e-6;
  config.max_operators = 300;
  config.seed = 7;

  const std::vector<OutputFile> a = cmd_run(config, RunOptions{4, false});
  const std::vector<OutputFile> b = cmd_run(config, RunOptions{4, false});

  if (a.size() != b.size()) {
    detail = "output file sets differ in size";
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].content != b[i].content) {
      detail = "mismatch in " + a[i].name;
      return false;
    }
  }
  std::ostringstream os;
  os << a.size() << " files byte-identical across repeated m=4 runs";
  detail = os.str();
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient oracle suite", criterion_1},
      {2, "purification correctness", criterion_2},
      {3, "entropy invariance", criterion_3},
      {4, "antiferromagnetic benchmark", criterion_4},
      {5, "eigenstate extraction", criterion_5},
      {6, "low-temperature extrapolation", criterion_6},
      {7, "gap self-consistency", criterion_7},
      {8, "scaling study", criterion_8},
      {9, "variational principle", criterion_9},
      {10, "determinism", criterion_10},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
