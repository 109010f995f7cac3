#include "tepid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "parallel_util.hpp"
#include "tepid/driver.hpp"
#include "tepid/errors.hpp"
#include "tepid/fits.hpp"
#include "tepid/format.hpp"
#include "tepid/objective.hpp"
#include "tepid/spectral.hpp"

namespace tepid {

namespace {

// ---------------------------------------------------------------------------
// Config parsing

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
    throw ConfigError("expected a finite real number, got '" + tok + "'", line);
  return v;
}

long long parse_int(const std::string& tok, int line) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    throw ConfigError("expected an integer, got '" + tok + "'", line);
  return v;
}

std::uint64_t parse_uint64(const std::string& tok, int line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || tok.front() == '-')
    throw ConfigError("expected a non-negative integer, got '" + tok + "'", line);
  return v;
}

bool parse_bool(const std::string& tok, int line) {
  if (tok == "true") return true;
  if (tok == "false") return false;
  throw ConfigError("expected true or false, got '" + tok + "'", line);
}

void need_one(const std::vector<std::string>& vals, const std::string& key, int line) {
  if (vals.size() != 1)
    throw ConfigError("field '" + key + "' expects exactly one value", line);
}

void need_some(const std::vector<std::string>& vals, const std::string& key, int line) {
  if (vals.empty()) throw ConfigError("field '" + key + "' expects at least one value", line);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;  // key -> line
  std::vector<std::string> subspace_tokens;
  int subspace_line = 0;
  int m_values_line = 0;
  bool have_n_system = false, have_jz = false, have_beta_bar = false, have_schema = false,
       have_subspace = false;

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    const std::string key = toks.front();
    std::vector<std::string> vals(toks.begin() + 1, toks.end());

    auto [it, fresh] = seen.emplace(key, line_no);
    if (!fresh)
      throw ConfigError("duplicate field '" + key + "' (first at line " +
                            std::to_string(it->second) + ")",
                        line_no);

    if (key == "schema") {
      need_one(vals, key, line_no);
      if (vals[0] != "tepid-config-v1")
        throw ConfigError("unsupported schema '" + vals[0] + "' (expected tepid-config-v1)",
                          line_no);
      have_schema = true;
    } else if (key == "n_system") {
      need_one(vals, key, line_no);
      const long long n = parse_int(vals[0], line_no);
      if (n < 2 || n > 24) throw ConfigError("n_system must be in [2, 24]", line_no);
      cfg.model.n_sites = static_cast<int>(n);
      have_n_system = true;
    } else if (key == "j_z") {
      need_one(vals, key, line_no);
      cfg.model.j_z = parse_real(vals[0], line_no);
      have_jz = true;
    } else if (key == "beta_bar") {
      need_one(vals, key, line_no);
      cfg.beta_bar = parse_real(vals[0], line_no);
      if (!(cfg.beta_bar > 0.0)) throw ConfigError("beta_bar must be positive", line_no);
      have_beta_bar = true;
    } else if (key == "subspace") {
      need_some(vals, key, line_no);
      subspace_tokens = vals;
      subspace_line = line_no;
      have_subspace = true;
    } else if (key == "m_values") {
      need_some(vals, key, line_no);
      cfg.m_values.clear();
      for (const std::string& v : vals) {
        const long long m = parse_int(v, line_no);
        if (m < 1) throw ConfigError("m_values entries must be >= 1", line_no);
        cfg.m_values.push_back(static_cast<int>(m));
      }
      m_values_line = line_no;
    } else if (key == "epsilon_values") {
      need_some(vals, key, line_no);
      cfg.epsilon_values.clear();
      for (const std::string& v : vals) {
        const double e = parse_real(v, line_no);
        if (!(e > 0.0)) throw ConfigError("epsilon_values entries must be positive", line_no);
        cfg.epsilon_values.push_back(e);
      }
    } else if (key == "beta_grid") {
      need_some(vals, key, line_no);
      cfg.beta_grid.clear();
      for (const std::string& v : vals) {
        const double b = parse_real(v, line_no);
        if (!(b > 0.0)) throw ConfigError("beta_grid entries must be positive", line_no);
        cfg.beta_grid.push_back(b);
      }
    } else if (key == "fidelity_thresholds") {
      need_some(vals, key, line_no);
      cfg.fidelity_thresholds.clear();
      for (const std::string& v : vals) {
        const double t = parse_real(v, line_no);
        if (!(t > 0.0) || t > 1.0)
          throw ConfigError("fidelity_thresholds entries must lie in (0, 1]", line_no);
        cfg.fidelity_thresholds.push_back(t);
      }
    } else if (key == "seed") {
      need_one(vals, key, line_no);
      cfg.seed = parse_uint64(vals[0], line_no);
    } else if (key == "output_dir") {
      need_one(vals, key, line_no);
      cfg.output_dir = vals[0];
    } else if (key == "pool_epsilon") {
      need_one(vals, key, line_no);
      cfg.pool_epsilon = parse_real(vals[0], line_no);
      if (!(cfg.pool_epsilon > 0.0)) throw ConfigError("pool_epsilon must be positive", line_no);
    } else if (key == "max_operators") {
      need_one(vals, key, line_no);
      const long long v = parse_int(vals[0], line_no);
      if (v < 0) throw ConfigError("max_operators must be non-negative", line_no);
      cfg.max_operators = static_cast<int>(v);
    } else if (key == "grad_tol_inf") {
      need_one(vals, key, line_no);
      cfg.grad_tol_inf = parse_real(vals[0], line_no);
      if (!(cfg.grad_tol_inf > 0.0)) throw ConfigError("grad_tol_inf must be positive", line_no);
    } else if (key == "pool_max_weight") {
      need_one(vals, key, line_no);
      const long long v = parse_int(vals[0], line_no);
      if (v < 0) throw ConfigError("pool_max_weight must be non-negative", line_no);
      cfg.pool_max_weight = static_cast<int>(v);
    } else if (key == "run_initial_mu_opt") {
      need_one(vals, key, line_no);
      cfg.run_initial_mu_opt = parse_bool(vals[0], line_no);
    } else if (key == "restart_count") {
      need_one(vals, key, line_no);
      const long long v = parse_int(vals[0], line_no);
      if (v < 1) throw ConfigError("restart_count must be >= 1", line_no);
      cfg.restart_count = static_cast<int>(v);
    } else if (key == "scaling_n_min") {
      need_one(vals, key, line_no);
      cfg.scaling_n_min = static_cast<int>(parse_int(vals[0], line_no));
    } else if (key == "scaling_n_max") {
      need_one(vals, key, line_no);
      cfg.scaling_n_max = static_cast<int>(parse_int(vals[0], line_no));
    } else if (key == "scaling_beta") {
      need_one(vals, key, line_no);
      cfg.scaling_beta = parse_real(vals[0], line_no);
      if (!(cfg.scaling_beta > 0.0)) throw ConfigError("scaling_beta must be positive", line_no);
    } else if (key == "scaling_fixed_m") {
      need_one(vals, key, line_no);
      const long long v = parse_int(vals[0], line_no);
      if (v < 1) throw ConfigError("scaling_fixed_m must be >= 1", line_no);
      cfg.scaling_fixed_m = static_cast<int>(v);
    } else if (key == "beta_min_grid_step") {
      need_one(vals, key, line_no);
      cfg.beta_min_grid_step = parse_real(vals[0], line_no);
      if (!(cfg.beta_min_grid_step > 0.0))
        throw ConfigError("beta_min_grid_step must be positive", line_no);
    } else if (key == "beta_min_grid_max") {
      need_one(vals, key, line_no);
      cfg.beta_min_grid_max = parse_real(vals[0], line_no);
      if (!(cfg.beta_min_grid_max > 0.0))
        throw ConfigError("beta_min_grid_max must be positive", line_no);
    } else {
      throw ConfigError("unknown field '" + key + "'", line_no);
    }
  }

  if (!have_schema) throw ConfigError("missing required field: schema");
  if (!have_n_system) throw ConfigError("missing required field: n_system");
  if (!have_jz) throw ConfigError("missing required field: j_z");
  if (!have_beta_bar) throw ConfigError("missing required field: beta_bar");
  if (!have_subspace) throw ConfigError("missing required field: subspace");

  try {
    cfg.subspace = ComputationalSubspace::from_bitstrings(cfg.model.n_sites, subspace_tokens);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid subspace: ") + e.what(), subspace_line);
  }
  if (cfg.m_values.empty()) {
    cfg.m_values = {cfg.subspace.m()};
  } else {
    for (int m : cfg.m_values)
      if (m > cfg.subspace.m())
        throw ConfigError("m_values entry " + std::to_string(m) +
                              " exceeds the declared subspace size " +
                              std::to_string(cfg.subspace.m()),
                          m_values_line);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// CSV layer

namespace {

// Free-text cell values (error messages) must stay one cell wide.
std::string sanitize_cell(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

std::string write_csv(const CsvTable& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << sanitize_cell(table.columns[c]);
  os << "\n";
  for (const std::vector<std::string>& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::invalid_argument("csv row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << sanitize_cell(row[c]);
    os << "\n";
  }
  return os.str();
}

CsvTable read_csv(const std::string& text) {
  CsvTable table;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    cells.push_back(cur);
    if (header) {
      table.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != table.columns.size())
        throw std::invalid_argument("csv row width does not match the header");
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

namespace {

std::string bool_cell(bool v) { return v ? "true" : "false"; }

// ---------------------------------------------------------------------------
// Shared run scaffolding

struct Oracle {
  Observable h;
  GibbsReference ref;
  DensityMatrix exact_rho;
  double f_exact = 0.0;
};

Oracle make_oracle(const Observable& h, double beta) {
  GibbsReference ref(h, beta);
  DensityMatrix rho = ref.exact_state();
  const double f = ref.free_energy_exact();
  return Oracle{h, std::move(ref), std::move(rho), f};
}

AdaptConfig adapt_config_from(const ExperimentConfig& cfg, const RunOptions& opts,
                              bool record_path) {
  AdaptConfig a;
  a.epsilon = cfg.pool_epsilon;
  a.max_operators = opts.smoke ? std::min(cfg.max_operators, 40) : cfg.max_operators;
  a.pool_max_weight = cfg.pool_max_weight;
  a.run_initial_mu_opt = cfg.run_initial_mu_opt;
  a.seed = cfg.seed;
  a.workers = 1;  // scans parallelize at run granularity instead
  a.record_path = record_path;
  return a;
}

OptimizerConfig optimizer_from(const ExperimentConfig& cfg) {
  OptimizerConfig o;
  o.grad_tol_inf = cfg.grad_tol_inf;
  return o;
}

ComputationalSubspace subspace_prefix(const ComputationalSubspace& s, int m) {
  return ComputationalSubspace{
      s.n_system, std::vector<std::uint64_t>(s.elements.begin(), s.elements.begin() + m)};
}

StateVector eigvec_as_state(const EigenSystem& spec, int level) {
  StateVector v = StateVector::zero_workspace(spec.n_qubits);
  for (Eigen::Index r = 0; r < spec.vectors.rows(); ++r)
    v.data()[static_cast<std::size_t>(r)] = spec.vectors(r, level);
  return v;
}

std::vector<StateVector> group_basis(const EigenSystem& spec, int level) {
  std::vector<StateVector> basis;
  for (int idx : spec.group_of(level)) basis.push_back(eigvec_as_state(spec, idx));
  return basis;
}

struct StateMetric {
  double infidelity = 0.0;
  double energy_rel_error = 0.0;
};

// Sorted rank r of the run vs. oracle level r: infidelity against the whole
// degeneracy group (a degenerate target is hit if the state lands anywhere
// in its eigenspace), energy against the level itself.
StateMetric state_metric(const RunResult& run, const Oracle& oracle, int rank) {
  const EigenSystem& spec = oracle.ref.spectrum();
  StateMetric m;
  m.infidelity = 1.0 - subspace_fidelity(run.eigen_states[static_cast<std::size_t>(rank)],
                                         group_basis(spec, rank));
  m.energy_rel_error = relative_error(run.eigen_energies[static_cast<std::size_t>(rank)],
                                      spec.energies(rank))
                           .value;
  return m;
}

double gibbs_rel_f_error(const Oracle& oracle, const DensityMatrix& rho, double beta) {
  return relative_error(free_energy_of_state(oracle.h, rho, beta), oracle.f_exact).value;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------
// run

std::vector<OutputFile> cmd_run(const ExperimentConfig& config, const RunOptions& opts) {
  const Observable h = build_xxz(config.model);
  const RunResult run = run_tepid_adapt(h, config.beta_bar, config.subspace,
                                        adapt_config_from(config, opts, false),
                                        optimizer_from(config));
  const Oracle oracle = make_oracle(h, config.beta_bar);

  CsvTable trace;
  trace.columns = {"adaptation",   "free_energy",   "pool_grad_inf", "chosen_operator",
                   "n_parameters", "vqe_converged", "vqe_stalled"};
  for (const TraceRow& row : run.trace)
    trace.rows.push_back({std::to_string(row.adaptation), format_double(row.free_energy),
                          format_double(row.pool_grad_inf), row.chosen_operator,
                          std::to_string(row.n_parameters), bool_cell(row.vqe_converged),
                          bool_cell(row.vqe_stalled)});

  // One row per extracted state; the final row reports the mixed prepared
  // state, with the energy column carrying its free-energy error instead.
  CsvTable states;
  states.columns = {"state_index", "infidelity", "relative_energy_error"};
  for (int r = 0; r < config.subspace.m(); ++r) {
    const StateMetric m = state_metric(run, oracle, r);
    states.rows.push_back({std::to_string(r + 1), format_double(m.infidelity),
                           format_double(m.energy_rel_error)});
  }
  states.rows.push_back(
      {"rho_G", format_double(1.0 - fidelity(run.gibbs_state, oracle.exact_rho)),
       format_double(gibbs_rel_f_error(oracle, run.gibbs_state, config.beta_bar))});

  return {{"run_result.txt", format_run_result(run)},
          {"run_trace.csv", write_csv(trace)},
          {"run_states.csv", write_csv(states)}};
}

// ---------------------------------------------------------------------------
// m-scan

std::vector<OutputFile> cmd_m_scan(const ExperimentConfig& config, const RunOptions& opts) {
  if (config.m_values.empty()) throw ConfigError("m_values must be nonempty for m-scan");
  const Observable h = build_xxz(config.model);
  const Oracle oracle = make_oracle(h, config.beta_bar);

  std::vector<std::vector<std::vector<std::string>>> per_m(config.m_values.size());
  parallel_chunks(config.m_values.size(), opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const int m = config.m_values[i];
      try {
        const RunResult run =
            run_tepid_adapt(h, config.beta_bar, subspace_prefix(config.subspace, m),
                            adapt_config_from(config, opts, false), optimizer_from(config));
        const double gibbs_infid = 1.0 - fidelity(run.gibbs_state, oracle.exact_rho);
        const double gibbs_ferr = gibbs_rel_f_error(oracle, run.gibbs_state, config.beta_bar);
        for (int r = 0; r < m; ++r) {
          const StateMetric sm = state_metric(run, oracle, r);
          per_m[i].push_back({std::to_string(m), std::to_string(r + 1),
                              format_double(sm.infidelity), format_double(sm.energy_rel_error),
                              format_double(gibbs_infid), format_double(gibbs_ferr), "ok"});
        }
      } catch (const std::exception& e) {
        per_m[i].push_back({std::to_string(m), "0", format_double(kNan), format_double(kNan),
                            format_double(kNan), format_double(kNan),
                            std::string("error: ") + e.what()});
      }
    }
  });

  CsvTable table;
  table.columns = {"m",
                   "state_index",
                   "infidelity",
                   "relative_energy_error",
                   "gibbs_infidelity",
                   "gibbs_rel_f_error",
                   "status"};
  for (std::vector<std::vector<std::string>>& rows : per_m)
    for (std::vector<std::string>& row : rows) table.rows.push_back(std::move(row));
  return {{"m_scan.csv", write_csv(table)}};
}

// ---------------------------------------------------------------------------
// beta-extrapolate

std::vector<OutputFile> cmd_beta_extrapolate(const ExperimentConfig& config,
                                             const RunOptions& opts) {
  if (config.beta_grid.empty()) throw ConfigError("beta_grid must be nonempty");
  const double bb = config.beta_bar;
  bool below = false, above = false;
  for (double b : config.beta_grid) {
    below = below || b < bb;
    above = above || b > bb;
  }
  if (!below || !above)
    throw ConfigError("beta_grid must span values below and above beta_bar");

  const Observable h = build_xxz(config.model);

  // Full runs at every grid point up to beta_bar (beta_bar itself is always
  // run: it anchors the extrapolated branch).
  std::set<double> optimized_set;
  for (double b : config.beta_grid)
    if (b <= bb) optimized_set.insert(b);
  optimized_set.insert(bb);
  const std::vector<double> optimized(optimized_set.begin(), optimized_set.end());

  std::set<double> extrapolated_set;
  for (double b : config.beta_grid)
    if (b >= bb) extrapolated_set.insert(b);
  extrapolated_set.insert(bb);
  const std::vector<double> extrapolated(extrapolated_set.begin(), extrapolated_set.end());

  struct OptOutcome {
    bool ok = false;
    std::string error;
    double rel_f_error = 0.0;
    double fid = 0.0;
    RunResult run;
  };
  std::vector<OptOutcome> outcomes(optimized.size());
  parallel_chunks(optimized.size(), opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        const double beta = optimized[i];
        OptOutcome& out = outcomes[i];
        out.run = run_tepid_adapt(h, beta, config.subspace,
                                  adapt_config_from(config, opts, false),
                                  optimizer_from(config));
        const Oracle oracle = make_oracle(h, beta);
        out.rel_f_error = gibbs_rel_f_error(oracle, out.run.gibbs_state, beta);
        out.fid = fidelity(out.run.gibbs_state, oracle.exact_rho);
        out.ok = true;
      } catch (const std::exception& e) {
        outcomes[i].error = std::string("error: ") + e.what();
      }
    }
  });

  CsvTable table;
  table.columns = {"beta", "mode", "m", "rel_f_error", "gibbs_fidelity", "status"};
  const std::string m_cell = std::to_string(config.subspace.m());
  for (std::size_t i = 0; i < optimized.size(); ++i) {
    const OptOutcome& out = outcomes[i];
    table.rows.push_back({format_double(optimized[i]), "optimized", m_cell,
                          out.ok ? format_double(out.rel_f_error) : format_double(kNan),
                          out.ok ? format_double(out.fid) : format_double(kNan),
                          out.ok ? "ok" : out.error});
  }

  const OptOutcome& anchor = outcomes.back();  // beta_bar is the largest optimized point
  for (double beta : extrapolated) {
    if (!anchor.ok) {
      table.rows.push_back({format_double(beta), "extrapolated", m_cell, format_double(kNan),
                            format_double(kNan), anchor.error});
      continue;
    }
    try {
      const DensityMatrix rho = extrapolate_gibbs(anchor.run, beta);
      const Oracle oracle = make_oracle(h, beta);
      table.rows.push_back({format_double(beta), "extrapolated", m_cell,
                            format_double(gibbs_rel_f_error(oracle, rho, beta)),
                            format_double(fidelity(rho, oracle.exact_rho)), "ok"});
    } catch (const std::exception& e) {
      table.rows.push_back({format_double(beta), "extrapolated", m_cell, format_double(kNan),
                            format_double(kNan),
                            std::string("error: ") + e.what()});
    }
  }

  return {{"beta_extrapolate.csv", write_csv(table)}};
}

// ---------------------------------------------------------------------------
// tolerance-scan

std::vector<OutputFile> cmd_tolerance_scan(const ExperimentConfig& config,
                                           const RunOptions& opts) {
  if (config.epsilon_values.empty()) throw ConfigError("epsilon_values must be nonempty");
  std::vector<double> eps;
  for (double e : config.epsilon_values) {
    const double adj = opts.smoke ? std::max(e, 1e-4) : e;
    if (std::find(eps.begin(), eps.end(), adj) == eps.end()) eps.push_back(adj);
  }
  const double tightest = *std::min_element(eps.begin(), eps.end());

  const Observable h = build_xxz(config.model);
  const int m = config.subspace.m();

  AdaptConfig acfg = adapt_config_from(config, opts, true);
  acfg.epsilon = tightest;
  acfg.workers = opts.workers;  // single run: parallelize the pool instead
  const RunResult run =
      run_tepid_adapt(h, config.beta_bar, config.subspace, acfg, optimizer_from(config));

  const Oracle oracle = make_oracle(h, config.beta_bar);
  const double floor_rel =
      relative_error(oracle.ref.truncated(m, TruncationMode::permissive).free_energy_floor,
                     oracle.f_exact)
          .value;

  CsvTable trace;
  trace.columns = {"adaptation", "free_energy", "rel_f_error"};
  for (int k = 1; k <= m; ++k)
    trace.columns.push_back("state_" + std::to_string(k) + "_energy_rel_error");
  trace.columns.push_back("floor_rel_f_error");
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    std::vector<std::string> row{
        std::to_string(run.trace[i].adaptation), format_double(run.trace[i].free_energy),
        format_double(relative_error(run.trace[i].free_energy, oracle.f_exact).value)};
    for (int k = 0; k < m; ++k)
      row.push_back(format_double(
          relative_error(run.trace_energies_sorted[i][static_cast<std::size_t>(k)],
                         oracle.ref.spectrum().energies(k))
              .value));
    row.push_back(format_double(floor_rel));
    trace.rows.push_back(std::move(row));
  }

  // First adaptation at which the pool gradient is inside epsilon AND the
  // inner optimization that produced the point had converged; -1 = never.
  CsvTable conv;
  conv.columns = {"epsilon", "converged_adaptation", "n_parameters"};
  for (double e : eps) {
    int hit = -1, n_params = -1;
    for (const TraceRow& row : run.trace) {
      if (row.pool_grad_inf <= e && row.vqe_converged) {
        hit = row.adaptation;
        n_params = row.n_parameters;
        break;
      }
    }
    conv.rows.push_back(
        {format_double(e), std::to_string(hit), std::to_string(n_params)});
  }

  return {{"tolerance_trace.csv", write_csv(trace)},
          {"tolerance_convergence.csv", write_csv(conv)}};
}

// ---------------------------------------------------------------------------
// scaling-study

namespace {

constexpr int kScalingCap = 14;  // dense diagonalization ceiling

// Eigenvalue-only thermal weights and the prefix sums the closed-form
// truncation fidelity needs.
struct WeightPrefix {
  std::vector<double> w;   // normalized, ascending energy
  std::vector<double> pw;  // pw[k] = sum_{j<k} w_j
};

WeightPrefix thermal_weights(const Eigen::VectorXd& energies, double beta) {
  const std::size_t dim = static_cast<std::size_t>(energies.size());
  WeightPrefix out;
  out.w.resize(dim);
  double z = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    out.w[k] = std::exp(-beta * (energies[static_cast<Eigen::Index>(k)] - energies[0]));
    z += out.w[k];
  }
  out.pw.resize(dim + 1, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    out.w[k] /= z;
    out.pw[k + 1] = out.pw[k] + out.w[k];
  }
  return out;
}

// Best fidelity any m-state truncation can reach against the exact thermal
// distribution. Both states are diagonal in the energy eigenbasis, so the
// optimum keeps the m largest weights renormalized by their own mass W, and
// the squared Bhattacharyya overlap collapses to (sum_top-m w_k / sqrt(W))^2
// = W: the captured prefix mass itself. Spreading weight across a cut
// degeneracy group instead would raise the rank above m, which an m-branch
// preparation cannot realize.
double truncation_fidelity(const WeightPrefix& wp, int m) {
  const int dim = static_cast<int>(wp.w.size());
  if (m >= dim) return 1.0;  // identity truncation
  return wp.pw[static_cast<std::size_t>(m)];
}

}  // namespace

std::vector<OutputFile> cmd_scaling_study(const ExperimentConfig& config,
                                          const RunOptions& opts) {
  const int n_min = config.scaling_n_min;
  const int n_max = opts.smoke ? std::min(config.scaling_n_max, 6) : config.scaling_n_max;
  if (n_min < 2 || n_max < n_min) throw ConfigError("scaling range must satisfy 2 <= min <= max");
  if (n_max > kScalingCap)
    throw ResourceError("scaling study capped at " + std::to_string(kScalingCap) +
                        " sites (dense diagonalization)");
  if (config.fidelity_thresholds.empty())
    throw ConfigError("fidelity_thresholds must be nonempty");

  CsvTable m_min_table;
  m_min_table.columns = {"n_system", "threshold", "m_min"};
  CsvTable beta_min_table;
  beta_min_table.columns = {"n_system", "threshold", "fixed_m", "beta_min"};

  const std::size_t n_thresholds = config.fidelity_thresholds.size();
  std::vector<std::vector<int>> m_min(n_thresholds);

  for (int n = n_min; n <= n_max; ++n) {
    const Observable h = build_xxz(XXZConfig{n, config.model.j_z});
    const Eigen::VectorXd energies = eigenvalues_only(h);
    const int dim = 1 << n;

    const WeightPrefix at_beta = thermal_weights(energies, config.scaling_beta);
    for (std::size_t t = 0; t < n_thresholds; ++t) {
      const double thr = config.fidelity_thresholds[t];
      int mm = dim;
      if (thr < 1.0) {
        for (int m = 1; m <= dim; ++m) {
          if (truncation_fidelity(at_beta, m) >= thr) {
            mm = m;
            break;
          }
        }
      }
      m_min[t].push_back(mm);
      m_min_table.rows.push_back(
          {std::to_string(n), format_double(thr), std::to_string(mm)});
    }

    // beta_min: ascending sweep, one weight build per grid point, shared by
    // all thresholds still waiting for their first hit.
    const int fixed_m = std::min(config.scaling_fixed_m, dim);
    std::vector<double> beta_min(n_thresholds, std::numeric_limits<double>::infinity());
    std::size_t unresolved = n_thresholds;
    for (int step = 1;; ++step) {
      const double beta = step * config.beta_min_grid_step;
      if (beta > config.beta_min_grid_max + 1e-12 || unresolved == 0) break;
      const WeightPrefix wp = thermal_weights(energies, beta);
      const double fid = truncation_fidelity(wp, fixed_m);
      for (std::size_t t = 0; t < n_thresholds; ++t) {
        if (!std::isinf(beta_min[t])) continue;
        const double thr = config.fidelity_thresholds[t];
        const bool hit = thr < 1.0 ? fid >= thr : fixed_m == dim;
        if (hit) {
          beta_min[t] = beta;
          --unresolved;
        }
      }
    }
    for (std::size_t t = 0; t < n_thresholds; ++t)
      beta_min_table.rows.push_back({std::to_string(n),
                                     format_double(config.fidelity_thresholds[t]),
                                     std::to_string(fixed_m), format_double(beta_min[t])});
  }

  CsvTable fit_table;
  fit_table.columns = {"threshold", "model", "a", "b", "mse", "ok", "diagnostic"};
  for (std::size_t t = 0; t < n_thresholds; ++t) {
    std::vector<FitPoint> pts;
    for (int n = n_min; n <= n_max; ++n)
      pts.push_back(FitPoint{static_cast<double>(n),
                             static_cast<double>(m_min[t][static_cast<std::size_t>(n - n_min)])});
    for (FitKind kind : {FitKind::power, FitKind::exponential}) {
      std::string thr = format_double(config.fidelity_thresholds[t]);
      if (pts.size() < 3) {
        fit_table.rows.push_back({thr, fit_kind_name(kind), format_double(kNan),
                                  format_double(kNan), format_double(kNan), "false",
                                  "fewer than 3 points"});
        continue;
      }
      const FitResult fit = fit_curve(pts, kind);
      fit_table.rows.push_back({thr, fit_kind_name(kind), format_double(fit.a),
                                format_double(fit.b), format_double(fit.mse),
                                bool_cell(fit.ok), fit.diagnostic});
    }
  }

  CsvTable meta;
  meta.columns = {"key", "value"};
  meta.rows.push_back({"beta", format_double(config.scaling_beta)});
  meta.rows.push_back({"beta_min_grid_step", format_double(config.beta_min_grid_step)});
  meta.rows.push_back({"beta_min_grid_max", format_double(config.beta_min_grid_max)});
  meta.rows.push_back({"truncation_fidelity", "best_rank_m"});
  meta.rows.push_back({"n_min", std::to_string(n_min)});
  meta.rows.push_back({"n_max", std::to_string(n_max)});
  meta.rows.push_back({"j_z", format_double(config.model.j_z)});

  return {{"scaling_m_min.csv", write_csv(m_min_table)},
          {"scaling_beta_min.csv", write_csv(beta_min_table)},
          {"scaling_fits.csv", write_csv(fit_table)},
          {"scaling_meta.csv", write_csv(meta)}};
}

// ---------------------------------------------------------------------------
// random-restart

std::vector<OutputFile> cmd_random_restart(const ExperimentConfig& config,
                                           const RunOptions& opts) {
  const Observable h = build_xxz(config.model);
  AdaptConfig acfg = adapt_config_from(config, opts, true);
  const OptimizerConfig ocfg = optimizer_from(config);
  const RunResult run = run_tepid_adapt(h, config.beta_bar, config.subspace, acfg, ocfg);
  const Oracle oracle = make_oracle(h, config.beta_bar);
  const int m = config.subspace.m();
  const int n_phi = m - 1;
  const int restarts = opts.smoke ? std::min(config.restart_count, 10) : config.restart_count;

  CsvTable path;
  path.columns = {"n_params", "free_energy", "rel_f_error"};
  for (const TraceRow& row : run.trace)
    path.rows.push_back({std::to_string(row.n_parameters), format_double(row.free_energy),
                         format_double(relative_error(row.free_energy, oracle.f_exact).value)});

  // Free-energy floors when only the lowest k levels are reachable.
  CsvTable floors;
  floors.columns = {"index_set", "rel_f_error_floor"};
  for (int k = 1; k <= m; ++k) {
    const double floor_f =
        oracle.ref.truncated(k, TruncationMode::permissive).free_energy_floor;
    floors.rows.push_back({k == 1 ? "1" : "1-" + std::to_string(k),
                           format_double(relative_error(floor_f, oracle.f_exact).value)});
  }

  struct Item {
    int trace_row;
    int restart;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < run.trace.size(); ++i)
    for (int r = 0; r < restarts; ++r)
      items.push_back(Item{static_cast<int>(i), r});

  std::vector<std::vector<std::string>> rows(items.size());
  parallel_chunks(items.size(), opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const Item item = items[idx];
      const int n_theta = item.trace_row;  // row i precedes the (i+1)-th append
      const int n_params = n_phi + n_theta;
      try {
        FreeEnergyObjective obj(h, config.beta_bar, config.subspace);
        obj.set_generators(std::vector<PauliString>(run.operators.begin(),
                                                    run.operators.begin() + n_theta));
        // Uniform draws over the natural parameter ranges, seeded per
        // (length, restart) so rows are reproducible in isolation.
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                          static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(n_params),
                          static_cast<std::uint32_t>(item.restart)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> phi_draw(0.0, 1.5707963267948966);
        std::uniform_real_distribution<double> theta_draw(-3.141592653589793,
                                                          3.141592653589793);
        std::vector<double> x0;
        for (int p = 0; p < n_phi; ++p) x0.push_back(phi_draw(rng));
        for (int p = 0; p < n_theta; ++p) x0.push_back(theta_draw(rng));
        const MinimizeResult res = minimize(
            [&obj](std::span<const double> xs, std::span<double> gs) {
              return obj.value_and_gradient(xs, gs);
            },
            x0, ocfg);
        rows[idx] = {std::to_string(n_params), std::to_string(item.restart),
                     bool_cell(res.converged),
                     format_double(relative_error(res.f, oracle.f_exact).value), "ok"};
      } catch (const std::exception& e) {
        rows[idx] = {std::to_string(n_params), std::to_string(item.restart), "false",
                     format_double(kNan), std::string("error: ") + e.what()};
      }
    }
  });

  CsvTable table;
  table.columns = {"n_params", "restart", "converged", "rel_f_error", "status"};
  for (std::vector<std::string>& row : rows) table.rows.push_back(std::move(row));

  return {{"restart_path.csv", write_csv(path)},
          {"restart_floors.csv", write_csv(floors)},
          {"restart_samples.csv", write_csv(table)}};
}

void write_outputs(const std::vector<OutputFile>& files, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const OutputFile& f : files) {
    const std::filesystem::path p = std::filesystem::path(dir) / f.name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write output file '" + p.string() + "'");
    out << f.content;
    if (!out) throw ResourceError("write failed for '" + p.string() + "'");
  }
}

}  // namespace tepid
