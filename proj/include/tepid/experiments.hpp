#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tepid/ansatz.hpp"
#include "tepid/xxz.hpp"

namespace tepid {

// Flat key-value experiment description (one file per experiment). Keys are
// typed; `subspace` is an explicit bitstring list; unknown, duplicate, or
// malformed keys are reported with their line number.
struct ExperimentConfig {
  XXZConfig model;                       // n_system, j_z (required)
  double beta_bar = 0.0;                 // required, > 0
  ComputationalSubspace subspace{1, {0}};  // required bitstring list
  std::vector<int> m_values;             // default: {subspace size}
  std::vector<double> epsilon_values{1e-2, 1e-3, 1e-4, 1e-6};
  std::vector<double> beta_grid;
  std::vector<double> fidelity_thresholds{0.99, 0.999, 0.9999};
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  // Adaptive-run controls.
  double pool_epsilon = 1e-6;
  int max_operators = 300;
  double grad_tol_inf = 1e-10;
  int pool_max_weight = 0;  // 0 = full pool
  bool run_initial_mu_opt = true;

  // Study controls.
  int restart_count = 2500;
  int scaling_n_min = 2;
  int scaling_n_max = 12;
  double scaling_beta = 3.0;
  int scaling_fixed_m = 4;
  double beta_min_grid_step = 0.1;
  double beta_min_grid_max = 20.0;
};

// Parses config text / file. Throws ConfigError carrying the offending line
// (0 for file-level problems such as a missing required key).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Minimal CSV layer: comma-separated, header row first, values never contain
// commas (free-text fields are sanitized on write). Every table the CLI
// emits round-trips through read_csv.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
std::string write_csv(const CsvTable& table);
CsvTable read_csv(const std::string& text);

struct RunOptions {
  int workers = 1;
  bool smoke = false;  // reduced counts: capped operators/restarts/sizes
};

// A file the command wants written: name is relative to the output
// directory. Content strings are fully deterministic for fixed inputs.
struct OutputFile {
  std::string name;
  std::string content;
};

std::vector<OutputFile> cmd_run(const ExperimentConfig& config, const RunOptions& opts);
std::vector<OutputFile> cmd_m_scan(const ExperimentConfig& config, const RunOptions& opts);
std::vector<OutputFile> cmd_beta_extrapolate(const ExperimentConfig& config,
                                             const RunOptions& opts);
std::vector<OutputFile> cmd_tolerance_scan(const ExperimentConfig& config,
                                           const RunOptions& opts);
std::vector<OutputFile> cmd_scaling_study(const ExperimentConfig& config,
                                          const RunOptions& opts);
std::vector<OutputFile> cmd_random_restart(const ExperimentConfig& config,
                                           const RunOptions& opts);

// Creates the directory (recursively) and writes every file.
void write_outputs(const std::vector<OutputFile>& files, const std::string& dir);

}  // namespace tepid
