// Command-line front end: loads an experiment config, dispatches one
// subcommand, and writes the emitted files into the output directory.
//
// Exit codes: 0 success, 2 config error, 3 resource limit, 4 run failure.

#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tepid/errors.hpp"
#include "tepid/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitFailure = 4;

using Command = std::function<std::vector<tepid::OutputFile>(const tepid::ExperimentConfig&,
                                                             const tepid::RunOptions&)>;

struct Dispatch {
  const char* name;
  const char* help;
  Command fn;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TEPID-ADAPT experiment driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  bool smoke = false;

  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory (default: config's output_dir)");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_option("--workers", workers, "worker threads for scans (0 = hardware)");
  app.add_flag("--smoke", smoke, "reduced counts for quick plumbing checks");

  const Dispatch dispatches[] = {
      {"run", "single adaptive run: result document, trace, per-state table", tepid::cmd_run},
      {"m-scan", "one run per subspace cutoff m", tepid::cmd_m_scan},
      {"beta-extrapolate", "optimized vs. reweighted runs across a beta grid",
       tepid::cmd_beta_extrapolate},
      {"tolerance-scan", "per-adaptation errors and convergence vs. pool tolerance",
       tepid::cmd_tolerance_scan},
      {"scaling-study", "exact-diagonalization m_min/beta_min scalings with fits",
       tepid::cmd_scaling_study},
      {"random-restart", "randomized re-optimization along the adaptive path",
       tepid::cmd_random_restart},
  };
  for (const Dispatch& d : dispatches) app.add_subcommand(d.name, d.help)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  try {
    tepid::ExperimentConfig config = tepid::load_config(config_path);
    if (seed_given) config.seed = seed;

    tepid::RunOptions opts;
    opts.workers = workers;
    opts.smoke = smoke;

    const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
    for (const Dispatch& d : dispatches) {
      if (app.get_subcommand(d.name)->parsed()) {
        tepid::write_outputs(d.fn(config, opts), dir);
        return 0;
      }
    }
    std::cerr << "no subcommand selected\n";
    return kExitFailure;
  } catch (const tepid::ConfigError& e) {
    std::cerr << config_path;
    if (e.line() > 0) std::cerr << ":" << e.line();
    std::cerr << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const tepid::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitFailure;
  }
}
