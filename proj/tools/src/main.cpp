#include <CLI11.hpp>

#include <iostream>

#include "antikz/version.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace antikz::cli;

  CLI::App app{"Noise-driven quench simulations of the transverse-field XY chain"};
  app.set_version_flag("--version", antikz::kVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  std::string sim_out;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "run a (k, tau, W^2) sweep from a config file");
  simulate->add_option("config_file", sim.config, "run configuration")->check(CLI::ExistingFile);
  simulate->add_option("--config", sim.config, "run configuration")->check(CLI::ExistingFile);
  auto* out_opt = simulate->add_option("--out", sim_out, "output base directory (overrides output_dir)");
  simulate->add_option("--threads", sim.threads, "worker threads (default: ANTIKZ_THREADS or all cores)");
  auto* seed_opt = simulate->add_option("--seed", seed, "master seed (overrides config)");
  simulate->add_flag("--force", sim.force, "write directly into --out, replacing existing tables");
  bool quiet = false;
  simulate->add_flag("-q,--quiet", quiet, "no progress output");

  std::string fit_dir;
  auto* fit = app.add_subcommand("fit", "fit a results directory (writes fits.json, scaling.csv)");
  fit->add_option("results_dir", fit_dir, "directory holding nw_table.csv")->required()->check(CLI::ExistingDirectory);

  ValidateOptions val;
  std::string dump;
  auto* validate = app.add_subcommand("validate", "run the built-in numerical checks");
  validate->add_option("--debug-dt-factor", val.dt_factor, "scale the step-halving dt (fault injection)");
  validate->add_option("--debug-noise-bias", val.noise_bias, "add a constant to noise samples (fault injection)");
  validate->add_option("--dump", dump, "write noise_realization.csv and trajectory.csv here");

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "markdown summary of fitted result directories");
  report->add_option("results_dirs", report_dirs, "directories holding fits.json")->required();
  report->add_option("--out", report_out, "write the report to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*simulate) {
    if (sim.config.empty()) {
      std::cerr << "config error: a config file is required\n";
      return kExitConfig;
    }
    if (*out_opt) sim.out = sim_out;
    if (*seed_opt) sim.seed = seed;
    if (sim.force && !sim.out) {
      std::cerr << "config error: --force needs an explicit --out directory\n";
      return kExitConfig;
    }
    sim.progress = !quiet;
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*fit) return cmd_fit(fit_dir, std::cout, std::cerr);
  if (*validate) {
    if (!dump.empty()) val.dump_dir = dump;
    return cmd_validate(val, std::cout);
  }
  if (*report) {
    std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
    std::optional<std::filesystem::path> out_file;
    if (!report_out.empty()) out_file = report_out;
    return cmd_report(dirs, out_file, std::cout, std::cerr);
  }
  return kExitOk;
}
