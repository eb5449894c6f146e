#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace antikz::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // validate: at least one check failed
  kExitConfig = 2,
  kExitCompute = 3,
  kExitFit = 4,
};

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;  // overrides output_dir
  unsigned threads = 0;                      // 0: ANTIKZ_THREADS or all cores
  std::optional<std::uint64_t> seed;
  bool force = false;  // write into `out` itself, replacing existing tables
  bool progress = true;
};

/// Runs the sweep and writes manifest.json, pk_table.csv, nw_table.csv.
/// `run_dir`, if given, receives the directory written.
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err,
                 std::filesystem::path* run_dir = nullptr);

/// Fits nw_table.csv in `dir`; writes fits.json and scaling.csv there.
int cmd_fit(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

struct ValidateOptions {
  double dt_factor = 1.0;   // debug: scales the step used by the step-halving check
  double noise_bias = 0.0;  // debug: added to every noise sample in the moment checks
  std::optional<std::filesystem::path> dump_dir;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_validation(const ValidateOptions& opt);
int cmd_validate(const ValidateOptions& opt, std::ostream& out);

/// Markdown summary of the fits.json files in `dirs`.
int cmd_report(const std::vector<std::filesystem::path>& dirs,
               const std::optional<std::filesystem::path>& out_file, std::ostream& out,
               std::ostream& err);

/// <base>/<protocol>_<UTC timestamp>[_n], created fresh; `base` itself if force.
std::filesystem::path make_run_dir(const std::filesystem::path& base, const std::string& protocol,
                                   bool force);

}  // namespace antikz::cli
