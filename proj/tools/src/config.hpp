#pragma once

// Run configuration: flat "key = value" text, one run per file.
//
//   protocol = transverse
//   n_k = 50
//   tau_list = [5, 10, 20, 40]
//   w2_list = [0, 0.25, 0.5, 1, 2, 4]   # or fm_deviation_khz_list / am_depth_list
//
// Unknown or repeated keys are rejected.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "antikz/scaling.hpp"
#include "antikz/sweep.hpp"

namespace antikz::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NoiseInput { W2, FmDeviationKhz, AmDepth };

std::string noise_input_key(NoiseInput n);

struct RunConfig {
  SweepPlan plan;
  NoiseInput noise_input = NoiseInput::W2;
  std::vector<double> noise_values;  // as written in the file
  PipelineOptions fit;
  std::filesystem::path output_dir = "runs";
};

/// Throws ConfigError with the line number or the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace antikz::cli
