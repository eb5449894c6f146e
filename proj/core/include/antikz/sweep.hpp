#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "antikz/evolve.hpp"
#include "antikz/model.hpp"
#include "antikz/noise.hpp"

namespace antikz {

/// Noise intensity (in units of energy^2 * time, hbar = 1) injected per unit of
/// the dimensionless knob W^2. The modulation-to-field constant is hardware
/// specific; this default puts the transverse optimum near tau ~ 30 at W^2 = 1
/// while keeping noise-induced excitation perturbative for tau <= 100.
inline constexpr double kDefaultIntensityScale = 5e-4;

struct SweepPlan {
  ProtocolSpec protocol;  // tau is overwritten per cell
  std::size_t n_k = 50;
  std::vector<double> tau_list;
  std::vector<double> w2_list;
  /// Extra tau values simulated only at W^2 = 0 (needs 0 in w2_list); they
  /// extend the noise-free curve for the exponent fit at no noisy cost.
  std::vector<double> baseline_tau_list;
  double intensity_scale = kDefaultIntensityScale;
  std::size_t n_realizations = 100;
  std::uint64_t master_seed = 0;
  StepPolicy step;

  /// Throws Error(Config) naming the offending field.
  void validate() const;
};

struct PkRow {
  double k = 0.0;
  double tau = 0.0;
  double w2 = 0.0;
  double pk_mean = 0.0;
  double pk_se = 0.0;
  std::size_t n_real = 0;
};

struct PkTable {
  std::size_t n_k = 0;
  std::vector<PkRow> rows;
};

struct DefectRecord {
  double tau = 0.0;
  double w2 = 0.0;
  double nw = 0.0;
  double nw_se = 0.0;
};

struct ModeResult {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n_real = 0;
};

/// k_j = (j + 1/2) pi / n for j = 0 .. n-1; strictly inside (0, pi).
std::vector<double> k_grid(std::size_t n);

/// Largest noise-free gap over the grid and the whole ramp.
double plan_max_gap(const ProtocolSpec& protocol, const std::vector<double>& ks);

/// Mean and standard error of p_k over `n_realizations` noise paths of
/// intensity `intensity` (already in physical units). Realization r uses
/// stream key `base` with realization index r. Zero intensity runs one
/// deterministic trajectory and reports se = 0.
ModeResult run_mode(const ProtocolSpec& protocol, double k, double intensity,
                    std::size_t n_realizations, std::uint64_t master_seed, StreamKey base,
                    std::size_t n_steps);

/// n_W = mean of p_k over the grid, se = sqrt(sum se_k^2) / N_k.
/// Throws Error(MissingMode) unless the table holds exactly n_k modes for (tau, w2).
DefectRecord defect_density(const PkTable& table, double tau, double w2);

struct CellFailure {
  double k = 0.0;
  double tau = 0.0;
  double w2 = 0.0;
  std::string message;
};

struct SweepResult {
  PkTable table;
  std::vector<DefectRecord> defects;
  std::vector<CellFailure> failures;
  std::vector<double> taus;  // sorted union of tau_list and baseline_tau_list
  std::vector<double> dt_per_tau;
  double max_gap = 0.0;
};

struct SweepOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Runs every (k, tau, W^2) cell. Cells are a parallel map; each cell
/// accumulates its realizations in index order, so output is bit-identical for
/// any thread count. A failing cell yields NaN values and a CellFailure.
SweepResult run_sweep(const SweepPlan& plan, const SweepOptions& options = {});

/// Header k,tau,w2,pk_mean,pk_se,n_real.
void write_pk_table(const std::filesystem::path& path, const PkTable& table);
PkTable read_pk_table(const std::filesystem::path& path);

/// Header tau,w2,nw,nw_se.
void write_nw_table(const std::filesystem::path& path, const std::vector<DefectRecord>& records);
std::vector<DefectRecord> read_nw_table(const std::filesystem::path& path);

}  // namespace antikz
