#pragma once

// Anti-KZ analysis: n_W(tau) ~ delta_r * tau + c * tau^-beta.
//
// Fitting is two-stage: (c, beta) from the noise-free curve, delta_r per noise
// level from the noise-induced excess delta_n = n_W - n_0 = delta_r * tau, and
// tau_opt from the closed-form minimizer. Finally ln tau_opt is regressed on
// ln W^2 to get alpha.

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "antikz/model.hpp"
#include "antikz/sweep.hpp"

namespace antikz {

struct KzFit {
  double c = 0.0;
  double beta = 0.0;
  double c_se = 0.0;
  double beta_se = 0.0;
  double residual_norm = 0.0;  // of ln n_0
  std::vector<double> residuals;
  bool weighted = false;
};

/// Least squares of ln n_0 = ln c - beta ln tau, weighted by (n/se)^2 when
/// every record has se > 0, unweighted otherwise.
/// Throws Error(InsufficientData) for fewer than 4 distinct tau,
/// Error(NonPositive) if any n_W <= 0.
KzFit fit_kz_exponent(const std::vector<DefectRecord>& baseline);

struct NoiseRateFit {
  double w2 = 0.0;
  double delta_r = 0.0;
  double delta_r_se = 0.0;
  double r_squared = 0.0;
  std::vector<double> taus;
  std::vector<double> delta_n;
  std::vector<double> residuals;
};

/// delta_r from delta_n = delta_r * tau through the origin (weighted by
/// 1 / (se_W^2 + se_0^2) when available). R^2 is the centered, unweighted value.
/// Throws Error(GridMismatch) if the tau grids differ, Error(InsufficientData)
/// below 3 points.
NoiseRateFit fit_noise_rate(const std::vector<DefectRecord>& noisy,
                            const std::vector<DefectRecord>& baseline);

/// (beta c / delta_r)^(1 / (1 + beta)), the minimizer of delta_r tau + c tau^-beta.
/// Throws Error(NoMinimum) if delta_r <= 0, Error(Domain) if c or beta <= 0.
double optimal_quench_time(double c, double beta, double delta_r);

struct AlphaFit {
  double alpha = 0.0;
  double alpha_se = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

struct ScalingPoint {
  double w2 = 0.0;
  double tau_opt = 0.0;
};

/// Ordinary least squares slope of ln tau_opt against ln W^2.
/// Throws Error(InsufficientData) below 3 points, Error(NonPositive) for
/// non-positive values.
AlphaFit fit_alpha(const std::vector<ScalingPoint>& points);

/// Late-time linear rate r_0 of the baseline: slope of n_0 over the last
/// three tau values, clamped at 0.
double baseline_floor_rate(const std::vector<DefectRecord>& baseline);

struct PipelineOptions {
  double floor_factor = 5.0;  // KZ window keeps n_0 >= floor_factor * r_0 * tau
  double kz_tau_min = 0.0;
  double kz_tau_max = std::numeric_limits<double>::infinity();
  double noise_tau_min = 0.0;
  double noise_tau_max = std::numeric_limits<double>::infinity();
};

struct NoiseLevelFit {
  NoiseRateFit rate;
  std::optional<double> tau_opt;
  double tau_opt_se = 0.0;
  std::string note;
};

struct ProtocolFit {
  std::optional<Protocol> protocol;
  KzFit kz;
  double r0 = 0.0;
  std::vector<double> kz_taus;
  PipelineOptions options;
  std::vector<NoiseLevelFit> levels;
  std::optional<AlphaFit> alpha;
  std::vector<ScalingPoint> points;
};

/// Runs the full chain on one protocol's nw_table.
/// Throws Error(MissingBaseline) without W^2 = 0 rows and
/// Error(InsufficientData) with too few tau values.
ProtocolFit fit_pipeline(const std::vector<DefectRecord>& records, std::optional<Protocol> protocol,
                         const PipelineOptions& options = {});

std::string fits_to_json(const std::vector<ProtocolFit>& fits);
void write_fits_json(const std::filesystem::path& path, const std::vector<ProtocolFit>& fits);
/// Header ln_w2,ln_tau_opt.
void write_scaling_csv(const std::filesystem::path& path, const ProtocolFit& fit);

}  // namespace antikz
