#pragma once

// Discretized white Gaussian control noise with <eta(t) eta(t')> = W^2 delta(t - t').
// The delta correlation is regularized as a piecewise-constant path: one
// independent N(0, W^2/dt) sample per integration step.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace antikz {

/// (protocol_id, k_index, tau_index, w_index, realization_index)
struct StreamKey {
  std::uint64_t protocol = 0;
  std::uint64_t k_index = 0;
  std::uint64_t tau_index = 0;
  std::uint64_t w_index = 0;
  std::uint64_t realization = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

struct NoiseSpec {
  double intensity = 0.0;  // W^2
  double dt = 1.0;
  std::size_t n_steps = 0;
  StreamKey key;

  /// Throws Error(Domain) on W^2 < 0, dt <= 0 or n_steps == 0.
  void validate() const;
};

struct NoiseRealization {
  std::vector<double> samples;
  double dt = 1.0;

  std::size_t n_steps() const noexcept { return samples.size(); }
  double duration() const noexcept { return dt * static_cast<double>(samples.size()); }
};

/// Same (spec, master_seed) always yields bit-identical samples, whatever the
/// thread or call order. Samples for 4 W^2 are exactly twice those for W^2.
NoiseRealization sample_realization(const NoiseSpec& spec, std::uint64_t master_seed);

/// Buffer-reusing variant of sample_realization; `out.size()` must equal n_steps.
void sample_into(const NoiseSpec& spec, std::uint64_t master_seed, std::span<double> out);

/// All-zero path of the given length (W^2 = 0, no RNG draws).
NoiseRealization silent_realization(double dt, std::size_t n_steps);

struct SpectrumBin {
  double frequency = 0.0;
  double power = 0.0;
};

/// One-sided periodogram P(f_j) = dt/n |sum_m eta_m e^{-2 pi i j m / n}|^2
/// for f_j = j / (n dt), j = 0 .. n/2. Normalized so that white noise of
/// intensity W^2 has mean power W^2 in every bin. Requires n >= 256.
std::vector<SpectrumBin> psd_estimate(const NoiseRealization& r);

enum class ModulationChannel { FM, AM };

struct ModulationSpec {
  ModulationChannel channel = ModulationChannel::FM;
  double deviation_khz = 0.0;  // F, FM only
  double depth = 0.0;          // A, AM only
};

/// Relative noise intensity set by a modulation parameter:
/// FM: W^2 = (F / 60 kHz)^2, AM: W^2 = A^2.
double modulation_to_intensity(const ModulationSpec& m);

/// Writes step_index,t,eta rows.
void write_realization_csv(const std::filesystem::path& path, const NoiseRealization& r);

}  // namespace antikz
