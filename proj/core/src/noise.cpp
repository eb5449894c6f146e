#include "antikz/noise.hpp"

#include <fftw3.h>

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>

#include "antikz/error.hpp"
#include "format.hpp"

namespace antikz {

namespace {

constexpr double kFmReferenceKhz = 60.0;

std::mt19937_64 stream_engine(const StreamKey& key, std::uint64_t master_seed) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed),     hi(master_seed),     lo(key.protocol),
                    hi(key.protocol),    lo(key.k_index),     hi(key.k_index),
                    lo(key.tau_index),   hi(key.tau_index),   lo(key.w_index),
                    hi(key.w_index),     lo(key.realization), hi(key.realization)};
  return std::mt19937_64(seq);
}

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorKind::Domain, "noise intensity W^2 must be finite and >= 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::Domain, "noise dt must be > 0");
  if (n_steps == 0) throw Error(ErrorKind::Domain, "noise path needs at least one step");
}

void sample_into(const NoiseSpec& spec, std::uint64_t master_seed, std::span<double> out) {
  spec.validate();
  if (out.size() != spec.n_steps) {
    throw Error(ErrorKind::Length, "noise buffer length does not match n_steps");
  }
  if (spec.intensity == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double sigma = std::sqrt(spec.intensity / spec.dt);
  auto engine = stream_engine(spec.key, master_seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : out) x = sigma * normal(engine);
}

NoiseRealization sample_realization(const NoiseSpec& spec, std::uint64_t master_seed) {
  spec.validate();
  NoiseRealization r;
  r.dt = spec.dt;
  r.samples.resize(spec.n_steps);
  sample_into(spec, master_seed, r.samples);
  return r;
}

NoiseRealization silent_realization(double dt, std::size_t n_steps) {
  NoiseRealization r;
  r.dt = dt;
  r.samples.assign(n_steps, 0.0);
  return r;
}

std::vector<SpectrumBin> psd_estimate(const NoiseRealization& r) {
  const std::size_t n = r.samples.size();
  if (n < 256) {
    throw Error(ErrorKind::Length, "periodogram needs at least 256 samples, got " + std::to_string(n));
  }
  const std::size_t n_out = n / 2 + 1;
  std::vector<double> in(r.samples);
  std::vector<std::complex<double>> spectrum(n_out);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<SpectrumBin> out(n_out);
  const double scale = r.dt / static_cast<double>(n);
  const double df = 1.0 / (static_cast<double>(n) * r.dt);
  for (std::size_t j = 0; j < n_out; ++j) {
    out[j] = {df * static_cast<double>(j), scale * std::norm(spectrum[j])};
  }
  return out;
}

double modulation_to_intensity(const ModulationSpec& m) {
  switch (m.channel) {
    case ModulationChannel::FM: {
      if (!(m.deviation_khz >= 0.0)) throw Error(ErrorKind::Domain, "FM deviation must be >= 0");
      const double ratio = m.deviation_khz / kFmReferenceKhz;
      return ratio * ratio;
    }
    case ModulationChannel::AM:
      if (!(m.depth >= 0.0 && m.depth <= 1.0)) {
        throw Error(ErrorKind::Domain, "AM depth must lie in [0, 1]");
      }
      return m.depth * m.depth;
  }
  return 0.0;
}

void write_realization_csv(const std::filesystem::path& path, const NoiseRealization& r) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "step_index,t,eta\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    out << i << ',' << fmt_real(static_cast<double>(i) * r.dt) << ',' << fmt_real(r.samples[i])
        << '\n';
  }
}

}  // namespace antikz
