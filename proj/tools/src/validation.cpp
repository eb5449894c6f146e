#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "antikz/evolve.hpp"
#include "antikz/sweep.hpp"
#include "commands.hpp"

namespace antikz::cli {

namespace {

constexpr double kPi = std::numbers::pi;

double lz_excitation(double nu, double t0, double t1, std::size_t n) {
  auto coeffs = [nu](double t) { return PauliCoefficients{-0.5 * nu * t, -0.5}; };
  const auto start = instantaneous_eigensystem(coeffs(t0));
  const double dt = (t1 - t0) / static_cast<double>(n);
  const auto out = propagate_path(QubitState::from_real(start.ground), t0, dt, n, coeffs);
  return excitation_probability(out, coeffs(t1));
}

double native_excitation(const ProtocolSpec& p, double k, std::size_t n) {
  const double dt = p.tau / static_cast<double>(n);
  const auto out = propagate(prepare_ground_state(p, k), p, k, silent_realization(dt, n), {dt, false});
  return excitation_probability(out, p, k);
}

CheckResult check_lz_oracle() {
  double worst = 0.0;
  for (double nu : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double p = lz_excitation(nu, -200.0, 200.0, 400'000);
    worst = std::max(worst, std::abs(p - std::exp(-kPi / (2.0 * nu))));
  }
  return {"lz_oracle", worst < 1e-3, fmt::format("max |p - exp(-pi/2nu)| = {:.3g} (tol 1e-3)", worst)};
}

CheckResult check_substitution() {
  double worst = 0.0;
  for (Protocol id : {Protocol::Transverse, Protocol::Multicritical, Protocol::Gapless}) {
    const auto p = make_protocol(id, 10.0);
    for (double k : {0.4, 1.2, 2.0, 2.7}) {
      const std::size_t n = 20'000;
      const auto lz = lz_substitution(p, k);
      const double d = native_excitation(p, k, n) - lz_excitation(lz.nu_lz, lz.map_time(0.0), lz.map_time(p.tau), n);
      worst = std::max(worst, std::abs(d));
    }
  }
  return {"substitution_equivalence", worst < 1e-6, fmt::format("max |dp| = {:.3g} (tol 1e-6)", worst)};
}

std::vector<CheckResult> check_noise(const ValidateOptions& opt) {
  const std::size_t n = 1'000'000;
  const double dt = 0.01;
  const double w2 = 1.0;
  auto r = sample_realization({w2, dt, n, StreamKey{}}, 2024);
  for (double& x : r.samples) x += opt.noise_bias;
  if (opt.dump_dir) {
    NoiseRealization head{std::vector<double>(r.samples.begin(), r.samples.begin() + 10'000), dt};
    write_realization_csv(*opt.dump_dir / "noise_realization.csv", head);
  }
  const auto nd = static_cast<double>(n);
  const double mean = std::accumulate(r.samples.begin(), r.samples.end(), 0.0) / nd;
  double var = 0.0;
  for (double x : r.samples) var += (x - mean) * (x - mean);
  var /= nd - 1.0;

  std::vector<CheckResult> out;
  const double mean_tol = 5.0 * std::sqrt(w2 / (dt * nd));
  out.push_back({"noise_mean", std::abs(mean) < mean_tol, fmt::format("mean = {:.3g} (tol {:.3g})", mean, mean_tol)});
  const double rel_var = var * dt / w2 - 1.0;
  const double var_tol = 5.0 * std::sqrt(2.0 / nd);
  out.push_back({"noise_variance", std::abs(rel_var) < var_tol,
                 fmt::format("var dt / W^2 - 1 = {:.3g} (tol {:.3g})", rel_var, var_tol)});

  double worst_lag = 0.0;
  const double s0 = var * (nd - 1.0);
  for (std::size_t lag = 1; lag <= 10; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (r.samples[i] - mean) * (r.samples[i + lag] - mean);
    worst_lag = std::max(worst_lag, std::abs(s / s0));
  }
  const double lag_tol = 5.0 / std::sqrt(nd);
  out.push_back({"noise_whiteness", worst_lag < lag_tol,
                 fmt::format("max |autocorr(1..10)| = {:.3g} (tol {:.3g})", worst_lag, lag_tol)});

  // Averaged periodogram over 2^14-sample segments, decade bands vs the overall level.
  const std::size_t seg = 1 << 14;
  const std::size_t n_seg = n / seg;
  std::vector<double> power(seg / 2 + 1, 0.0);
  std::vector<double> freq;
  for (std::size_t s = 0; s < n_seg; ++s) {
    NoiseRealization part{std::vector<double>(r.samples.begin() + s * seg, r.samples.begin() + (s + 1) * seg), dt};
    const auto bins = psd_estimate(part);
    if (freq.empty()) {
      for (const auto& b : bins) freq.push_back(b.frequency);
    }
    for (std::size_t j = 0; j < bins.size(); ++j) power[j] += bins[j].power / static_cast<double>(n_seg);
  }
  double level = 0.0;
  for (std::size_t j = 1; j < power.size(); ++j) level += power[j];
  level /= static_cast<double>(power.size() - 1);
  double worst_band = std::abs(level / w2 - 1.0);
  for (double lo = freq[1]; lo < freq.back(); lo *= 10.0) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 1; j < freq.size(); ++j) {
      if (freq[j] >= lo && freq[j] < 10.0 * lo) sum += power[j], ++count;
    }
    worst_band = std::max(worst_band, std::abs(sum / count / level - 1.0));
  }
  out.push_back({"psd_flatness", worst_band < 0.2,
                 fmt::format("level/W^2 = {:.4f}, worst decade deviation {:.3f} (tol 0.2)", level / w2, worst_band)});
  return out;
}

CheckResult check_step_halving(const ValidateOptions& opt) {
  double worst = 0.0;
  for (Protocol id : {Protocol::Transverse, Protocol::Multicritical, Protocol::Gapless}) {
    for (double tau : {2.0, 20.0}) {
      const auto p = make_protocol(id, tau);
      const double dt = StepPolicy{}.max_dt(plan_max_gap(p, k_grid(50))) * opt.dt_factor;
      const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(p.tau / dt)));
      for (double k : {0.3, kPi / 2, 2.8}) {
        worst = std::max(worst, std::abs(native_excitation(p, k, n) - native_excitation(p, k, 2 * n)));
      }
    }
  }
  return {"step_halving", worst < 1e-4, fmt::format("max |p(dt) - p(dt/2)| = {:.3g} (tol 1e-4)", worst)};
}

CheckResult check_norm(const ValidateOptions& opt) {
  const auto p = make_protocol(Protocol::Transverse, 100.0);
  const std::size_t n = 1'000'000;
  const double dt = p.tau / static_cast<double>(n);
  const auto noise = sample_realization({0.5, dt, n, StreamKey{}}, 7);
  const double k = kPi / 2;
  const auto out = propagate(prepare_ground_state(p, k), p, k, noise, {dt, false});
  const double drift = std::abs(out.norm() - 1.0);
  if (opt.dump_dir) {
    const auto q = make_protocol(Protocol::Transverse, 10.0);
    const std::size_t m = 10'000;
    std::vector<TrajectoryPoint> small;
    propagate(prepare_ground_state(q, k), q, k, silent_realization(q.tau / m, m), {q.tau / m, true}, small);
    write_trajectory_csv(*opt.dump_dir / "trajectory.csv", small);
  }
  return {"norm_conservation", drift < 1e-10, fmt::format("|1 - |psi|| after 1e6 steps = {:.3g} (tol 1e-10)", drift)};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(check_lz_oracle());
  out.push_back(check_substitution());
  for (auto& c : check_noise(opt)) out.push_back(std::move(c));
  out.push_back(check_step_halving(opt));
  out.push_back(check_norm(opt));
  return out;
}

int cmd_validate(const ValidateOptions& opt, std::ostream& out) {
  if (opt.dump_dir) std::filesystem::create_directories(*opt.dump_dir);
  bool all = true;
  for (const auto& c : run_validation(opt)) {
    fmt::print(out, "{} {:<26} {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    all = all && c.passed;
  }
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace antikz::cli
