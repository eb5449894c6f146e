#include "antikz/evolve.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "antikz/error.hpp"
#include "format.hpp"

namespace antikz {

double StepPolicy::max_dt(double max_gap) const noexcept {
  if (!(max_gap > 0.0)) return fixed_dt > 0.0 ? fixed_dt : 1.0;
  return std::min(stability / max_gap, 1.0 / (bandwidth * max_gap));
}

std::size_t StepPolicy::steps_for(double tau, double max_gap) const {
  if (!(tau > 0.0)) throw Error(ErrorKind::Domain, "tau must be positive");
  const double target = fixed_dt > 0.0 ? fixed_dt : max_dt(max_gap);
  const auto n = static_cast<std::size_t>(std::ceil(tau / target - 1e-9));
  return std::max<std::size_t>(n, 1);
}

void StepPolicy::check(double dt, double max_gap) const {
  if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "dt must be positive");
  if (dt * max_gap > stability * (1.0 + 1e-9)) {
    throw Error(ErrorKind::Domain, "dt * max_gap = " + std::to_string(dt * max_gap) +
                                       " exceeds the stability bound " + std::to_string(stability));
  }
  if (1.0 / dt < bandwidth * max_gap * (1.0 - 1e-9)) {
    throw Error(ErrorKind::Domain, "1/dt = " + std::to_string(1.0 / dt) +
                                       " is below the white-noise bandwidth bound");
  }
}

QubitState prepare_ground_state(const ProtocolSpec& protocol, double k) {
  const auto es = instantaneous_eigensystem(hamiltonian_coefficients(protocol, k, 0.0, 0.0));
  if (es.degenerate) {
    throw Error(ErrorKind::DegenerateGap, "initial Hamiltonian is degenerate at k = " + std::to_string(k));
  }
  return QubitState::from_real(es.ground);
}

namespace {

void check_grid(const ProtocolSpec& protocol, const NoiseRealization& noise,
                const EvolutionConfig& cfg) {
  if (noise.n_steps() == 0) throw Error(ErrorKind::GridMismatch, "empty noise grid");
  if (std::abs(noise.dt - cfg.dt) > 1e-12 * cfg.dt) {
    throw Error(ErrorKind::GridMismatch, "noise dt differs from the evolution dt");
  }
  if (std::abs(noise.duration() - protocol.tau) > 1e-9 * protocol.tau) {
    throw Error(ErrorKind::GridMismatch, "noise grid covers " + std::to_string(noise.duration()) +
                                             " but tau = " + std::to_string(protocol.tau));
  }
}

void check_finite(const QubitState& s) {
  for (const Complex& a : s.amp) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(ErrorKind::NonFinite, "non-finite amplitude after propagation");
    }
  }
}

}  // namespace

QubitState propagate(const QubitState& state, const ProtocolSpec& protocol, double k,
                     const NoiseRealization& noise, const EvolutionConfig& cfg) {
  check_grid(protocol, noise, cfg);
  const ModeLinearization mode = linearize_mode(protocol, k);
  const double dt = noise.dt;
  const std::size_t n = noise.n_steps();
  QubitState s = state;
  for (std::size_t j = 0; j < n; ++j) {
    const double t_mid = (static_cast<double>(j) + 0.5) * dt;
    apply_step(s, mode.at(t_mid, noise.samples[j]), dt);
  }
  check_finite(s);
  return s;
}

QubitState propagate(const QubitState& state, const ProtocolSpec& protocol, double k,
                     const NoiseRealization& noise, const EvolutionConfig& cfg,
                     std::vector<TrajectoryPoint>& trajectory) {
  if (!cfg.store_trajectory) return propagate(state, protocol, k, noise, cfg);
  check_grid(protocol, noise, cfg);
  const ModeLinearization mode = linearize_mode(protocol, k);
  const double dt = noise.dt;
  const std::size_t n = noise.n_steps();
  trajectory.clear();
  trajectory.reserve(n + 1);
  QubitState s = state;
  trajectory.push_back({0.0, s, excitation_probability(s, mode.at(0.0, 0.0))});
  for (std::size_t j = 0; j < n; ++j) {
    const double t_mid = (static_cast<double>(j) + 0.5) * dt;
    apply_step(s, mode.at(t_mid, noise.samples[j]), dt);
    const double t = static_cast<double>(j + 1) * dt;
    const auto es = instantaneous_eigensystem(mode.at(t, 0.0));
    const double p = es.degenerate ? 0.5 : excitation_probability(s, mode.at(t, 0.0));
    trajectory.push_back({t, s, p});
  }
  check_finite(s);
  return s;
}

double excitation_probability(const QubitState& state, const PauliCoefficients& c) {
  const auto es = instantaneous_eigensystem(c);
  if (es.degenerate) throw Error(ErrorKind::DegenerateGap, "measurement basis is degenerate");
  const Complex overlap = es.excited[0] * state.amp[0] + es.excited[1] * state.amp[1];
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

double excitation_probability(const QubitState& state, const ProtocolSpec& protocol, double k) {
  return excitation_probability(state, hamiltonian_coefficients(protocol, k, protocol.tau, 0.0));
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryPoint>& trajectory) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "t,re0,im0,re1,im1,p\n";
  for (const auto& pt : trajectory) {
    out << fmt_real(pt.t) << ',' << fmt_real(pt.state.amp[0].real()) << ','
        << fmt_real(pt.state.amp[0].imag()) << ',' << fmt_real(pt.state.amp[1].real()) << ','
        << fmt_real(pt.state.amp[1].imag()) << ',' << fmt_real(pt.excitation) << '\n';
  }
}

}  // namespace antikz
