#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "antikz/model.hpp"
#include "antikz/noise.hpp"

namespace antikz {

using Complex = std::complex<double>;

/// Two amplitudes in the sigma_z basis.
struct QubitState {
  std::array<Complex, 2> amp{Complex{1.0, 0.0}, Complex{0.0, 0.0}};

  double norm() const noexcept { return std::sqrt(std::norm(amp[0]) + std::norm(amp[1])); }
  static QubitState from_real(const std::array<double, 2>& v) noexcept {
    return {{Complex{v[0], 0.0}, Complex{v[1], 0.0}}};
  }
};

struct EvolutionConfig {
  double dt = 1e-3;
  bool store_trajectory = false;
};

/// Step-size rule: dt * max_gap <= stability and 1 / dt >= bandwidth * max_gap.
/// With the defaults the bandwidth condition binds (dt <= 0.01 / max_gap).
struct StepPolicy {
  double stability = 0.05;
  double bandwidth = 100.0;
  double fixed_dt = 0.0;  // > 0 overrides the rule (still checked)

  double max_dt(double max_gap) const noexcept;
  /// Largest dt that honours the rule and divides tau into whole steps.
  std::size_t steps_for(double tau, double max_gap) const;
  /// Throws Error(Domain) if dt breaks either bound.
  void check(double dt, double max_gap) const;
};

/// One exact step exp(-i dt (a_z sz + a_x sx)) applied in place:
/// cos(E dt) I - i sin(E dt) / E (a_z sz + a_x sx), E = sqrt(a_z^2 + a_x^2).
inline void apply_step(QubitState& s, const PauliCoefficients& c, double dt) noexcept {
  const double e = std::sqrt(c.a_z * c.a_z + c.a_x * c.a_x);
  const double phi = e * dt;
  const double cs = std::cos(phi);
  // sin(E dt) / E, continuous at E = 0
  const double sn = phi > 1e-8 ? std::sin(phi) / e : dt * (1.0 - phi * phi / 6.0);
  const Complex d0{cs, -sn * c.a_z};
  const Complex d1{cs, sn * c.a_z};
  const Complex off{0.0, -sn * c.a_x};
  const Complex a0 = s.amp[0];
  const Complex a1 = s.amp[1];
  s.amp[0] = d0 * a0 + off * a1;
  s.amp[1] = off * a0 + d1 * a1;
}

/// Propagates under coefficients(t) with the midpoint rule from t0 in n steps
/// of size dt. dt may be negative (backward sweep).
template <typename CoefficientFn>
QubitState propagate_path(QubitState s, double t0, double dt, std::size_t n, CoefficientFn&& coefficients) {
  for (std::size_t j = 0; j < n; ++j) {
    const double t_mid = t0 + (static_cast<double>(j) + 0.5) * dt;
    apply_step(s, coefficients(t_mid), dt);
  }
  return s;
}

/// Ground state of the noise-free H_k(0). Throws Error(DegenerateGap).
QubitState prepare_ground_state(const ProtocolSpec& protocol, double k);

/// Evolves over [0, tau] with one exact exponential per step, the ramp taken at
/// the step midpoint and eta held at the step's sample.
/// Throws Error(GridMismatch) unless n_steps * dt == tau and noise.dt == cfg.dt,
/// Error(NonFinite) if the amplitudes blow up.
QubitState propagate(const QubitState& state, const ProtocolSpec& protocol, double k,
                     const NoiseRealization& noise, const EvolutionConfig& cfg);

struct TrajectoryPoint {
  double t = 0.0;
  QubitState state;
  double excitation = 0.0;  // population of the instantaneous noise-free excited state
};

/// As propagate, additionally recording every step when cfg.store_trajectory.
QubitState propagate(const QubitState& state, const ProtocolSpec& protocol, double k,
                     const NoiseRealization& noise, const EvolutionConfig& cfg,
                     std::vector<TrajectoryPoint>& trajectory);

/// |<E|psi>|^2 for the excited eigenvector of `c`. Throws Error(DegenerateGap).
double excitation_probability(const QubitState& state, const PauliCoefficients& c);

/// p_k against the noise-free excited state of H_k(tau).
double excitation_probability(const QubitState& state, const ProtocolSpec& protocol, double k);

/// Columns t,re0,im0,re1,im1,p.
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryPoint>& trajectory);

}  // namespace antikz
