#pragma once

// k-mode Hamiltonians of the transverse-field XY chain under the three
// quench protocols. Every mode is a two-level problem
//
//   H_k(t) = a_z(t) sigma_z + a_x(t) sigma_x,
//   a_z = -2 (J cos k + h),   a_x = -2 J gamma sin k,
//
// with J = Jx + Jy and gamma = (Jx - Jy) / J. One parameter is ramped
// linearly over [0, tau]; the control noise eta(t) is added to it.
//
// Basis convention: |0> = (1, 0) is the sigma_z = +1 eigenvector.

#include <array>
#include <optional>
#include <string_view>

namespace antikz {

enum class Protocol { Transverse, Multicritical, Gapless };

std::string_view protocol_name(Protocol p) noexcept;
std::optional<Protocol> parse_protocol(std::string_view name) noexcept;

struct Ramp {
  double start = 0.0;
  double end = 0.0;
};

/// One quench protocol with its fixed couplings and ramp.
///
/// Which fields are fixed and which one is ramped depends on `id`:
///   Transverse:    jx, jy fixed;  h(t) ramped.
///   Multicritical: h, jy fixed;   jx(t) ramped.
///   Gapless:       h, j fixed;    gamma(t) ramped.
/// Fields that do not apply to a protocol are ignored.
struct ProtocolSpec {
  Protocol id = Protocol::Transverse;
  double jx = 0.0;
  double jy = 0.0;
  double h = 0.0;
  double j = 0.0;
  Ramp ramp;
  double tau = 1.0;

  /// Ramp velocity (end - start) / tau.
  double velocity() const noexcept { return (ramp.end - ramp.start) / tau; }
  double ramped_value(double t) const noexcept { return ramp.start + velocity() * t; }

  /// Throws Error(Domain) unless tau > 0, start != end and all values finite.
  void validate() const;
};

/// Default couplings and ramp for a protocol:
///   Transverse    Jx = 1, Jy = -1/3, h: -5 -> 0
///   Multicritical h = 2,  Jy = 1,    Jx: 0 -> 3
///   Gapless       h = 1,  J = 1,     gamma: -2 -> 2
ProtocolSpec make_protocol(Protocol id, double tau);

/// Exponent beta of n_0 ~ tau^-beta predicted for the protocol
/// (1/2, 1/6, 1/3), and alpha = -1 / (1 + beta).
double theory_beta(Protocol id) noexcept;
double theory_alpha(Protocol id) noexcept;

struct PauliCoefficients {
  double a_z = 0.0;
  double a_x = 0.0;
};

/// Coefficients of H_k(t, eta). Throws Error(Domain) if k is not in (0, pi)
/// or t is not in [0, tau].
PauliCoefficients hamiltonian_coefficients(const ProtocolSpec& protocol, double k,
                                           double t, double eta);

/// H_k(t, eta) written as base + t * per_time + eta * per_eta.
/// All three protocols are affine in t and eta; the propagator uses this
/// form so the per-step cost is a few multiply-adds.
struct ModeLinearization {
  PauliCoefficients base;
  PauliCoefficients per_time;
  PauliCoefficients per_eta;

  PauliCoefficients at(double t, double eta) const noexcept {
    return {base.a_z + t * per_time.a_z + eta * per_eta.a_z,
            base.a_x + t * per_time.a_x + eta * per_eta.a_x};
  }
};

ModeLinearization linearize_mode(const ProtocolSpec& protocol, double k);

/// Map onto the standard Landau-Zener form H_LZ = -(1/2)(sigma_x + nu_lz t_LZ sigma_z)
/// with t_LZ = slope * t + offset.
struct LZParams {
  double nu_lz = 0.0;
  double slope = 0.0;
  double offset = 0.0;

  double map_time(double t) const noexcept { return slope * t + offset; }
};

/// Throws Error(SingularMode) when the mode has no avoided crossing in this
/// parametrization (vanishing denominator), Error(Domain) if k is outside (0, pi).
LZParams lz_substitution(const ProtocolSpec& protocol, double k);

struct Eigensystem {
  std::array<double, 2> ground{1.0, 0.0};
  std::array<double, 2> excited{0.0, 1.0};
  double gap = 0.0;
  bool degenerate = false;
};

/// Default degenerate-gap tolerance: 1e-12 * max(|a_z|, |a_x|, 1).
double default_gap_tolerance(const PauliCoefficients& c) noexcept;

/// Real orthonormal eigenvectors with eigenvalues -E (ground) and +E
/// (excited), E = sqrt(a_z^2 + a_x^2), gap = 2E. The first nonzero component
/// of each vector is positive. When gap < tolerance the basis is ill-defined;
/// `degenerate` is set and the sigma_z basis is returned.
Eigensystem instantaneous_eigensystem(const PauliCoefficients& c);
Eigensystem instantaneous_eigensystem(const PauliCoefficients& c, double tolerance);

/// Largest noise-free gap over t in [0, tau] for mode k. The gap of an affine
/// path is convex in t, so the maximum is at an endpoint.
double max_gap(const ProtocolSpec& protocol, double k);

}  // namespace antikz
