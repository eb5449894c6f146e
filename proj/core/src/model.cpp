#include "antikz/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "antikz/error.hpp"

namespace antikz {

namespace {

void check_mode(double k) {
  if (!(k > 0.0 && k < std::numbers::pi)) {
    throw Error(ErrorKind::Domain, "mode k = " + std::to_string(k) + " is outside (0, pi)");
  }
}

void check_time(const ProtocolSpec& p, double t) {
  const double slack = 1e-12 * p.tau;
  if (!(t >= -slack && t <= p.tau + slack)) {
    throw Error(ErrorKind::Domain, "time t = " + std::to_string(t) + " is outside [0, tau]");
  }
}

}  // namespace

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::SingularMode: return "singular-mode";
    case ErrorKind::DegenerateGap: return "degenerate-gap";
    case ErrorKind::Length: return "length";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::MissingMode: return "missing-mode";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::NonPositive: return "non-positive";
    case ErrorKind::NoMinimum: return "no-minimum";
    case ErrorKind::MissingBaseline: return "missing-baseline";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string_view protocol_name(Protocol p) noexcept {
  switch (p) {
    case Protocol::Transverse: return "transverse";
    case Protocol::Multicritical: return "multicritical";
    case Protocol::Gapless: return "gapless";
  }
  return "unknown";
}

std::optional<Protocol> parse_protocol(std::string_view name) noexcept {
  for (Protocol p : {Protocol::Transverse, Protocol::Multicritical, Protocol::Gapless}) {
    if (name == protocol_name(p)) return p;
  }
  return std::nullopt;
}

void ProtocolSpec::validate() const {
  for (double v : {jx, jy, h, j, ramp.start, ramp.end, tau}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "protocol parameters must be finite");
  }
  if (!(tau > 0.0)) throw Error(ErrorKind::Domain, "quench time tau must be positive");
  if (ramp.start == ramp.end) throw Error(ErrorKind::Domain, "ramp start and end must differ");
}

ProtocolSpec make_protocol(Protocol id, double tau) {
  ProtocolSpec p;
  p.id = id;
  p.tau = tau;
  switch (id) {
    case Protocol::Transverse:
      p.jx = 1.0;
      p.jy = -1.0 / 3.0;
      p.ramp = {-5.0, 0.0};
      break;
    case Protocol::Multicritical:
      p.h = 2.0;
      p.jy = 1.0;
      p.ramp = {0.0, 3.0};
      break;
    case Protocol::Gapless:
      p.h = 1.0;
      p.j = 1.0;
      p.ramp = {-2.0, 2.0};
      break;
  }
  p.validate();
  return p;
}

double theory_beta(Protocol id) noexcept {
  switch (id) {
    case Protocol::Transverse: return 1.0 / 2.0;
    case Protocol::Multicritical: return 1.0 / 6.0;
    case Protocol::Gapless: return 1.0 / 3.0;
  }
  return 0.0;
}

double theory_alpha(Protocol id) noexcept { return -1.0 / (1.0 + theory_beta(id)); }

PauliCoefficients hamiltonian_coefficients(const ProtocolSpec& p, double k, double t,
                                           double eta) {
  check_mode(k);
  check_time(p, t);
  const double ck = std::cos(k);
  const double sk = std::sin(k);
  const double f = p.ramped_value(t);
  switch (p.id) {
    case Protocol::Transverse: {
      const double j = p.jx + p.jy;
      const double j_gamma = p.jx - p.jy;
      return {-2.0 * (j * ck + f) - 2.0 * eta, -2.0 * j_gamma * sk};
    }
    case Protocol::Multicritical:
      return {-2.0 * ((f + p.jy) * ck + p.h) - 2.0 * eta * ck,
              -2.0 * (f - p.jy) * sk - 2.0 * eta * sk};
    case Protocol::Gapless:
      return {-2.0 * (p.j * ck + p.h), -2.0 * p.j * f * sk - 2.0 * eta * p.j * sk};
  }
  return {};
}

ModeLinearization linearize_mode(const ProtocolSpec& p, double k) {
  check_mode(k);
  const double ck = std::cos(k);
  const double sk = std::sin(k);
  const double f0 = p.ramp.start;
  const double v = p.velocity();
  ModeLinearization m;
  switch (p.id) {
    case Protocol::Transverse:
      m.base = {-2.0 * ((p.jx + p.jy) * ck + f0), -2.0 * (p.jx - p.jy) * sk};
      m.per_time = {-2.0 * v, 0.0};
      m.per_eta = {-2.0, 0.0};
      break;
    case Protocol::Multicritical:
      m.base = {-2.0 * ((f0 + p.jy) * ck + p.h), -2.0 * (f0 - p.jy) * sk};
      m.per_time = {-2.0 * v * ck, -2.0 * v * sk};
      m.per_eta = {-2.0 * ck, -2.0 * sk};
      break;
    case Protocol::Gapless:
      m.base = {-2.0 * (p.j * ck + p.h), -2.0 * p.j * f0 * sk};
      m.per_time = {0.0, -2.0 * p.j * v * sk};
      m.per_eta = {0.0, -2.0 * p.j * sk};
      break;
  }
  return m;
}

LZParams lz_substitution(const ProtocolSpec& p, double k) {
  check_mode(k);
  const double ck = std::cos(k);
  const double sk = std::sin(k);
  const double v = p.velocity();
  const double f0 = p.ramp.start;
  // Each protocol reduces to a constant coupling `gap_half` and a swept
  // splitting that vanishes at t = t_cross. The ramp offset f0 is folded into
  // t_cross; for f0 = 0 the maps reduce to the textbook substitutions.
  double gap_half = 0.0;
  double nu_lz = 0.0;
  double t_cross = 0.0;
  switch (p.id) {
    case Protocol::Transverse: {
      const double j = p.jx + p.jy;
      gap_half = (p.jx - p.jy) * sk;  // J gamma sin k
      if (gap_half == 0.0) break;
      nu_lz = v / ((2.0 * gap_half) * (2.0 * gap_half));
      t_cross = -(j * ck + f0) / v;
      break;
    }
    case Protocol::Multicritical: {
      gap_half = p.jy * std::sin(2.0 * k) + p.h * sk;
      if (gap_half == 0.0) break;
      nu_lz = v / ((2.0 * gap_half) * (2.0 * gap_half));
      t_cross = -(p.jy * std::cos(2.0 * k) + p.h * ck + f0) / v;
      break;
    }
    case Protocol::Gapless: {
      // Swept term is in sigma_x; slope carries the constant sigma_z part.
      const double d = p.j * ck + p.h;
      if (d == 0.0) break;
      nu_lz = v * p.j * sk / ((2.0 * d) * (2.0 * d));
      gap_half = -d;
      t_cross = -f0 / v;
      break;
    }
  }
  const double scale = std::max({std::abs(p.jx), std::abs(p.jy), std::abs(p.h), std::abs(p.j), 1.0});
  if (std::abs(gap_half) <= 1e-14 * scale || !std::isfinite(nu_lz)) {
    throw Error(ErrorKind::SingularMode,
                "mode k = " + std::to_string(k) + " has no avoided crossing in the LZ map");
  }
  if (!(nu_lz > 0.0)) {
    throw Error(ErrorKind::Domain, "LZ sweep rate is not positive for this ramp direction");
  }
  const double slope = 4.0 * gap_half;
  return {nu_lz, slope, -slope * t_cross};
}

double default_gap_tolerance(const PauliCoefficients& c) noexcept {
  return 1e-12 * std::max({std::abs(c.a_z), std::abs(c.a_x), 1.0});
}

Eigensystem instantaneous_eigensystem(const PauliCoefficients& c) {
  return instantaneous_eigensystem(c, default_gap_tolerance(c));
}

Eigensystem instantaneous_eigensystem(const PauliCoefficients& c, double tolerance) {
  const double e = std::hypot(c.a_z, c.a_x);
  Eigensystem out;
  out.gap = 2.0 * e;
  if (out.gap < tolerance) {
    out.degenerate = true;
    return out;
  }
  // Use whichever row of (H -/+ E) is better conditioned.
  std::array<double, 2> g;
  std::array<double, 2> x;
  if (c.a_z >= 0.0) {
    g = {c.a_x, -(c.a_z + e)};
    x = {c.a_z + e, c.a_x};
  } else {
    g = {e - c.a_z, -c.a_x};
    x = {c.a_x, e - c.a_z};
  }
  auto normalize = [](std::array<double, 2>& v) {
    const double n = std::hypot(v[0], v[1]);
    v[0] /= n;
    v[1] /= n;
    const double lead = v[0] != 0.0 ? v[0] : v[1];
    if (lead < 0.0) {
      v[0] = -v[0];
      v[1] = -v[1];
    }
  };
  normalize(g);
  normalize(x);
  out.ground = g;
  out.excited = x;
  return out;
}

double max_gap(const ProtocolSpec& p, double k) {
  const ModeLinearization m = linearize_mode(p, k);
  const PauliCoefficients start = m.at(0.0, 0.0);
  const PauliCoefficients end = m.at(p.tau, 0.0);
  return 2.0 * std::max(std::hypot(start.a_z, start.a_x), std::hypot(end.a_z, end.a_x));
}

}  // namespace antikz
