#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "antikz/error.hpp"
#include "antikz/model.hpp"

namespace antikz {
namespace {

constexpr double kPi = std::numbers::pi;
const Protocol kAllProtocols[] = {Protocol::Transverse, Protocol::Multicritical, Protocol::Gapless};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected antikz::Error";
  return ErrorKind::Io;
}

// H v for H = a_z sz + a_x sx.
std::array<double, 2> apply_h(const PauliCoefficients& c, const std::array<double, 2>& v) {
  return {c.a_z * v[0] + c.a_x * v[1], c.a_x * v[0] - c.a_z * v[1]};
}

TEST(ModelTest, DefaultProtocolsCarryPublishedCouplings) {
  const auto t = make_protocol(Protocol::Transverse, 10.0);
  EXPECT_DOUBLE_EQ(t.jx, 1.0);
  EXPECT_DOUBLE_EQ(t.jy, -1.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.ramp.start, -5.0);
  EXPECT_DOUBLE_EQ(t.ramp.end, 0.0);
  EXPECT_DOUBLE_EQ(t.velocity(), 0.5);

  const auto m = make_protocol(Protocol::Multicritical, 10.0);
  EXPECT_DOUBLE_EQ(m.h, 2.0);
  EXPECT_DOUBLE_EQ(m.jy, 1.0);
  EXPECT_DOUBLE_EQ(m.ramp.end, 3.0);

  const auto g = make_protocol(Protocol::Gapless, 10.0);
  EXPECT_DOUBLE_EQ(g.h, 1.0);
  EXPECT_DOUBLE_EQ(g.j, 1.0);
  EXPECT_DOUBLE_EQ(g.ramp.start, -2.0);
  EXPECT_DOUBLE_EQ(g.ramp.end, 2.0);
}

TEST(ModelTest, ProtocolValidation) {
  EXPECT_EQ(kind_of([] { make_protocol(Protocol::Gapless, 0.0); }), ErrorKind::Domain);
  auto p = make_protocol(Protocol::Gapless, 1.0);
  p.ramp.end = p.ramp.start;
  EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::Domain);
}

TEST(ModelTest, ProtocolNamesRoundTrip) {
  for (Protocol p : kAllProtocols) EXPECT_EQ(parse_protocol(protocol_name(p)), p);
  EXPECT_FALSE(parse_protocol("ising").has_value());
}

TEST(ModelTest, TheoryExponents) {
  EXPECT_NEAR(theory_alpha(Protocol::Transverse), -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(theory_alpha(Protocol::Multicritical), -6.0 / 7.0, 1e-15);
  EXPECT_NEAR(theory_alpha(Protocol::Gapless), -3.0 / 4.0, 1e-15);
}

TEST(ModelTest, TransverseAtCriticalFieldMidBand) {
  // h(tau) = 0; J = 2/3, gamma = 2 so J gamma sin(pi/2) = 4/3.
  const auto p = make_protocol(Protocol::Transverse, 10.0);
  const auto c = hamiltonian_coefficients(p, kPi / 2, p.tau, 0.0);
  EXPECT_NEAR(c.a_z, 0.0, 1e-15);
  EXPECT_NEAR(c.a_x, -8.0 / 3.0, 1e-15);
}

TEST(ModelTest, GaplessAtZeroAnisotropy) {
  const auto p = make_protocol(Protocol::Gapless, 10.0);
  const auto c = hamiltonian_coefficients(p, kPi / 2, p.tau / 2, 0.0);
  EXPECT_NEAR(c.a_z, -2.0, 1e-15);
  EXPECT_NEAR(c.a_x, 0.0, 1e-15);
}

TEST(ModelTest, SigmaXVanishesAtSmallK) {
  for (Protocol id : kAllProtocols) {
    const auto p = make_protocol(id, 5.0);
    for (double t : {0.0, 2.5, 5.0}) {
      EXPECT_NEAR(hamiltonian_coefficients(p, 1e-12, t, 0.0).a_x, 0.0, 1e-10);
    }
  }
}

TEST(ModelTest, NoiseEntersThroughTheRampedParameter) {
  const double k = 0.7;
  const double eta = 0.3;
  {
    const auto p = make_protocol(Protocol::Transverse, 4.0);
    const auto a = hamiltonian_coefficients(p, k, 1.0, 0.0);
    const auto b = hamiltonian_coefficients(p, k, 1.0, eta);
    EXPECT_NEAR(b.a_z - a.a_z, -2.0 * eta, 1e-14);
    EXPECT_NEAR(b.a_x - a.a_x, 0.0, 1e-14);
  }
  {
    const auto p = make_protocol(Protocol::Multicritical, 4.0);
    const auto a = hamiltonian_coefficients(p, k, 1.0, 0.0);
    const auto b = hamiltonian_coefficients(p, k, 1.0, eta);
    EXPECT_NEAR(b.a_z - a.a_z, -2.0 * eta * std::cos(k), 1e-14);
    EXPECT_NEAR(b.a_x - a.a_x, -2.0 * eta * std::sin(k), 1e-14);
  }
  {
    const auto p = make_protocol(Protocol::Gapless, 4.0);
    const auto a = hamiltonian_coefficients(p, k, 1.0, 0.0);
    const auto b = hamiltonian_coefficients(p, k, 1.0, eta);
    EXPECT_NEAR(b.a_z - a.a_z, 0.0, 1e-14);
    EXPECT_NEAR(b.a_x - a.a_x, -2.0 * eta * std::sin(k), 1e-14);
  }
}

TEST(ModelTest, CoefficientsRejectOutOfRangeInputs) {
  const auto p = make_protocol(Protocol::Transverse, 2.0);
  EXPECT_EQ(kind_of([&] { hamiltonian_coefficients(p, 0.0, 1.0, 0.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { hamiltonian_coefficients(p, kPi, 1.0, 0.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { hamiltonian_coefficients(p, 1.0, -0.1, 0.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { hamiltonian_coefficients(p, 1.0, 2.1, 0.0); }), ErrorKind::Domain);
}

TEST(ModelTest, CoefficientsAreAffineInNoise) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> k_dist(0.01, kPi - 0.01);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (Protocol id : kAllProtocols) {
    const auto p = make_protocol(id, 3.0);
    for (int i = 0; i < 200; ++i) {
      const double k = k_dist(rng);
      const double t = std::abs(u(rng));
      const double eta1 = u(rng);
      const double eta2a = u(rng);
      const double eta2b = u(rng);
      auto diff = [&](double eta2) {
        const auto hi = hamiltonian_coefficients(p, k, t, eta1 + eta2);
        const auto lo = hamiltonian_coefficients(p, k, t, eta2);
        return PauliCoefficients{hi.a_z - lo.a_z, hi.a_x - lo.a_x};
      };
      const auto d1 = diff(eta2a);
      const auto d2 = diff(eta2b);
      EXPECT_NEAR(d1.a_z, d2.a_z, 1e-12);
      EXPECT_NEAR(d1.a_x, d2.a_x, 1e-12);
    }
  }
}

TEST(ModelTest, LinearizationMatchesDirectEvaluation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> k_dist(0.01, kPi - 0.01);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  std::normal_distribution<double> eta_dist(0.0, 2.0);
  for (Protocol id : kAllProtocols) {
    const auto p = make_protocol(id, 7.0);
    for (int i = 0; i < 500; ++i) {
      const double k = k_dist(rng);
      const double t = frac(rng) * p.tau;
      const double eta = eta_dist(rng);
      const auto direct = hamiltonian_coefficients(p, k, t, eta);
      const auto lin = linearize_mode(p, k).at(t, eta);
      EXPECT_NEAR(direct.a_z, lin.a_z, 1e-12);
      EXPECT_NEAR(direct.a_x, lin.a_x, 1e-12);
    }
  }
}

TEST(ModelTest, InitialGapIsOpenOnTheInterior) {
  for (Protocol id : kAllProtocols) {
    const auto p = make_protocol(id, 1.0);
    for (int j = 1; j < 200; ++j) {
      const double k = kPi * j / 200.0;
      const auto es = instantaneous_eigensystem(hamiltonian_coefficients(p, k, 0.0, 0.0));
      EXPECT_GT(es.gap, 0.0);
      EXPECT_FALSE(es.degenerate);
    }
  }
}

TEST(ModelTest, LzSubstitutionGaplessMidBand) {
  // With gamma(t) = nu t (ramp starting at 0) the map is exactly t_LZ = -4 t.
  auto p = make_protocol(Protocol::Gapless, 8.0);
  p.ramp = {0.0, 4.0};
  const auto lz = lz_substitution(p, kPi / 2);
  EXPECT_NEAR(lz.nu_lz, p.velocity() / 4.0, 1e-15);
  EXPECT_NEAR(lz.slope, -4.0, 1e-15);
  EXPECT_NEAR(lz.offset, 0.0, 1e-15);

  // Default ramp -2 -> 2 crosses gamma = 0 at tau / 2.
  const auto q = make_protocol(Protocol::Gapless, 8.0);
  const auto lz2 = lz_substitution(q, kPi / 2);
  EXPECT_NEAR(lz2.nu_lz, q.velocity() / 4.0, 1e-15);
  EXPECT_NEAR(lz2.map_time(q.tau / 2), 0.0, 1e-12);
}

TEST(ModelTest, LzSubstitutionTransverseMidBand) {
  const auto p = make_protocol(Protocol::Transverse, 10.0);
  const auto lz = lz_substitution(p, kPi / 2);
  EXPECT_NEAR(lz.nu_lz, 9.0 * p.velocity() / 64.0, 1e-15);
  EXPECT_NEAR(lz.slope, 4.0 * 4.0 / 3.0, 1e-14);
}

TEST(ModelTest, LzSubstitutionMulticriticalMatchesPrintedForm) {
  const auto p = make_protocol(Protocol::Multicritical, 6.0);
  const double k = 2.2;
  const double d = p.jy * std::sin(2 * k) + p.h * std::sin(k);
  const double nu = p.velocity();
  const auto lz = lz_substitution(p, k);
  EXPECT_NEAR(lz.nu_lz, nu / (4 * d * d), 1e-12);
  // t_LZ = 4 d [t + (Jy cos 2k + h cos k) / nu]
  for (double t : {0.0, 1.5, 6.0}) {
    EXPECT_NEAR(lz.map_time(t), 4 * d * (t + (p.jy * std::cos(2 * k) + p.h * std::cos(k)) / nu), 1e-12);
  }
}

TEST(ModelTest, LzSubstitutionSingularModes) {
  const auto t = make_protocol(Protocol::Transverse, 10.0);
  EXPECT_EQ(kind_of([&] { lz_substitution(t, 1e-20); }), ErrorKind::SingularMode);
  const auto g = make_protocol(Protocol::Gapless, 10.0);
  // J cos k + h vanishes at k = pi; closest representable interior point.
  EXPECT_EQ(kind_of([&] { lz_substitution(g, std::nextafter(kPi, 0.0)); }), ErrorKind::SingularMode);
}

TEST(ModelTest, EigensystemDiagonal) {
  const auto es = instantaneous_eigensystem({-1.0, 0.0});
  // H = -sz: ground is |0> = (1, 0) in the sz = +1 convention.
  EXPECT_DOUBLE_EQ(es.ground[0], 1.0);
  EXPECT_DOUBLE_EQ(es.ground[1], 0.0);
  EXPECT_DOUBLE_EQ(es.excited[0], 0.0);
  EXPECT_DOUBLE_EQ(es.excited[1], 1.0);
  EXPECT_DOUBLE_EQ(es.gap, 2.0);
}

TEST(ModelTest, EigensystemPureSigmaX) {
  const auto es = instantaneous_eigensystem({0.0, -1.0});
  EXPECT_NEAR(es.ground[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(es.ground[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(es.gap, 2.0);
}

TEST(ModelTest, EigensystemGap) { EXPECT_DOUBLE_EQ(instantaneous_eigensystem({3.0, 4.0}).gap, 10.0); }

TEST(ModelTest, EigensystemFlagsDegenerateGap) {
  EXPECT_TRUE(instantaneous_eigensystem({0.0, 0.0}).degenerate);
  EXPECT_TRUE(instantaneous_eigensystem({1e-14, 0.0}).degenerate);
  EXPECT_FALSE(instantaneous_eigensystem({1e-11, 0.0}).degenerate);
  EXPECT_TRUE(instantaneous_eigensystem({1e-3, 0.0}, 1e-2).degenerate);
}

TEST(ModelTest, EigenvectorsOrthonormalProperty) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  std::uniform_real_distribution<double> scale(-8.0, 8.0);
  for (int i = 0; i < 1'000'000; ++i) {
    const double s = std::pow(10.0, scale(rng));
    const PauliCoefficients c{mag(rng) * s, mag(rng) * s};
    const auto es = instantaneous_eigensystem(c);
    if (es.degenerate) continue;
    const double dot = es.ground[0] * es.excited[0] + es.ground[1] * es.excited[1];
    const double ng = std::hypot(es.ground[0], es.ground[1]);
    const double ne = std::hypot(es.excited[0], es.excited[1]);
    if (std::abs(dot) > 1e-14 || std::abs(ng - 1) > 1e-14 || std::abs(ne - 1) > 1e-14) {
      FAIL() << "not orthonormal for a_z=" << c.a_z << " a_x=" << c.a_x;
    }
    // Phase convention: first nonzero component positive.
    const double lead_g = es.ground[0] != 0.0 ? es.ground[0] : es.ground[1];
    const double lead_e = es.excited[0] != 0.0 ? es.excited[0] : es.excited[1];
    if (!(lead_g > 0.0 && lead_e > 0.0)) FAIL() << "phase convention violated";
  }
}

TEST(ModelTest, EigenvectorsSatisfyEigenEquation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const PauliCoefficients c{u(rng), u(rng)};
    const auto es = instantaneous_eigensystem(c);
    const double e = es.gap / 2;
    const auto hg = apply_h(c, es.ground);
    const auto hx = apply_h(c, es.excited);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(hg[j], -e * es.ground[j], 1e-12 * (1 + e));
      EXPECT_NEAR(hx[j], e * es.excited[j], 1e-12 * (1 + e));
    }
  }
}

TEST(ModelTest, MaxGapMatchesScan) {
  for (Protocol id : kAllProtocols) {
    const auto p = make_protocol(id, 3.0);
    for (double k : {0.1, 1.0, 2.0, 3.0}) {
      double scan = 0.0;
      for (int i = 0; i <= 3000; ++i) {
        const auto es = instantaneous_eigensystem(hamiltonian_coefficients(p, k, p.tau * i / 3000.0, 0.0));
        scan = std::max(scan, es.gap);
      }
      EXPECT_NEAR(max_gap(p, k), scan, 1e-12 * scan);
    }
  }
}

}  // namespace
}  // namespace antikz
