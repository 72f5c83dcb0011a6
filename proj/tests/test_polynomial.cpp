#include <gtest/gtest.h>

#include <random>

#include "stokes/roots.hpp"

using namespace stokes;

namespace {

ComplexPolynomial poly(std::initializer_list<cplx> c) { return ComplexPolynomial(std::vector<cplx>(c)); }

bool contains_root(const TurningPointSet& tps, cplx z, int m, double tol) {
  for (const auto& t : tps.points)
    if (std::abs(t.location - z) <= tol && t.multiplicity == m) return true;
  return false;
}

}  // namespace

TEST(Polynomial, Evaluate) {
  const auto p = poly({1, 0, -1});
  EXPECT_EQ(p(0.0), cplx(-1.0));
  EXPECT_EQ(p(2.0), cplx(3.0));
  const auto q = poly({1, 0, -1, 0});
  EXPECT_NEAR(std::abs(q(I) - cplx(0, -2)), 0.0, 1e-15);
}

TEST(Polynomial, DerivativesMatchDerivedPolynomials) {
  const auto p = poly({cplx(1, 2), -3, cplx(0, 1), 5});
  const cplx z(0.3, -0.7);
  const auto d = p.evaluate_derivatives(z);
  EXPECT_NEAR(std::abs(d.value - p(z)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.first - p.derivative()(z)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.second - p.derivative(2)(z)), 0.0, 1e-14);
}

TEST(Polynomial, RejectsZeroLeadingCoefficient) {
  EXPECT_THROW(poly({0, 1}), Error);
}

TEST(Polynomial, Rotate) {
  const auto p = poly({1, 0, -1});
  const auto r0 = rotate(p, 0.0).coefficients();
  EXPECT_EQ(r0, p.coefficients());
  const auto r1 = rotate(p, pi / 2).coefficients();
  EXPECT_NEAR(std::abs(r1[0] - cplx(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r1[2] - cplx(1.0)), 0.0, 1e-15);
  const auto c = poly({1, 0, 0, -1});
  EXPECT_EQ(rotate(c, pi).coefficients(), c.coefficients());
  EXPECT_NEAR(rotate(p, 0.4).phi0(), 0.8, 1e-15);
  EXPECT_NEAR(rotate(p, 2.0).phi0(), wrap_angle(4.0), 1e-15);
}

TEST(Roots, SimpleCases) {
  const auto r = roots(poly({1, 0, -1}));
  ASSERT_EQ(r.size(), 2);
  EXPECT_TRUE(contains_root(r, 1.0, 1, 1e-12));
  EXPECT_TRUE(contains_root(r, -1.0, 1, 1e-12));

  const auto c = roots(poly({1, 0, 0, -1}));
  ASSERT_EQ(c.size(), 3);
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(contains_root(c, std::polar(1.0, 2 * pi * k / 3), 1, 1e-12));
}

TEST(Roots, DoubleRootRecoveredWithMultiplicity) {
  // (z-3)(z-1-i)^2 expanded by hand: z^3 - (5+2i) z^2 + (6+8i) z - 6i
  const auto p = poly({1, cplx(-5, -2), cplx(6, 8), cplx(0, -6)});
  const auto r = roots(p);
  ASSERT_EQ(r.size(), 2);
  EXPECT_TRUE(contains_root(r, 3.0, 1, 1e-8));
  EXPECT_TRUE(contains_root(r, cplx(1, 1), 2, 1e-8));
  EXPECT_EQ(r.total_multiplicity(), 3);
}

TEST(Roots, HigherMultiplicities) {
  const auto p = from_roots({2.0, 2.0, 2.0, cplx(0, 1), cplx(0, 1), -1.0});
  const auto r = roots(p);
  ASSERT_EQ(r.size(), 3);
  EXPECT_TRUE(contains_root(r, 2.0, 3, 1e-8));
  EXPECT_TRUE(contains_root(r, cplx(0, 1), 2, 1e-8));
  EXPECT_TRUE(contains_root(r, -1.0, 1, 1e-8));
}

TEST(Roots, RotationLeavesRootsExactlyUnchanged) {
  const auto p = poly({1, cplx(0.2, -1), 3, cplx(-1, 0.5)});
  const auto r = roots(p);
  for (double t : {0.1, 0.7, 2.9}) {
    const auto rr = roots(rotate(p, t));
    ASSERT_EQ(rr.size(), r.size());
    for (int k = 0; k < r.size(); ++k) {
      EXPECT_EQ(rr[k].location, r[k].location);
      EXPECT_EQ(rr[k].multiplicity, r[k].multiplicity);
    }
  }
}

TEST(Roots, ReconstructionResidualRandomMonic) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 8;
    std::vector<cplx> rs;
    while (static_cast<int>(rs.size()) < d) {
      const cplx z(u(rng), u(rng));
      bool ok = true;
      for (const auto& w : rs) ok = ok && std::abs(w - z) > 0.2;
      if (ok) rs.push_back(z);
    }
    const auto p = from_roots(rs);
    const auto r = roots(p);
    EXPECT_EQ(r.size(), d);
    EXPECT_LT(reconstruction_residual(p, r), 1e-8) << "trial " << trial;
  }
}

TEST(Sectors, HarmonicOscillator) {
  const auto s = stokes_sectors(poly({1, 0, 0}));
  ASSERT_EQ(s.size(), 4);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(s.sectors[j].center, j * pi / 2, 1e-15);
    EXPECT_NEAR(s.sectors[j].half_width, pi / 4, 1e-15);
  }
}

TEST(Sectors, Airy) {
  const auto s = stokes_sectors(poly({1, 0}));
  ASSERT_EQ(s.size(), 3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.sectors[j].center, 2 * pi * j / 3, 1e-15);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.ray_angles[j], pi * (2 * j + 1) / 3, 1e-15);
}

TEST(Sectors, RayAnglesSolveBoundednessCondition) {
  const auto p = poly({cplx(0.3, -1.1), 2, 0, cplx(1, 1), 4});
  const auto s = stokes_sectors(p);
  const int d = p.degree();
  for (double theta : s.ray_angles) EXPECT_NEAR(std::cos(p.phi0() / 2 + (d + 2) * theta / 2), 0.0, 1e-12);
  for (int j = 0; j + 1 < s.size(); ++j)
    EXPECT_NEAR(s.sectors[j + 1].center - s.sectors[j].center, 2 * pi / (d + 2), 1e-12);
}

TEST(Sectors, PositiveScalingPreservesSectorsExactly) {
  for (auto p : {poly({1, 0, -1}), poly({cplx(0.3, 0.7), 1, 2}), poly({cplx(-2, 1), 0, 0, 1})})
    for (double c : {2.0, 10.0, 0.5}) EXPECT_TRUE(stokes_sectors(p.scaled(c)) == stokes_sectors(p));
}

TEST(Sectors, RotationShiftsRays) {
  const auto p = poly({cplx(1, 0.5), 0, 1, -2});
  const int d = p.degree();
  const auto base = stokes_sectors(p);
  for (double t : {0.05, 0.3, 1.2, 2.7}) {
    const auto rot = stokes_sectors(rotate(p, t));
    for (double ang : rot.ray_angles) {
      double best = 10;
      for (double b : base.ray_angles) best = std::min(best, angle_distance(ang, b - 2 * t / (d + 2)));
      EXPECT_LT(best, 1e-12);
    }
  }
}

TEST(Parse, TextFormat) {
  EXPECT_EQ(parse_polynomial("1,0,-1").coefficients(), poly({1, 0, -1}).coefficients());
  EXPECT_EQ(parse_polynomial("1, 2+3i, -1-0.5i, 2i").coefficients(),
            poly({1, cplx(2, 3), cplx(-1, -0.5), cplx(0, 2)}).coefficients());
  EXPECT_EQ(parse_coefficient("1e-3+2e2i"), cplx(1e-3, 2e2));
  EXPECT_THROW(parse_polynomial("1,,2"), Error);
  EXPECT_THROW(parse_polynomial("abc"), Error);
  EXPECT_THROW(parse_polynomial("0,1"), Error);
}
