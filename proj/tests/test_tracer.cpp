#include <gtest/gtest.h>

#include "stokes/tracer.hpp"

using namespace stokes;

namespace {

Potential pot(std::initializer_list<cplx> c) { return Potential::from(ComplexPolynomial(std::vector<cplx>(c))); }

int index_of(const Potential& p, cplx z) {
  double d = 0;
  const int k = p.turning_points.nearest(z, -1, &d);
  return d < 1e-9 ? k : -1;
}

}  // namespace

TEST(Emanating, FormulaCases) {
  const auto p = pot({1, 0, -1});
  const auto d = emanating_directions(p, index_of(p, 1.0));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], pi / 3, 1e-14);
  EXPECT_NEAR(d[1], pi, 1e-14);
  EXPECT_NEAR(d[2], 5 * pi / 3, 1e-14);

  const auto airy = emanating_directions(pot({1, 0}), 0);
  ASSERT_EQ(airy.size(), 3u);
  EXPECT_NEAR(airy[1], pi, 1e-14);

  const auto sq = emanating_directions(pot({1, 0, 0}), 0);
  ASSERT_EQ(sq.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(sq[k], pi * (2 * k + 1) / 4, 1e-14);
}

TEST(Emanating, ReXiVanishesToSecondOrder) {
  // Along each direction, Re xi(z0 + r e^{i theta}) = o(r^{3/2}).
  const auto p = pot({1, cplx(0.2, 0.1), -1, 0.5});
  for (int root = 0; root < p.turning_points.size(); ++root) {
    for (double th : emanating_directions(p, root)) {
      const cplx z0 = p.turning_points[root].location;
      for (double r : {1e-2, 1e-3}) {
        const cplx z = z0 + std::polar(r, th);
        const double re = canonical_parameter_integral(p, {z0, z}, std::sqrt(p(z))).real();
        EXPECT_LT(std::abs(re), 10.0 * std::pow(r, 2.5)) << root << " " << th << " " << r;
      }
    }
  }
}

TEST(Trace, FiniteLineOfHarmonicOscillator) {
  const auto p = pot({1, 0, -1});
  const int a = index_of(p, 1.0), b = index_of(p, -1.0);
  const auto tr = trace_stokes_line_at(p, a, pi);
  ASSERT_EQ(tr.fate.kind, FateKind::HitTurningPoint);
  EXPECT_EQ(tr.fate.target, b);
  for (const auto& z : tr.points) {
    EXPECT_LT(std::abs(z.imag()), 1e-6);
    EXPECT_LE(z.real(), 1.0 + 1e-12);
    EXPECT_GE(z.real(), -1.0 - 1e-12);
  }
}

TEST(Trace, EscapingLineApproachesARay) {
  const auto p = pot({1, 0, -1});
  const auto tr = trace_stokes_line_at(p, index_of(p, 1.0), pi / 3);
  ASSERT_EQ(tr.fate.kind, FateKind::EscapedToRay);
  const auto rays = stokes_sectors(p.poly).ray_angles;
  EXPECT_LT(angle_distance(tr.fate.asymptotic_angle, rays[tr.fate.ray]), 1e-3);
  EXPECT_NEAR(std::abs(tr.points.back()), trace_scales(p.turning_points).escape_radius, 1e-9);
}

TEST(Trace, AiryLinesEscapeToTheirRays) {
  const auto p = pot({1, 0});
  const auto dirs = emanating_directions(p, 0);
  const auto rays = stokes_sectors(p.poly).ray_angles;
  for (int k = 0; k < 3; ++k) {
    const auto tr = trace_stokes_line(p, 0, k);
    ASSERT_EQ(tr.fate.kind, FateKind::EscapedToRay);
    EXPECT_NEAR(rays[tr.fate.ray], pi * (2 * k + 1) / 3, 1e-12);
    EXPECT_LT(angle_distance(tr.fate.asymptotic_angle, pi * (2 * k + 1) / 3), 1e-6);
  }
}

TEST(Trace, ReXiDriftBounded) {
  const auto p = Potential::from(from_roots({cplx(0.4, 0.9), -1.2, cplx(0.7, -0.6), cplx(0.1, 0.1)}));
  for (int r = 0; r < p.turning_points.size(); ++r)
    for (int k = 0; k < 3; ++k) {
      const auto tr = trace_stokes_line(p, r, k);
      EXPECT_NE(tr.fate.kind, FateKind::Truncated);
      EXPECT_LE(re_xi_drift(p, tr), 1e-6 * (1.0 + tr.fate.arc_length));
    }
}

TEST(Trace, RejectsBadDirection) {
  const auto p = pot({1, 0, -1});
  EXPECT_THROW(trace_stokes_line_at(p, 0, 0.1234), Error);
  EXPECT_THROW(trace_stokes_line(p, 0, 3), Error);
}
