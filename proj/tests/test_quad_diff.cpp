#include <gtest/gtest.h>

#include <random>

#include "stokes/quad_diff.hpp"

using namespace stokes;

namespace {

Potential pot(std::initializer_list<cplx> c) { return Potential::from(ComplexPolynomial(std::vector<cplx>(c))); }

}  // namespace

TEST(SqrtContinuation, ConstantPotential) {
  const auto p = pot({1});
  const auto bp = sqrt_continuation(p, {cplx(0, 0), cplx(3, 1), cplx(-2, 5)}, 1.0);
  for (const auto& s : bp.samples) EXPECT_EQ(s.sqrt_p, cplx(1.0));
}

TEST(SqrtContinuation, PerfectSquareHasNoMonodromy) {
  const auto p = pot({1, 0, 0});
  const auto bp = sqrt_continuation(p, circle_contour(0.0, 1.0, 32), 1.0);
  for (const auto& s : bp.samples) EXPECT_NEAR(std::abs(s.sqrt_p - s.z), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(bp.final_value() - 1.0), 0.0, 1e-12);
}

TEST(SqrtContinuation, SquareRootMonodromy) {
  const auto p = pot({1, 0});
  const auto bp = sqrt_continuation(p, circle_contour(0.0, 1.0, 64), 1.0);
  EXPECT_NEAR(std::abs(bp.final_value() + 1.0), 0.0, 1e-8);
  for (std::size_t k = 1; k < bp.samples.size(); ++k) {
    EXPECT_LT(std::abs(std::arg(bp.samples[k].sqrt_p / bp.samples[k - 1].sqrt_p)), pi / 2);
    EXPECT_NEAR(std::abs(bp.samples[k].sqrt_p * bp.samples[k].sqrt_p - p(bp.samples[k].z)), 0.0, 1e-12);
  }
}

TEST(SqrtContinuation, Errors) {
  const auto p = pot({1, 0, -1});
  EXPECT_THROW(sqrt_continuation(p, {cplx(0, -1), cplx(1, 1e-5) + 0.0}, std::sqrt(p(cplx(0, -1)))), Error);
  try {
    sqrt_continuation(p, {cplx(1.0005, -1), cplx(1.0005, 1.0)}, std::sqrt(p(cplx(1.0005, -1))));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Clearance);
  }
  try {
    sqrt_continuation(p, {cplx(0, 2), cplx(3, 2)}, 7.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

TEST(CanonicalIntegral, ClosedForms) {
  EXPECT_NEAR(std::abs(canonical_parameter_integral(pot({1, 0}), {0.0, 1.0}, 1.0) - 2.0 / 3.0), 0.0, 1e-12);
  const cplx w = canonical_parameter_integral(pot({1, 0, -1}), {-1.0, 1.0}, I);
  EXPECT_NEAR(std::abs(w - I * pi / 2.0), 0.0, 1e-11);
}

TEST(CanonicalIntegral, CubicSegmentIsPurelyImaginary) {
  // Oracle: int_0^1 sqrt(x - x^3) dx = B(3/4, 3/2) / 2 by x^2 = u.
  const double beta = std::tgamma(0.75) * std::tgamma(1.5) / std::tgamma(2.25);
  const cplx w = canonical_parameter_integral(pot({1, 0, -1, 0}), {0.0, 1.0}, I);
  EXPECT_NEAR(w.real(), 0.0, 1e-9);
  EXPECT_NEAR(w.imag(), 0.5 * beta, 1e-11);
}

TEST(CanonicalIntegral, ReversalNegates) {
  const auto p = pot({1, cplx(0.3, 0.1), -2, cplx(0.5, -1)});
  const Polyline path{cplx(2, 2), cplx(0.1, 1.7), cplx(-2.5, 0.3), cplx(-1, -2)};
  const cplx seed = std::sqrt(p(path.front()));
  const auto fwd = sqrt_continuation(p, path, seed);
  const cplx f = canonical_parameter_integral(p, path, seed);
  const Polyline rev(path.rbegin(), path.rend());
  const cplx b = canonical_parameter_integral(p, rev, fwd.final_value());
  EXPECT_NEAR(std::abs(f + b), 0.0, 1e-11 * std::abs(f));
}

TEST(CanonicalIntegral, RotationCovariance) {
  const auto p = pot({1, 0, cplx(-1, 0.4), 1});
  const auto per = pairwise_periods(p);
  for (double t : {0.2, 1.1, 2.6}) {
    const auto q = p.rotated(t);
    for (const auto& w : per) {
      const cplx rotated = canonical_parameter_integral(q, w.path, std::polar(1.0, t) * w.branch_seed);
      EXPECT_NEAR(std::abs(rotated - std::polar(1.0, t) * w.value), 0.0, 1e-10);
    }
  }
}

TEST(Periods, HarmonicOscillator) {
  const auto per = pairwise_periods(pot({1, 0, -1}));
  ASSERT_EQ(per.size(), 1u);
  EXPECT_NEAR(std::abs(per[0].value - I * pi / 2.0), 0.0, 1e-11);
  EXPECT_FALSE(per[0].detoured);
}

TEST(Periods, CubeRootsOfUnityAreSymmetric) {
  const auto per = pairwise_periods(pot({1, 0, 0, -1}));
  ASSERT_EQ(per.size(), 3u);
  std::vector<double> args;
  for (const auto& w : per) {
    EXPECT_NEAR(std::abs(w.value), std::abs(per[0].value), 1e-8);
    args.push_back(wrap_pi(std::arg(w.value)));
  }
  std::sort(args.begin(), args.end());
  EXPECT_NEAR(args[1] - args[0], pi / 3, 1e-8);
  EXPECT_NEAR(args[2] - args[1], pi / 3, 1e-8);
}

TEST(Periods, CubicWithMiddleRootDetours) {
  const auto p = pot({1, 0, -1, 0});
  const auto per = pairwise_periods(p);
  ASSERT_EQ(per.size(), 3u);
  // roots sorted: -1, 0, 1
  const auto& w01 = per[0];  // (-1, 0)
  const auto& w02 = per[1];  // (-1, 1)
  const auto& w12 = per[2];  // (0, 1)
  EXPECT_FALSE(w01.detoured);
  EXPECT_TRUE(w02.detoured);
  // P > 0 on (-1, 0) and P < 0 on (0, 1).
  EXPECT_NEAR(w01.value.imag(), 0.0, 1e-12);
  EXPECT_NEAR(w12.value.real(), 0.0, 1e-12);
  EXPECT_GT(std::abs(w02.value), std::abs(w01.value));
  const double clearance = path_clearance(p.turning_points);
  for (std::size_t k = 0; k + 1 < w02.path.size(); ++k)
    EXPECT_GE(detail::point_segment_distance(0.0, w02.path[k], w02.path[k + 1]), clearance);
}

TEST(Alpha, ClosedFormFirstCorrection) {
  const AlphaSeries a(ComplexPolynomial({1, 0, -1}), 1);
  for (cplx z : {cplx(2, 1), cplx(-0.3, 2), cplx(4, -3)}) {
    const cplx P = z * z - 1.0, s = std::sqrt(P);
    EXPECT_NEAR(std::abs(a.evaluate(0, z, s) + z / (2.0 * P)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(a.evaluate(1, z, s) + (3.0 * z * z + 2.0) / (8.0 * P * P * s)), 0.0, 1e-13);
  }
}

TEST(Alpha, RiccatiRecurrenceHoldsWithFiniteDifferences) {
  const ComplexPolynomial p({cplx(1, 0.5), 0.3, -2, cplx(0, 1)});
  const int jmax = 4;
  const AlphaSeries a(p, jmax);
  const cplx z0(1.7, 1.3);
  const cplx s0 = std::sqrt(p(z0));
  auto alpha = [&](int j, cplx z) { return a.evaluate(j, z, detail::sqrt_near(p(z), s0)); };
  const double h = 1e-3;
  for (int j = 1; j <= jmax; ++j) {
    // five-point stencil derivative of alpha_{j-1}
    const cplx d = (-alpha(j - 1, z0 + 2 * h) + 8.0 * alpha(j - 1, z0 + h) - 8.0 * alpha(j - 1, z0 - h) +
                    alpha(j - 1, z0 - 2 * h)) / (12 * h);
    cplx sum{0, 0};
    for (int m = 0; m < j; ++m) sum += alpha(m, z0) * alpha(j - 1 - m, z0);
    const cplx lhs = 2.0 * s0 * alpha(j, z0) + sum + d;
    EXPECT_LT(std::abs(lhs), 1e-8 * (1 + std::abs(sum))) << "j=" << j;
  }
}

TEST(AlphaContour, LogarithmicDerivativeCount) {
  const auto p = pot({1, 0, -1});
  const auto r = alpha_contour_integrals(p, circle_contour(0.0, 2.0), 0);
  EXPECT_NEAR(std::abs(r[0] + pi * I), 0.0, 1e-8);
  // double root and four simple roots
  const auto q = pot({1, 0, 0});
  EXPECT_NEAR(std::abs(alpha_contour_integrals(q, circle_contour(0.0, 1.0), 0)[0] + pi * I), 0.0, 1e-8);
  const auto f = Potential::from(from_roots({1.0, -1.0, I, -I}));
  EXPECT_NEAR(std::abs(alpha_contour_integrals(f, circle_contour(0.0, 2.0), 0)[0] + 2.0 * pi * I), 0.0, 1e-8);
}

TEST(AlphaContour, NoEnclosedRootsGivesZero) {
  const auto p = pot({1, 0, -1});
  for (const auto& v : alpha_contour_integrals(p, circle_contour(5.0, 1.0), 3)) EXPECT_LT(std::abs(v), 1e-10);
}

TEST(AlphaContour, DeformationInvariance) {
  for (auto p : {pot({1, 0, -1}), Potential::from(from_roots({cplx(0.5, 0.2), -1.0, cplx(0.1, -0.9), 0.7}))}) {
    const auto a = alpha_contour_integrals(p, circle_contour(0.0, 2.0), 3);
    const auto b = alpha_contour_integrals(p, circle_contour(0.0, 3.0), 3);
    const cplx shift(0.2, -0.1);
    const auto c = alpha_contour_integrals(p, circle_contour(shift, 2.5, 40), 3, std::sqrt(p(shift + 2.5)));
    for (int j = 0; j <= 3; ++j) {
      EXPECT_NEAR(std::abs(a[j] - b[j]), 0.0, 1e-8) << j;
      // Same branch at a common point (the positive real axis) up to a sign for odd j.
      EXPECT_NEAR(std::min(std::abs(a[j] - c[j]), std::abs(a[j] + c[j])), 0.0, 1e-8) << j;
    }
  }
}

TEST(AlphaContour, OddMultiplicityRejected) {
  const auto p = pot({1, 0, -1});
  try {
    alpha_contour_integrals(p, circle_contour(1.0, 0.5), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Branch);
  }
  try {
    alpha_contour_integrals(p, circle_contour(1.0, 1e-5), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Clearance);
  }
}
