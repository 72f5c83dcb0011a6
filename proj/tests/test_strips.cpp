#include <gtest/gtest.h>

#include <random>

#include "stokes/geodesics.hpp"
#include "stokes/strips.hpp"

using namespace stokes;

namespace {

ChoppedStrip strip(std::vector<std::pair<std::int64_t, std::int64_t>> pts, std::vector<Cut> cuts) {
  ChoppedStrip s;
  for (auto [x, y] : pts) s.nodes.push_back({x, y});
  s.cuts = std::move(cuts);
  return s;
}

// Floating point segment / ray test, kept separate from the exact predicate.
int brute_force_count(const ChoppedStrip& s) {
  int count = 0;
  for (int i = 0; i < s.size(); ++i) {
    for (int j = i + 1; j < s.size(); ++j) {
      const auto a = s.nodes[i], b = s.nodes[j];
      bool blocked = false;
      for (int k = i + 1; k < j; ++k) {
        if (s.cuts[k] == Cut::None) continue;
        const long double t = static_cast<long double>(s.nodes[k].x - a.x) / (b.x - a.x);
        const long double y = a.y + t * (b.y - a.y);
        if (s.cuts[k] == Cut::Up ? y >= s.nodes[k].y : y <= s.nodes[k].y) blocked = true;
      }
      count += !blocked;
    }
  }
  return count;
}

}  // namespace

TEST(Visibility, SmallExamples) {
  EXPECT_EQ(visible_pairs(strip({{0, 0}, {1, 1}}, {Cut::None, Cut::None})).count(), 1);
  EXPECT_EQ(visible_pairs(strip({{0, 0}, {1, 1}, {2, -1}}, {Cut::None, Cut::Up, Cut::None})).count(), 3);
  const auto v = visible_pairs(strip({{0, 0}, {1, -1}, {2, 1}}, {Cut::None, Cut::Up, Cut::None}));
  EXPECT_EQ(v.count(), 2);
  EXPECT_TRUE(v.ties.empty());
  EXPECT_EQ(visible_pairs(strip({{0, 0}, {1, -1}, {2, 1}}, {Cut::None, Cut::Down, Cut::None})).count(), 3);
}

TEST(Visibility, TieThroughCutBaseIsReported) {
  const auto v = visible_pairs(strip({{0, 0}, {1, 1}, {2, 2}, {3, -5}}, {Cut::None, Cut::Down, Cut::Up, Cut::None}));
  ASSERT_EQ(v.ties.size(), 1u);
  EXPECT_EQ(v.ties[0].i, 0);
  EXPECT_EQ(v.ties[0].j, 2);
  EXPECT_EQ(v.ties[0].node, 1);
}

TEST(Visibility, HugeCoordinatesStayExact) {
  const std::int64_t big = kStripCoordinateLimit;
  // the outer chord crosses x = 0 at y = -1; one unit either way decides
  const auto s = strip({{-big, -big}, {0, -2}, {big, big - 2}}, {Cut::None, Cut::Up, Cut::None});
  EXPECT_EQ(visible_pairs(s).count(), 2);
  auto t = s;
  t.nodes[1].y = 0;
  EXPECT_EQ(visible_pairs(t).count(), 3);
  t.nodes[1].y = -1;
  EXPECT_EQ(visible_pairs(t).ties.size(), 1u);
}

TEST(Visibility, RejectsMalformedStrips) {
  EXPECT_THROW(visible_pairs(strip({{0, 0}, {0, 1}}, {Cut::None, Cut::None})), Error);
  EXPECT_THROW(visible_pairs(strip({{0, 0}, {1, 0}}, {Cut::None, Cut::None})), Error);
  EXPECT_THROW(visible_pairs(strip({{0, 0}, {1, 1}}, {Cut::Up, Cut::None})), Error);
  EXPECT_THROW(visible_pairs(strip({{0, 0}, {1, 1}, {2, 3}}, {Cut::None, Cut::None, Cut::None})), Error);
}

TEST(Visibility, DeletingACutNeverHides) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> coord(-50, 50), pick(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 3 + trial % 5;
    ChoppedStrip s;
    std::vector<std::int64_t> ys;
    for (int k = 0; k < d; ++k) {
      std::int64_t y;
      do y = coord(rng);
      while (std::find(ys.begin(), ys.end(), y) != ys.end());
      ys.push_back(y);
      s.nodes.push_back({3 * k + pick(rng), y});
      s.cuts.push_back(k == 0 || k == d - 1 ? Cut::None : (pick(rng) ? Cut::Up : Cut::Down));
    }
    const int full = visible_pairs(s).count();
    EXPECT_EQ(full, brute_force_count(s));
    for (int k = 1; k + 1 < d; ++k) {
      auto t = s;
      t.cuts[k] = Cut::None;
      EXPECT_GE(visible_pairs(t, true).count(), full);
    }
  }
}

TEST(Realize, EveryCountUpToEight) {
  for (int d = 2; d <= 8; ++d) {
    for (int k = d - 1; k <= d * (d - 1) / 2; ++k) {
      const auto s = realize_count(d, k);
      ASSERT_EQ(s.size(), d);
      const auto v = visible_pairs(s);
      EXPECT_EQ(v.count(), k) << d << " " << k;
      EXPECT_EQ(brute_force_count(s), k) << d << " " << k;
      EXPECT_TRUE(v.ties.empty());
      for (int j = 0; j + 1 < d; ++j)
        EXPECT_NE(std::find(v.pairs.begin(), v.pairs.end(), std::make_pair(j, j + 1)), v.pairs.end());
    }
  }
}

TEST(Realize, OutOfRange) {
  EXPECT_THROW(realize_count(1, 0), Error);
  EXPECT_THROW(realize_count(4, 2), Error);
  EXPECT_THROW(realize_count(4, 7), Error);
}

TEST(VeryFlat, RotatedOscillator) {
  const auto r = is_very_flat(Potential::from(ComplexPolynomial({1, 0, -1})).rotated(0.3));
  EXPECT_TRUE(r.very_flat);
  ASSERT_TRUE(r.strip.has_value());
  EXPECT_EQ(r.strip->size(), 2);
  EXPECT_EQ(visible_pairs(*r.strip).count(), 1);
  // the two nodes differ in Re xi by the strip width
  EXPECT_NEAR(std::abs(r.node_xi[1].real() - r.node_xi[0].real()), 0.5 * pi * std::sin(0.3), 1e-6);
}

TEST(VeryFlat, ShortLineMeansNoStrip) {
  const auto r = is_very_flat(Potential::from(ComplexPolynomial({1, 0, -1})));
  EXPECT_FALSE(r.very_flat);
  EXPECT_FALSE(r.strip.has_value());
}

TEST(VeryFlat, DoubleRootFailsSimplicity) {
  const auto r = is_very_flat(Potential::from(from_roots({0.0, 0.0, 1.0, cplx(-0.5, 1.0)})));
  EXPECT_FALSE(r.very_flat);
}

TEST(VeryFlat, VisibleCountMatchesGeodesics) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  int checked = 0;
  for (int d = 3; d <= 5; ++d) {
    for (int i = 0; i < 4; ++i) {
      std::vector<cplx> rs;
      for (int k = 0; k < d; ++k) rs.emplace_back(n(rng), n(rng));
      const auto p = Potential::from(from_roots(rs));
      VeryFlatResult r;
      try {
        r = is_very_flat(p);
      } catch (const Error&) {
        continue;
      }
      if (!r.very_flat) continue;
      const auto rep = enumerate_short_geodesics(p);
      if (rep.non_generic()) continue;
      EXPECT_EQ(visible_pairs(*r.strip).count(), rep.count());
      ++checked;
    }
  }
  EXPECT_GE(checked, 6);
}
