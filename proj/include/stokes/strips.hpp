#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stokes/stokes_graph.hpp"

namespace stokes {

enum class Cut { None, Up, Down };

inline const char* to_string(Cut c) {
  switch (c) {
    case Cut::None: return "none";
    case Cut::Up: return "up";
    case Cut::Down: return "down";
  }
  return "?";
}

struct StripNode {
  std::int64_t x = 0, y = 0;
  friend bool operator==(const StripNode&, const StripNode&) = default;
};

/// d nodes with strictly increasing x and distinct y; interior nodes carry a
/// vertical cut ray. cuts[0] and cuts[d-1] are always None.
struct ChoppedStrip {
  std::vector<StripNode> nodes;
  std::vector<Cut> cuts;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Coordinates must stay below this in magnitude so exact predicates fit in 128 bits.
inline constexpr std::int64_t kStripCoordinateLimit = std::int64_t{1} << 60;

/// Checks the type invariants. With `allow_missing_cuts`, interior nodes may have no cut.
inline void validate_strip(const ChoppedStrip& s, bool allow_missing_cuts = false) {
  const std::size_t d = s.nodes.size();
  if (d < 2) throw Error(ErrorKind::Domain, "a chopped strip needs at least two nodes");
  if (s.cuts.size() != d) throw Error(ErrorKind::Domain, "one cut entry per node expected");
  for (std::size_t j = 0; j < d; ++j) {
    const auto& n = s.nodes[j];
    if (std::abs(n.x) > kStripCoordinateLimit || std::abs(n.y) > kStripCoordinateLimit)
      throw Error(ErrorKind::Domain, "strip coordinate out of range");
    if (j > 0 && !(s.nodes[j - 1].x < n.x)) throw Error(ErrorKind::Domain, "x coordinates must increase strictly");
    for (std::size_t i = 0; i < j; ++i)
      if (s.nodes[i].y == n.y) throw Error(ErrorKind::Domain, "y coordinates must be distinct");
    const bool end = j == 0 || j + 1 == d;
    if (end && s.cuts[j] != Cut::None) throw Error(ErrorKind::Domain, "end nodes carry no cut");
    if (!end && s.cuts[j] == Cut::None && !allow_missing_cuts)
      throw Error(ErrorKind::Domain, "interior nodes need a cut");
  }
}

struct VisibilityTie {
  int i = 0, j = 0;  // the segment
  int node = 0;      // cut base lying exactly on it
};

struct Visibility {
  std::vector<std::pair<int, int>> pairs;
  std::vector<VisibilityTie> ties;

  int count() const { return static_cast<int>(pairs.size()); }
};

/// Node pairs whose open segment meets no cut. A segment through a cut base
/// counts as blocked and is reported as a tie.
inline Visibility visible_pairs(const ChoppedStrip& s, bool allow_missing_cuts = false) {
  validate_strip(s, allow_missing_cuts);
  using i128 = __int128;
  Visibility out;
  const int d = s.size();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const auto& a = s.nodes[static_cast<std::size_t>(i)];
      const auto& b = s.nodes[static_cast<std::size_t>(j)];
      bool blocked = false;
      for (int k = i + 1; k < j; ++k) {
        const Cut c = s.cuts[static_cast<std::size_t>(k)];
        if (c == Cut::None) continue;
        const auto& n = s.nodes[static_cast<std::size_t>(k)];
        // (x_b - x_a) * (y_segment(x_n) - y_n), with x_b > x_a
        const i128 side = static_cast<i128>(a.y - n.y) * (b.x - a.x) + static_cast<i128>(b.y - a.y) * (n.x - a.x);
        if (side == 0) {
          out.ties.push_back({i, j, k});
          blocked = true;
        } else if ((c == Cut::Up && side > 0) || (c == Cut::Down && side < 0)) {
          blocked = true;
        }
        if (blocked) break;
      }
      if (!blocked) out.pairs.emplace_back(i, j);
    }
  }
  return out;
}

namespace detail {

inline ChoppedStrip make_strip(std::vector<std::pair<std::int64_t, std::int64_t>> pts, std::vector<Cut> interior) {
  ChoppedStrip s;
  for (auto [x, y] : pts) s.nodes.push_back({x, y});
  s.cuts.push_back(Cut::None);
  s.cuts.insert(s.cuts.end(), interior.begin(), interior.end());
  s.cuts.push_back(Cut::None);
  return s;
}

/// Hand-built strips for d <= 4, indexed by k.
inline std::optional<ChoppedStrip> base_strip(int d, int k) {
  using C = Cut;
  if (d == 2 && k == 1) return make_strip({{0, 0}, {1, 1}}, {});
  if (d == 3 && k == 2) return make_strip({{0, 0}, {1, -1}, {2, 1}}, {C::Up});
  if (d == 3 && k == 3) return make_strip({{0, 0}, {1, 1}, {2, -1}}, {C::Up});
  if (d == 4 && k == 3) return make_strip({{0, 0}, {1, -1}, {2, -4}, {3, -9}}, {C::Down, C::Down});
  if (d == 4 && k == 4) return make_strip({{0, 0}, {1, -1}, {2, -4}, {3, -9}}, {C::Down, C::Up});
  if (d == 4 && k == 5) return make_strip({{2, -2}, {4, -8}, {6, -18}, {8, -27}}, {C::Up, C::Up});
  if (d == 4 && k == 6) return make_strip({{0, 0}, {1, -1}, {2, -4}, {3, -9}}, {C::Up, C::Up});
  return std::nullopt;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace detail

inline ChoppedStrip realize_count(int d, int k) {
  if (d < 2) throw Error(ErrorKind::Domain, "d must be at least 2");
  const long long lo = d - 1, hi = static_cast<long long>(d) * (d - 1) / 2;
  if (k < lo || k > hi)
    throw Error(ErrorKind::Domain, "k must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

  ChoppedStrip s;
  if (auto b = detail::base_strip(d, k)) {
    s = *b;
  } else if (k <= (d - 1) * (d - 2) / 2 + 1) {
    // A (d-1, k-1) strip plus one node that only sees the old last node:
    // a downward cut at the old last node hides everything behind it.
    s = realize_count(d - 1, k - 1);
    const StripNode last = s.nodes.back();
    const std::int64_t xn = last.x + 1;
    std::int64_t yn = last.y;
    for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i) {
      const std::int64_t delta = xn - s.nodes[i].x;  // >= 2
      yn = std::min(yn, detail::floor_div(last.y * delta - s.nodes[i].y, delta - 1) - 1);
    }
    for (const auto& n : s.nodes) yn = std::min(yn, n.y - 1);
    s.cuts.back() = Cut::Down;
    s.nodes.push_back({xn, yn});
    s.cuts.push_back(Cut::None);
    // lower still blocks; step down until no segment runs through a cut base
    for (int guard = 0; !visible_pairs(s).ties.empty(); ++guard) {
      if (guard > 1000) throw Error(ErrorKind::Convergence, "could not place the new node in general position");
      --s.nodes.back().y;
    }
  } else {
    // d-1 nodes in convex position with upward cuts see each other; the new
    // node on the right sees the first i* of them plus the old last one.
    const int m = k - (d - 1) * (d - 2) / 2;  // 2 .. d-1
    const int istar = m - 1;
    std::vector<std::pair<std::int64_t, std::int64_t>> pts;
    for (int j = 1; j <= d - 1; ++j) pts.emplace_back(2 * j, -2LL * j * j);
    auto threshold = [&](int i) { return -2LL * ((d - 1LL) * (d - 1) + (d - 1) + i); };
    const std::int64_t yn = istar >= 1 ? threshold(istar) - 1 : threshold(1) + 1;
    pts.emplace_back(2LL * d, yn);
    s = detail::make_strip(pts, std::vector<Cut>(static_cast<std::size_t>(d - 2), Cut::Up));
  }
  const int got = visible_pairs(s).count();
  if (got != k)
    throw Error(ErrorKind::Convergence, "strip construction produced " + std::to_string(got) + " pairs instead of " +
                                            std::to_string(k));
  return s;
}

// ---------------------------------------------------------------------------
// Very flat differentials

struct VeryFlatResult {
  bool very_flat = false;
  std::string reason;
  std::optional<ChoppedStrip> strip;
  /// For each strip node: the turning point it came from and its canonical coordinate.
  std::vector<int> node_roots;
  std::vector<cplx> node_xi;
};

/// Tests conditions (a) simple roots, (b) d-1 strip domains, (c) each root on
/// at most two strips; when they hold, maps the roots to a chopped strip by xi.
inline VeryFlatResult is_very_flat(const Potential& pot, const TraceOptions& opts = {}) {
  VeryFlatResult res;
  const auto& tps = pot.turning_points;
  const int d = pot.degree();
  if (!tps.all_simple() || tps.size() != d) {
    res.reason = "roots are not all simple";
    return res;
  }
  const auto g = build_stokes_graph(pot, opts);
  if (!g.complete) throw Error(ErrorKind::NonGeneric, "Stokes graph is incomplete");
  const auto sub = subdivide(g);
  std::vector<const AdmissibleDomain*> strips;
  for (const auto& dom : sub.domains)
    if (dom.kind == DomainKind::Strip) strips.push_back(&dom);
  if (static_cast<int>(strips.size()) != d - 1) {
    res.reason = std::to_string(strips.size()) + " strip domains instead of " + std::to_string(d - 1);
    return res;
  }
  std::vector<int> on_strips(static_cast<std::size_t>(d), 0);
  for (const auto* s : strips)
    for (int r : s->turning_points) ++on_strips[static_cast<std::size_t>(r)];
  for (int r = 0; r < d; ++r)
    if (on_strips[static_cast<std::size_t>(r)] > 2) {
      res.reason = "turning point " + std::to_string(r) + " lies on more than two strips";
      return res;
    }
  res.very_flat = true;

  // Glue the strip charts along shared edges into one coordinate.
  const std::size_t ns = strips.size();
  std::vector<FaceChart> charts;
  for (const auto* s : strips) charts.push_back(face_chart(g, *s));
  std::vector<std::optional<cplx>> xi(static_cast<std::size_t>(d));
  std::map<int, int> sign;  // edge -> global branch sign relative to its trace
  std::vector<double> flip(ns, 0.0);
  std::vector<cplx> shift(ns, 0.0);
  std::vector<std::size_t> queue{0};
  flip[0] = 1.0;
  auto place = [&](std::size_t t) {
    for (const auto& [r, v] : charts[t].xi) xi[static_cast<std::size_t>(r)] = shift[t] + flip[t] * v;
    for (const auto& [e, sg] : charts[t].edge_sign) sign[e] = flip[t] > 0 ? sg : -sg;
  };
  place(0);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (std::size_t t = 0; t < ns; ++t) {
      if (flip[t] != 0.0) continue;
      for (int e : strips[t]->boundary_edges) {
        if (!sign.count(e) || !charts[t].edge_sign.count(e)) continue;
        const int r = g.edges[static_cast<std::size_t>(e)].origin;
        if (!xi[static_cast<std::size_t>(r)] || !charts[t].xi.count(r)) continue;
        flip[t] = charts[t].edge_sign.at(e) == sign.at(e) ? 1.0 : -1.0;
        shift[t] = *xi[static_cast<std::size_t>(r)] - flip[t] * charts[t].xi.at(r);
        place(t);
        queue.push_back(t);
        break;
      }
    }
  }
  for (int r = 0; r < d; ++r)
    if (!xi[static_cast<std::size_t>(r)]) throw Error(ErrorKind::NonGeneric, "strip domains are not connected");

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return xi[static_cast<std::size_t>(a)]->real() < xi[static_cast<std::size_t>(b)]->real();
  });
  const cplx base = *xi[static_cast<std::size_t>(order.front())];
  double extent = 0.0;
  for (int r : order) {
    const cplx v = *xi[static_cast<std::size_t>(r)] - base;
    extent = std::max({extent, std::abs(v.real()), std::abs(v.imag())});
    res.node_roots.push_back(r);
    res.node_xi.push_back(v);
  }
  if (!(extent > 0.0)) throw Error(ErrorKind::NonGeneric, "degenerate canonical coordinates");

  // cut direction: vertical direction of the interior node's edges that border only one strip
  std::map<int, int> edge_strips;
  for (const auto* s : strips)
    for (int e : s->boundary_edges) ++edge_strips[e];
  ChoppedStrip cs;
  const double scale = std::ldexp(1.0, 40) / extent;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const int r = order[j];
    cs.nodes.push_back({std::llround(res.node_xi[j].real() * scale), std::llround(res.node_xi[j].imag() * scale)});
    Cut cut = Cut::None;
    if (j > 0 && j + 1 < order.size()) {
      int up = 0, down = 0;
      for (std::size_t t = 0; t < ns; ++t) {
        for (int e : strips[t]->boundary_edges) {
          const auto& edge = g.edges[static_cast<std::size_t>(e)];
          if (edge.origin != r || !edge.escaping() || edge_strips[e] != 1) continue;
          const double dir = flip[t] * (charts[t].far_xi.at(e) - charts[t].xi.at(r)).imag();
          (dir > 0 ? up : down)++;
        }
      }
      if (up > 0 && down == 0) cut = Cut::Up;
      else if (down > 0 && up == 0) cut = Cut::Down;
      else throw Error(ErrorKind::NonGeneric, "cannot read the cut direction at turning point " + std::to_string(r));
    }
    cs.cuts.push_back(cut);
  }
  try {
    validate_strip(cs);
  } catch (const Error& e) {
    throw Error(ErrorKind::NonGeneric, std::string("projected strip is not in general position: ") + e.what());
  }
  res.strip = cs;
  return res;
}

}  // namespace stokes
