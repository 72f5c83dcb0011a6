#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "stokes/tracer.hpp"

namespace stokes {

/// One traced line of the graph. Finite edges are merged from the two
/// half-traces A->B and B->A and keep the polyline of the first.
struct StokesEdge {
  int origin = -1;
  int direction_index = -1;
  double direction = 0.0;
  Polyline polyline;
  std::vector<cplx> branch;
  TrajectoryFate fate;
  /// Finite edges: direction index and angle at the target end.
  int end_direction_index = -1;
  double end_direction = 0.0;
  /// Only one of the two half-traces reached the other root.
  bool one_sided = false;

  bool finite() const { return fate.kind == FateKind::HitTurningPoint; }
  bool escaping() const { return fate.kind == FateKind::EscapedToRay; }
};

struct StokesGraph {
  Potential potential;
  TraceScales scales;
  std::vector<StokesEdge> edges;
  std::vector<double> rays;
  std::vector<std::vector<int>> complexes;
  int half_lines = 0;
  bool complete = true;
  std::vector<std::string> warnings;

  const TurningPointSet& turning_points() const { return potential.turning_points; }
  int finite_edge_count() const {
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return e.finite(); }));
  }
  int escaping_edge_count() const {
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return e.escaping(); }));
  }
};

namespace detail {

inline int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

/// Direction in which a finite trace arrives at its target, seen from the target.
inline double arrival_direction(const Trace& tr) {
  const cplx end = tr.points.back();
  for (std::size_t k = tr.points.size() - 1; k-- > 0;) {
    if (tr.points[k] != end) return wrap_2pi(std::arg(tr.points[k] - end));
  }
  return 0.0;
}

}  // namespace detail

inline StokesGraph build_stokes_graph(const Potential& pot, const TraceOptions& opts = {}) {
  if (pot.degree() < 1) throw Error(ErrorKind::Precondition, "Stokes graph needs degree >= 1");
  const auto& tps = pot.turning_points;
  StokesGraph g;
  g.potential = pot;
  g.scales = trace_scales(tps, opts);
  g.rays = stokes_sectors(pot.poly).ray_angles;

  // all half-traces, grouped by root
  std::vector<std::vector<Trace>> traces(static_cast<std::size_t>(tps.size()));
  for (int r = 0; r < tps.size(); ++r) {
    const int n = tps[r].multiplicity + 2;
    for (int k = 0; k < n; ++k) {
      Trace tr;
      try {
        tr = trace_stokes_line(pot, r, k, opts);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Trace) throw;
        tr.origin = r;
        tr.direction_index = k;
        tr.direction = emanating_directions(pot, r)[static_cast<std::size_t>(k)];
        tr.points = {tps[r].location};
        tr.branch = {0.0};
        tr.fate.kind = FateKind::Truncated;
        g.warnings.push_back(e.what());
      }
      traces[static_cast<std::size_t>(r)].push_back(std::move(tr));
      ++g.half_lines;
    }
  }

  auto& all = traces;
  std::vector<std::vector<bool>> used(all.size());
  for (std::size_t r = 0; r < all.size(); ++r) used[r].assign(all[r].size(), false);

  for (std::size_t r = 0; r < all.size(); ++r) {
    for (std::size_t k = 0; k < all[r].size(); ++k) {
      if (used[r][k]) continue;
      Trace& tr = all[r][k];
      used[r][k] = true;
      StokesEdge e;
      e.origin = tr.origin;
      e.direction_index = tr.direction_index;
      e.direction = tr.direction;
      e.fate = tr.fate;
      if (tr.fate.kind == FateKind::Truncated) g.complete = false;
      if (tr.fate.kind == FateKind::HitTurningPoint) {
        // the target's half-trace leaving along the arrival direction
        const auto b = static_cast<std::size_t>(tr.fate.target);
        const double arrive = detail::arrival_direction(tr);
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t j = 0; j < all[b].size(); ++j) {
          const double dd = angle_distance(all[b][j].direction, arrive);
          if (dd < bd) {
            bd = dd;
            best = j;
          }
        }
        const Trace& back = all[b][best];
        e.end_direction_index = back.direction_index;
        e.end_direction = back.direction;
        if (used[b][best] && !(back.fate.kind == FateKind::HitTurningPoint && back.fate.target == tr.origin)) {
          g.warnings.push_back("finite edge conflicts with an already placed line at root " + std::to_string(b));
          g.complete = false;
        }
        e.one_sided = !(back.fate.kind == FateKind::HitTurningPoint &&
                        back.fate.target == static_cast<int>(r));
        if (e.one_sided)
          g.warnings.push_back("one-sided finite edge between roots " + std::to_string(r) + " and " +
                               std::to_string(b));
        used[b][best] = true;
      }
      e.polyline = std::move(tr.points);
      e.branch = std::move(tr.branch);
      g.edges.push_back(std::move(e));
    }
  }

  // complexes: connected components via finite edges
  std::vector<int> parent(static_cast<std::size_t>(tps.size()));
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& e : g.edges)
    if (e.finite()) parent[static_cast<std::size_t>(detail::find_root(parent, e.origin))] =
        detail::find_root(parent, e.fate.target);
  std::map<int, std::vector<int>> comps;
  for (int r = 0; r < tps.size(); ++r) comps[detail::find_root(parent, r)].push_back(r);
  for (auto& [_, members] : comps) g.complexes.push_back(members);
  return g;
}

enum class ComplexKind { Simple, NonSimple };

inline const char* to_string(ComplexKind k) { return k == ComplexKind::Simple ? "simple" : "non-simple"; }

inline std::vector<ComplexKind> classify_complexes(const StokesGraph& g) {
  if (!g.complete) throw Error(ErrorKind::Incomplete, "Stokes graph is incomplete");
  std::vector<ComplexKind> out;
  for (const auto& c : g.complexes) out.push_back(c.size() == 1 ? ComplexKind::Simple : ComplexKind::NonSimple);
  return out;
}

// ---------------------------------------------------------------------------
// Planar subdivision

enum class DomainKind { HalfPlane, Strip };

inline const char* to_string(DomainKind k) { return k == DomainKind::HalfPlane ? "half-plane" : "strip"; }

/// One step of a face boundary walk. Vertices are turning point indices, or
/// n + j for the ray vertex j at infinity (n = number of turning points).
/// `edge` is an index into StokesGraph::edges, or -1 for an arc at infinity.
struct BoundaryStep {
  int edge = -1;
  bool forward = true;
  int from = -1;
  int to = -1;
};

struct AdmissibleDomain {
  std::vector<BoundaryStep> boundary;
  std::vector<int> boundary_edges;
  std::vector<int> rays;
  std::vector<int> turning_points;
  DomainKind kind = DomainKind::HalfPlane;
  double width = 0.0;
};

struct Subdivision {
  int vertices = 0;
  int edges = 0;
  int faces = 0;  // including the face outside the circle at infinity
  std::vector<AdmissibleDomain> domains;

  int strip_count() const {
    return static_cast<int>(
        std::count_if(domains.begin(), domains.end(), [](const auto& d) { return d.kind == DomainKind::Strip; }));
  }
  int half_plane_count() const { return static_cast<int>(domains.size()) - strip_count(); }
};

namespace detail {

struct HalfEdge {
  int from, to, edge;  // edge = -1 for arcs
  bool forward;
  double key;          // ccw order around `from`
  int twin = -1;
};

inline bool rays_adjacent(int a, int b, int n) { return (a - b + n) % n == 1 || (b - a + n) % n == 1; }

/// Points of the circle |z| = radius from a to b the short way round, ends included exactly.
inline Polyline short_arc(cplx a, cplx b, double radius) {
  const double pa = std::arg(a);
  const double delta = wrap_angle(std::arg(b) - pa);
  const int n = std::max(2, static_cast<int>(std::ceil(std::abs(delta) / (pi / 64))));
  Polyline out{a};
  for (int k = 1; k < n; ++k) out.push_back(std::polar(radius, pa + delta * k / n));
  out.push_back(b);
  return out;
}

/// Point where the polyline, walked from its start, first leaves the disc |z - c| < r.
inline std::size_t exit_index(const Polyline& line, cplx c, double r, cplx* point) {
  for (std::size_t k = 1; k < line.size(); ++k) {
    if (std::abs(line[k] - c) >= r) {
      const cplx a = line[k - 1], dz = line[k] - a;
      const double A = std::norm(dz), B = 2.0 * std::real(std::conj(a - c) * dz), C = std::norm(a - c) - r * r;
      const double disc = std::max(0.0, B * B - 4 * A * C);
      const double tau = std::clamp((-B + std::sqrt(disc)) / (2 * A), 0.0, 1.0);
      *point = a + tau * dz;
      return k;
    }
  }
  *point = line.back();
  return line.size() - 1;
}

}  // namespace detail

/// The escaping-edge key at a ray vertex: ccw arc first, then inward edges by
/// decreasing crossing angle, then the cw arc.
inline Subdivision subdivide(const StokesGraph& g) {
  if (!g.complete) throw Error(ErrorKind::Incomplete, "Stokes graph is incomplete");
  const int n = g.turning_points().size();
  const int nr = static_cast<int>(g.rays.size());
  std::vector<detail::HalfEdge> he;
  auto add_pair = [&](int u, int v, int edge, double ku, double kv) {
    const int a = static_cast<int>(he.size());
    he.push_back({u, v, edge, true, ku, a + 1});
    he.push_back({v, u, edge, false, kv, a});
  };
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.finite()) {
      add_pair(e.origin, e.fate.target, static_cast<int>(i), e.direction, e.end_direction);
    } else if (e.escaping()) {
      const double offset = wrap_angle(std::arg(e.polyline.back()) - g.rays[static_cast<std::size_t>(e.fate.ray)]);
      add_pair(e.origin, n + e.fate.ray, static_cast<int>(i), e.direction, 1.0 + (pi - offset));
    }
  }
  for (int j = 0; j < nr; ++j) add_pair(n + j, n + (j + 1) % nr, -1, 0.0, 10.0);

  const int V = n + nr;
  std::vector<std::vector<int>> around(static_cast<std::size_t>(V));
  for (int h = 0; h < static_cast<int>(he.size()); ++h) around[static_cast<std::size_t>(he[static_cast<std::size_t>(h)].from)].push_back(h);
  std::vector<int> pos(he.size());
  for (auto& lst : around) {
    std::sort(lst.begin(), lst.end(), [&](int a, int b) {
      return he[static_cast<std::size_t>(a)].key < he[static_cast<std::size_t>(b)].key;
    });
    for (std::size_t k = 0; k < lst.size(); ++k) pos[static_cast<std::size_t>(lst[k])] = static_cast<int>(k);
  }
  auto next = [&](int h) {
    const int t = he[static_cast<std::size_t>(h)].twin;
    const auto& lst = around[static_cast<std::size_t>(he[static_cast<std::size_t>(t)].from)];
    const int p = pos[static_cast<std::size_t>(t)];
    return lst[static_cast<std::size_t>((p + static_cast<int>(lst.size()) - 1) % static_cast<int>(lst.size()))];
  };

  Subdivision out;
  out.vertices = V;
  out.edges = static_cast<int>(he.size()) / 2;
  std::vector<bool> seen(he.size(), false);
  for (int h0 = 0; h0 < static_cast<int>(he.size()); ++h0) {
    if (seen[static_cast<std::size_t>(h0)]) continue;
    std::vector<int> cycle;
    for (int h = h0; !seen[static_cast<std::size_t>(h)]; h = next(h)) {
      seen[static_cast<std::size_t>(h)] = true;
      cycle.push_back(h);
    }
    ++out.faces;
    int cw_arcs = 0, ccw_arcs = 0;
    for (int h : cycle) {
      const auto& x = he[static_cast<std::size_t>(h)];
      if (x.edge < 0) (x.forward ? ccw_arcs : cw_arcs)++;
    }
    if (cw_arcs > 0) {
      if (cw_arcs != static_cast<int>(cycle.size()))
        throw Error(ErrorKind::NonGeneric, "circle at infinity is not a face boundary");
      continue;
    }
    AdmissibleDomain dom;
    for (int h : cycle) {
      const auto& x = he[static_cast<std::size_t>(h)];
      dom.boundary.push_back({x.edge, x.forward, x.from, x.to});
      if (x.edge >= 0 && std::find(dom.boundary_edges.begin(), dom.boundary_edges.end(), x.edge) == dom.boundary_edges.end())
        dom.boundary_edges.push_back(x.edge);
      if (x.from >= n) {
        if (std::find(dom.rays.begin(), dom.rays.end(), x.from - n) == dom.rays.end()) dom.rays.push_back(x.from - n);
      } else if (std::find(dom.turning_points.begin(), dom.turning_points.end(), x.from) == dom.turning_points.end()) {
        dom.turning_points.push_back(x.from);
      }
    }
    if (ccw_arcs == 1) {
      dom.kind = DomainKind::HalfPlane;
    } else if (ccw_arcs == 0 && dom.rays.size() == 2 && !detail::rays_adjacent(dom.rays[0], dom.rays[1], nr)) {
      dom.kind = DomainKind::Strip;
    } else {
      throw Error(ErrorKind::NonGeneric, "admissible domain of unrecognized type (" + std::to_string(ccw_arcs) +
                                             " arcs, " + std::to_string(dom.rays.size()) + " rays)");
    }
    out.domains.push_back(std::move(dom));
  }
  if (out.vertices - out.edges + out.faces != 2)
    throw Error(ErrorKind::NonGeneric, "Euler characteristic check failed");
  return out;
}

// ---------------------------------------------------------------------------
// Canonical coordinate on a strip domain

struct FaceChart {
  /// xi at each boundary turning point, relative to the first one on the walk.
  std::map<int, cplx> xi;
  /// +1 / -1: the chart's branch agrees with / is opposite to the edge's trace branch.
  std::map<int, int> edge_sign;
  /// For escaping edges: xi at the crossing with |z| = R_escape.
  std::map<int, cplx> far_xi;
  /// |xi| mismatch after walking the full boundary; ideally zero.
  double closure_error = 0.0;
};

/// Continues xi along the boundary of a strip domain, cutting around turning
/// points with small arcs inside the domain and joining escaping edges along
/// the circle |z| = R_escape.
inline FaceChart face_chart(const StokesGraph& g, const AdmissibleDomain& dom) {
  if (dom.kind != DomainKind::Strip) throw Error(ErrorKind::Precondition, "face chart needs a strip domain");
  const auto& pot = g.potential;
  const auto& tps = pot.turning_points;
  const int n = tps.size();
  const double R = g.scales.escape_radius;

  // start at a step leaving a turning point
  std::size_t s0 = 0;
  while (s0 < dom.boundary.size() && dom.boundary[s0].from >= n) ++s0;
  if (s0 == dom.boundary.size()) throw Error(ErrorKind::NonGeneric, "strip without turning points");
  std::vector<BoundaryStep> steps(dom.boundary.begin() + static_cast<std::ptrdiff_t>(s0), dom.boundary.end());
  steps.insert(steps.end(), dom.boundary.begin(), dom.boundary.begin() + static_cast<std::ptrdiff_t>(s0));

  auto cut_radius = [&](int v) {
    double nb = tps.scale();
    if (n > 1) tps.nearest(tps[v].location, v, &nb);
    return 0.05 * std::min(nb, tps.scale());
  };
  PathOptions popts;
  popts.clearance_factor = 1e-7;

  FaceChart chart;
  const int v0 = steps.front().from;
  chart.xi[v0] = 0.0;
  cplx xi{0.0, 0.0};
  cplx branch{0.0, 0.0};
  cplx cursor = tps[v0].location;
  bool at_root = true;

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    const auto& e = g.edges[static_cast<std::size_t>(st.edge)];
    Polyline line = e.polyline;
    std::vector<cplx> br = e.branch;
    if (!st.forward) {
      std::reverse(line.begin(), line.end());
      std::reverse(br.begin(), br.end());
    }
    Polyline path;
    std::size_t first = 0;
    if (st.from < n) {
      const cplx c = tps[st.from].location;
      cplx q;
      first = detail::exit_index(line, c, cut_radius(st.from), &q);
      if (i == 0) {
        path.push_back(c);
      } else {
        // arc around the root inside the domain, clockwise from the incoming side
        const double r = std::abs(cursor - c);
        const double ain = std::arg(cursor - c), aout = std::arg(q - c);
        double sweep = wrap_2pi(ain - aout);
        if (sweep == 0.0) sweep = 2 * pi;
        const int m = std::max(2, static_cast<int>(std::ceil(sweep / (pi / 32))));
        path.push_back(cursor);
        for (int k = 1; k < m; ++k) path.push_back(c + std::polar(r, ain - sweep * k / m));
      }
      path.push_back(q);
    } else {
      // the arc on |z| = R gets its own integral so xi at the crossing is known
      const Polyline arc = detail::short_arc(cursor, line.front(), R);
      if (arc.size() > 1) {
        const BranchedPath ap = sqrt_continuation(pot, arc, branch, popts);
        xi += integrate_on_branch(pot, ap, [](cplx, cplx s) { return s; }, popts).value;
        branch = ap.final_value();
      }
      chart.far_xi[st.edge] = xi;
      path.push_back(line.front());
      first = 1;
    }
    std::size_t last = line.size() - 1;
    cplx end_point = line.back();
    bool end_at_root = false;
    if (st.to < n) {
      if (i + 1 == steps.size()) {
        end_at_root = true;
        end_point = tps[st.to].location;
        last = line.size() - 1;
      } else {
        Polyline rev(line.rbegin(), line.rend());
        cplx q;
        const std::size_t k = detail::exit_index(rev, tps[st.to].location, cut_radius(st.to), &q);
        last = line.size() - 1 - k;
        end_point = q;
      }
    }
    // interior trace vertices, kept exactly so the branch can be compared
    std::size_t probe = 0;
    for (std::size_t k = first; k <= last && k < line.size(); ++k) {
      if (k == 0 || k == line.size() - 1) continue;
      if (std::abs(line[k] - path.back()) == 0.0) continue;
      path.push_back(line[k]);
      if (probe == 0 && br[k] != cplx{0.0, 0.0}) probe = k;
    }
    if (path.back() != end_point) path.push_back(end_point);

    const cplx seed = at_root && i == 0 ? (br[first] != cplx{0.0, 0.0} ? br[first] : cplx{1.0}) : branch;
    const BranchedPath bp = sqrt_continuation(pot, path, seed, popts);
    xi += integrate_on_branch(pot, bp, [](cplx, cplx s) { return s; }, popts).value;
    branch = bp.final_value();
    cursor = end_point;
    at_root = false;

    if (probe != 0) {
      for (const auto& smp : bp.samples) {
        if (smp.z == line[probe]) {
          chart.edge_sign[st.edge] = std::real(smp.sqrt_p * std::conj(br[probe])) >= 0.0 ? 1 : -1;
          break;
        }
      }
    }
    if (st.to >= n) {
      chart.far_xi[st.edge] = xi;
    } else if (end_at_root) {
      chart.closure_error = std::abs(xi);
    } else {
      const cplx c = tps[st.to].location;
      chart.xi[st.to] = xi + canonical_parameter_integral(pot, {end_point, c}, branch, popts);
    }
  }
  return chart;
}

namespace detail {

/// Turning points on each side of a strip: the walk splits into two chains at the ray vertices.
inline std::pair<std::vector<int>, std::vector<int>> strip_sides(const AdmissibleDomain& dom, int n) {
  std::vector<int> a, b;
  bool second = false;
  std::size_t s0 = 0;
  while (dom.boundary[s0].from < n) ++s0;  // start at a ray vertex
  for (std::size_t k = 0; k < dom.boundary.size(); ++k) {
    const auto& st = dom.boundary[(s0 + k) % dom.boundary.size()];
    if (k > 0 && st.from >= n) second = true;
    if (st.from < n) (second ? b : a).push_back(st.from);
  }
  return {a, b};
}

}  // namespace detail

/// Width of a strip domain: |Re xi| difference between its two sides.
inline double strip_width(const StokesGraph& g, const AdmissibleDomain& dom) {
  const auto chart = face_chart(g, dom);
  const auto [a, b] = detail::strip_sides(dom, g.turning_points().size());
  if (a.empty() || b.empty()) throw Error(ErrorKind::NonGeneric, "strip side without turning points");
  return std::abs(chart.xi.at(b.front()).real() - chart.xi.at(a.front()).real());
}

/// Faces of the Stokes graph with strip widths filled in.
inline std::vector<AdmissibleDomain> admissible_domains(const StokesGraph& g) {
  auto sub = subdivide(g);
  for (auto& d : sub.domains)
    if (d.kind == DomainKind::Strip) d.width = strip_width(g, d);
  return sub.domains;
}

// ---------------------------------------------------------------------------
// Chord diagrams

struct Chord {
  int a = 0, b = 0;  // a < b, vertex indices of the (d+2)-gon
  double weight = 0.0;
};

struct ChordDiagram {
  int n_vertices = 0;
  std::vector<Chord> chords;
};

inline bool chords_cross(const Chord& x, const Chord& y) {
  auto inside = [&](int v) { return x.a < v && v < x.b; };
  if (x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b) return false;
  return inside(y.a) != inside(y.b);
}

/// Non-crossing chords between non-neighboring vertices with positive weights.
inline bool valid_chord_diagram(const ChordDiagram& cd) {
  for (std::size_t i = 0; i < cd.chords.size(); ++i) {
    const auto& c = cd.chords[i];
    if (!(c.weight > 0.0) || detail::rays_adjacent(c.a, c.b, cd.n_vertices) || c.a == c.b) return false;
    for (std::size_t j = i + 1; j < cd.chords.size(); ++j)
      if (chords_cross(c, cd.chords[j])) return false;
  }
  return true;
}

inline ChordDiagram strip_chords(const StokesGraph& g) {
  const auto domains = admissible_domains(g);
  ChordDiagram cd;
  cd.n_vertices = static_cast<int>(g.rays.size());
  for (const auto& d : domains) {
    if (d.kind != DomainKind::Strip) continue;
    Chord c{std::min(d.rays[0], d.rays[1]), std::max(d.rays[0], d.rays[1]), d.width};
    cd.chords.push_back(c);
  }
  std::sort(cd.chords.begin(), cd.chords.end(), [](const Chord& x, const Chord& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  const int d = g.potential.degree();
  if (static_cast<int>(cd.chords.size()) != d - 1)
    throw Error(ErrorKind::NonGeneric, "expected " + std::to_string(d - 1) + " strip domains, found " +
                                           std::to_string(cd.chords.size()));
  return cd;
}

struct ChordDiagramPair {
  ChordDiagram stokes;
  ChordDiagram anti_stokes;
};

/// Chord diagrams of the Stokes graph and of the anti-Stokes graph (the Stokes graph of -P).
inline ChordDiagramPair chord_diagram(const Potential& pot, const TraceOptions& opts = {}) {
  const auto g = build_stokes_graph(pot, opts);
  const auto ga = build_stokes_graph(pot.rotated(pi / 2), opts);
  if (!g.complete || !ga.complete) throw Error(ErrorKind::NonGeneric, "Stokes graph has truncated lines");
  return {strip_chords(g), strip_chords(ga)};
}

}  // namespace stokes
