#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "stokes/tracer.hpp"

namespace stokes {

struct GeodesicCandidate {
  int a = -1, b = -1;
  double t = 0.0;  // in [0, pi)
  cplx period;
  bool detoured = false;
};

/// For each pair, the rotation angle at which the pair's period becomes
/// purely imaginary: t = pi/2 - arg w (mod pi).
inline std::vector<GeodesicCandidate> candidate_angles(const Potential& pot, const PathOptions& opts = {}) {
  if (pot.degree() < 2 || pot.turning_points.size() < 2)
    throw Error(ErrorKind::Precondition, "candidate angles need degree >= 2 and two distinct roots");
  std::vector<GeodesicCandidate> out;
  for (const auto& w : pairwise_periods(pot, opts))
    out.push_back({w.a, w.b, wrap_pi(pi / 2 - std::arg(w.value)), w.value, w.detoured});
  return out;
}

struct ShortGeodesic {
  int a = -1, b = -1;
  double t_star = 0.0;
  cplx period;  // along the verified polyline, Im >= 0 convention
  Polyline polyline;
  bool verified = false;
};

enum class GeodesicStatus { Verified, Refuted, NonGeneric };

inline const char* to_string(GeodesicStatus s) {
  switch (s) {
    case GeodesicStatus::Verified: return "verified";
    case GeodesicStatus::Refuted: return "refuted";
    case GeodesicStatus::NonGeneric: return "non-generic";
  }
  return "?";
}

struct GeodesicOptions {
  TraceOptions trace;
  PathOptions path;
  double initial_bracket = 1e-2;
  double max_bracket = pi / 8;
  int max_bisections = 60;
  /// A third-point hit this close to the candidate angle makes the pair non-generic.
  double coincidence_tol = 1e-6;
};

struct GeodesicVerification {
  GeodesicStatus status = GeodesicStatus::Refuted;
  int a = -1, b = -1;
  double t_candidate = 0.0;
  /// A trace at the requested angle itself reached b.
  bool direct = false;
  ShortGeodesic geodesic;
  /// Fates of the tracked trace at the ends of the final bracket.
  TrajectoryFate lower, upper;
  double lower_t = 0.0, upper_t = 0.0;
  int bisections = 0;
  std::string message;
  std::vector<std::string> warnings;
};

namespace detail {

/// Period along a polyline between two turning points, with Im w >= 0 (real w: Re w > 0).
inline cplx polyline_period(const Potential& pot, const Polyline& line) {
  PathOptions popts;
  popts.clearance_factor = 1e-8;
  cplx w = canonical_parameter_integral(pot, line, 1.0, popts);
  if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
  return w;
}

inline double closest_approach(const Polyline& line, cplx z) {
  double d = 1e300;
  for (std::size_t k = 0; k + 1 < line.size(); ++k) d = std::min(d, point_segment_distance(z, line[k], line[k + 1]));
  return d;
}

/// Observable of one trace: 0..n-1 for the (unrotated) ray label it escapes to,
/// -1 - r for hitting turning point r, -1000 for truncation.
inline int fate_code(const Potential& pot, const Trace& tr, double t) {
  switch (tr.fate.kind) {
    case FateKind::HitTurningPoint: return -1 - tr.fate.target;
    case FateKind::Truncated: return -1000;
    case FateKind::EscapedToRay: {
      const double a = tr.fate.asymptotic_angle + 2.0 * t / (pot.degree() + 2);
      return stokes_sectors(pot.poly).nearest_ray(a);
    }
  }
  return -1000;
}

/// Trace from `root` of the potential rotated by t, following the line that
/// leaves in direction `theta0` at t0 (directions turn by -2(t - t0)/(m+2)).
inline Trace trace_followed(const Potential& pot, int root, double theta0, double t0, double t,
                            const TraceOptions& opts) {
  const Potential q = pot.rotated(t);
  const int m = pot.turning_points[root].multiplicity;
  const double target = theta0 - 2.0 * (t - t0) / (m + 2);
  const auto dirs = emanating_directions(q, root);
  std::size_t best = 0;
  for (std::size_t k = 1; k < dirs.size(); ++k)
    if (angle_distance(dirs[k], target) < angle_distance(dirs[best], target)) best = k;
  try {
    return trace_stokes_line(q, root, static_cast<int>(best), opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Trace) throw;
    Trace tr;
    tr.origin = root;
    tr.direction_index = static_cast<int>(best);
    tr.points = {pot.turning_points[root].location};
    tr.fate.kind = FateKind::Truncated;
    return tr;
  }
}

inline ShortGeodesic geodesic_from_trace(const Potential& pot, int a, int b, const Trace& tr) {
  ShortGeodesic g;
  g.a = std::min(a, b);
  g.b = std::max(a, b);
  g.polyline = tr.points;
  if (a > b) std::reverse(g.polyline.begin(), g.polyline.end());
  g.period = polyline_period(pot, g.polyline);
  g.t_star = wrap_pi(pi / 2 - std::arg(g.period));
  g.verified = true;
  return g;
}

}  // namespace detail

/// Checks whether rotate(P, t) has a Stokes line from a to b; if not, bisects
/// on the fate transition of the trace from a that passes closest to b.
inline GeodesicVerification verify_geodesic(const Potential& pot, int a, int b, double t,
                                            const GeodesicOptions& opts = {}) {
  const auto& tps = pot.turning_points;
  if (a < 0 || b < 0 || a >= tps.size() || b >= tps.size() || a == b)
    throw Error(ErrorKind::Precondition, "invalid turning point pair");
  GeodesicVerification out;
  out.a = std::min(a, b);
  out.b = std::max(a, b);
  out.t_candidate = t;
  const cplx zb = tps[b].location;

  const Potential q = pot.rotated(t);
  const int ndir = tps[a].multiplicity + 2;
  std::vector<Trace> traces;
  for (int k = 0; k < ndir; ++k) {
    try {
      traces.push_back(trace_stokes_line(q, a, k, opts.trace));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Trace) throw;
      Trace tr;
      tr.origin = a;
      tr.direction_index = k;
      tr.direction = emanating_directions(q, a)[static_cast<std::size_t>(k)];
      tr.points = {tps[a].location};
      traces.push_back(tr);
    }
  }
  for (const auto& tr : traces) {
    if (tr.fate.kind == FateKind::HitTurningPoint && tr.fate.target == b) {
      out.status = GeodesicStatus::Verified;
      out.direct = true;
      out.geodesic = detail::geodesic_from_trace(pot, a, b, tr);
      out.lower = out.upper = tr.fate;
      out.lower_t = out.upper_t = t;
      for (const auto& other : traces)
        if (other.fate.kind == FateKind::HitTurningPoint && other.fate.target != b)
          out.warnings.push_back("simultaneous connection to turning point " + std::to_string(other.fate.target));
      return out;
    }
  }

  // the trace passing closest to b
  std::size_t best = 0;
  double bd = 1e300;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const double d = detail::closest_approach(traces[k].points, zb);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  const double theta0 = traces[best].direction;
  auto observe = [&](double s, Trace* keep) {
    Trace tr = detail::trace_followed(pot, a, theta0, t, s, opts.trace);
    const int code = detail::fate_code(pot, tr, s);
    if (keep) *keep = std::move(tr);
    return code;
  };

  const int hit_b = -1 - b;
  double eps = opts.initial_bracket;
  double lo = t - eps, hi = t + eps;
  Trace tlo, thi;
  int clo = observe(lo, &tlo), chi = observe(hi, &thi);
  auto found = [&](const Trace& tr, double s) {
    out.status = GeodesicStatus::Verified;
    out.geodesic = detail::geodesic_from_trace(pot, a, b, tr);
    out.lower = out.upper = tr.fate;
    out.lower_t = out.upper_t = s;
    return out;
  };
  while (clo == chi && clo != hit_b && eps < opts.max_bracket) {
    eps = std::min(4.0 * eps, opts.max_bracket);
    lo = t - eps;
    hi = t + eps;
    clo = observe(lo, &tlo);
    chi = observe(hi, &thi);
  }
  if (clo == hit_b) return found(tlo, lo);
  if (chi == hit_b) return found(thi, hi);
  if (clo == chi) {
    out.status = GeodesicStatus::Refuted;
    out.lower = tlo.fate;
    out.upper = thi.fate;
    out.lower_t = lo;
    out.upper_t = hi;
    out.message = "no fate transition within the bracket";
    return out;
  }
  for (int it = 0; it < opts.max_bisections && hi - lo > 1e-15 * (1.0 + std::abs(t)); ++it) {
    ++out.bisections;
    const double mid = 0.5 * (lo + hi);
    Trace tm;
    const int cm = observe(mid, &tm);
    if (cm == hit_b) return found(tm, mid);
    if (cm == clo) {
      lo = mid;
      tlo = std::move(tm);
    } else {
      hi = mid;
      thi = std::move(tm);
      chi = cm;
    }
  }
  out.lower = tlo.fate;
  out.upper = thi.fate;
  out.lower_t = lo;
  out.upper_t = hi;
  for (const Trace* tr : {&tlo, &thi}) {
    if (tr->fate.kind == FateKind::HitTurningPoint && tr->fate.target != b) {
      const double s = tr == &tlo ? lo : hi;
      const std::string what = "trace from " + std::to_string(a) + " reaches third turning point " +
                               std::to_string(tr->fate.target);
      // away from the candidate angle this is the connection to the third
      // point, and the pair's geodesic is broken there
      if (std::abs(s - t) < opts.coincidence_tol) {
        out.status = GeodesicStatus::NonGeneric;
        out.message = what + " at the candidate angle";
      } else {
        out.status = GeodesicStatus::Refuted;
        out.message = what + " at t = " + std::to_string(s) + " instead";
      }
      return out;
    }
  }
  out.status = GeodesicStatus::Refuted;
  out.message = "transition bracketed without a connection to the target";
  return out;
}

struct GeodesicReport {
  std::vector<ShortGeodesic> geodesics;
  std::vector<GeodesicVerification> pairs;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool non_generic() const { return !errors.empty(); }
  int count() const { return static_cast<int>(geodesics.size()); }
};

inline GeodesicReport enumerate_short_geodesics(const Potential& pot, const GeodesicOptions& opts = {}) {
  if (!pot.turning_points.all_simple()) throw Error(ErrorKind::Precondition, "short geodesics need simple roots");
  GeodesicReport rep;
  std::vector<GeodesicCandidate> cands;
  try {
    cands = candidate_angles(pot, opts.path);
  } catch (const Error& e) {
    rep.errors.push_back(e.what());
    return rep;
  }
  for (const auto& c : cands) {
    GeodesicVerification v;
    try {
      v = verify_geodesic(pot, c.a, c.b, c.t, opts);
    } catch (const Error& e) {
      v.a = c.a;
      v.b = c.b;
      v.t_candidate = c.t;
      v.status = GeodesicStatus::NonGeneric;
      v.message = e.what();
    }
    const std::string tag = "pair (" + std::to_string(c.a) + ", " + std::to_string(c.b) + "): ";
    for (const auto& w : v.warnings) rep.warnings.push_back(tag + w);
    if (c.detoured) rep.warnings.push_back(tag + "candidate period taken along a detoured path");
    if (v.status == GeodesicStatus::NonGeneric) rep.errors.push_back(tag + v.message);
    if (v.status == GeodesicStatus::Verified) {
      const bool dup = std::any_of(rep.geodesics.begin(), rep.geodesics.end(),
                                   [&](const ShortGeodesic& g) { return g.a == v.geodesic.a && g.b == v.geodesic.b; });
      if (dup)
        rep.errors.push_back(tag + "second geodesic for the same pair");
      else
        rep.geodesics.push_back(v.geodesic);
    }
    rep.pairs.push_back(std::move(v));
  }
  std::sort(rep.geodesics.begin(), rep.geodesics.end(), [](const ShortGeodesic& x, const ShortGeodesic& y) {
    return std::tie(x.t_star, x.a, x.b) < std::tie(y.t_star, y.a, y.b);
  });
  return rep;
}

inline int count_short_geodesics(const Potential& pot, const GeodesicOptions& opts = {}) {
  return enumerate_short_geodesics(pot, opts).count();
}

// ---------------------------------------------------------------------------
// Psi-polygons

struct PsiVertex {
  int order = 0;       // n_j >= -1
  double angle = 0.0;  // interior angle in [0, 2pi]
};

struct PsiPolygon {
  std::vector<PsiVertex> vertices;
  std::vector<int> interior;  // orders of singular points inside
};

/// sum_j (1 - (n_j + 2) theta_j / 2pi) - (2 + sum_i n_i); zero for a genuine polygon.
inline double teichmuller_defect(const PsiPolygon& poly) {
  double lhs = 0.0;
  for (const auto& v : poly.vertices) {
    if (v.order < -1 || v.angle < 0.0 || v.angle > 2 * pi)
      throw Error(ErrorKind::Domain, "Psi-polygon vertex out of range");
    lhs += 1.0 - (v.order + 2) * v.angle / (2 * pi);
  }
  double rhs = 2.0;
  for (int n : poly.interior) rhs += n;
  return lhs - rhs;
}

}  // namespace stokes
