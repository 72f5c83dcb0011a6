#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "stokes/ode.hpp"
#include "stokes/quad_diff.hpp"

namespace stokes {

struct TraceOptions {
  /// delta_hit = hit_factor * D, with D = root-set diameter + 1.
  double hit_factor = 1e-6;
  /// R_escape = escape_factor * (1 + max |root|).
  double escape_factor = 10.0;
  /// L_max = max(length_factor * D, 4 * R_escape).
  double length_factor = 50.0;
  /// Local error tolerance per step, relative to max(D, |z|).
  double rtol = 1e-10;
  /// Escaped traces are continued to far_factor * R_escape to read off their asymptotic angle.
  double far_factor = 1e3;
};

struct TraceScales {
  double length;  // D
  double hit;
  double escape_radius;
  double max_length;
};

inline TraceScales trace_scales(const TurningPointSet& tps, const TraceOptions& opts = {}) {
  TraceScales s;
  s.length = tps.scale();
  s.hit = opts.hit_factor * s.length;
  s.escape_radius = opts.escape_factor * (1.0 + tps.max_modulus());
  s.max_length = std::max(opts.length_factor * s.length, 4.0 * s.escape_radius);
  return s;
}

enum class FateKind { HitTurningPoint, EscapedToRay, Truncated };

inline const char* to_string(FateKind k) {
  switch (k) {
    case FateKind::HitTurningPoint: return "hit";
    case FateKind::EscapedToRay: return "escaped";
    case FateKind::Truncated: return "truncated";
  }
  return "?";
}

struct TrajectoryFate {
  FateKind kind = FateKind::Truncated;
  int target = -1;         // HitTurningPoint
  double distance = 0.0;   // HitTurningPoint: closest approach to the target
  int ray = -1;            // EscapedToRay: index into stokes_sectors(P).ray_angles
  double asymptotic_angle = std::numeric_limits<double>::quiet_NaN();
  double arc_length = 0.0;
};

/// A traced Stokes line. `points` starts at the origin turning point; for a
/// hit it ends at the target turning point, for an escape it ends on the
/// circle |z| = R_escape. `branch[k]` is the sqrt(P) branch used at points[k].
struct Trace {
  int origin = -1;
  int direction_index = -1;
  double direction = 0.0;
  Polyline points;
  std::vector<cplx> branch;
  TrajectoryFate fate;
};

/// Local directions theta_k = (pi(2k+1) - arg c)/(m+2), k = 0..m+1, in which
/// Re xi vanishes near a root of multiplicity m with P ~ c (z - z0)^m.
inline std::vector<double> emanating_directions(const Potential& pot, int root) {
  const auto& tp = pot.turning_points[root];
  const int m = tp.multiplicity;
  double fact = 1.0;
  for (int k = 2; k <= m; ++k) fact *= k;
  const cplx c = pot.poly.derivative(m)(tp.location) / fact;
  std::vector<double> out;
  for (int k = 0; k < m + 2; ++k) out.push_back(wrap_2pi((pi * (2 * k + 1) - std::arg(c)) / (m + 2)));
  return out;
}

namespace detail {

/// Unit-speed Stokes field i conj(sqrt P)/|sqrt P| on the branch nearest `ref`.
inline cplx stokes_velocity(const Potential& pot, cplx z, cplx ref, cplx* branch = nullptr) {
  const cplx s = sqrt_near(pot(z), ref);
  if (branch) *branch = s;
  const double a = std::abs(s);
  if (a == 0.0) return {0.0, 0.0};
  return I * std::conj(s) / a;
}

/// Re of the integral of sqrt(P) along the straight segment root -> z.
inline double re_xi_from_root(const Potential& pot, int root, cplx z, cplx branch) {
  return canonical_parameter_integral(pot, {pot.turning_points[root].location, z}, branch).real();
}

}  // namespace detail

/// Integrates dz/ds = i conj(sqrt P)/|sqrt P| from a turning point along one of
/// its emanating directions. Along the trajectory d(xi)/ds = i|sqrt P|, so
/// Re xi stays at its value at the origin.
inline Trace trace_stokes_line(const Potential& pot, int root, int direction_index, const TraceOptions& opts = {}) {
  const auto& tps = pot.turning_points;
  const auto dirs = emanating_directions(pot, root);
  if (direction_index < 0 || direction_index >= static_cast<int>(dirs.size()))
    throw Error(ErrorKind::Precondition, "direction index out of range");
  const TraceScales sc = trace_scales(tps, opts);
  const double theta = dirs[static_cast<std::size_t>(direction_index)];
  const cplx u = std::polar(1.0, theta);
  const cplx z0 = tps[root].location;

  Trace tr;
  tr.origin = root;
  tr.direction_index = direction_index;
  tr.direction = theta;
  tr.points.push_back(z0);
  tr.branch.push_back(0.0);

  // Start a short distance out along the local direction, then correct the
  // start point across the trajectory so Re xi vanishes there.
  double neighbor = sc.length;
  if (tps.size() > 1) tps.nearest(z0, root, &neighbor);
  const double h0 = 1e-4 * std::min(neighbor, sc.length);
  cplx z = z0 + h0 * u;
  cplx s = std::sqrt(pot(z));
  if (std::real(I * std::conj(s) * std::conj(u)) < 0.0) s = -s;
  for (int it = 0; it < 2; ++it) {
    const double re = detail::re_xi_from_root(pot, root, z, s);
    z -= re * std::conj(s) / std::norm(s);
    s = detail::sqrt_near(pot(z), s);
  }
  tr.points.push_back(z);
  tr.branch.push_back(s);

  const std::size_t nroots = static_cast<std::size_t>(tps.size());
  // distance history per root for closest-approach detection
  std::vector<std::array<double, 3>> hist(nroots, {std::numeric_limits<double>::infinity(),
                                                   std::numeric_limits<double>::infinity(),
                                                   std::numeric_limits<double>::infinity()});
  std::array<double, 3> arc_hist{0.0, 0.0, 0.0};
  double arc = std::abs(z - z0);
  double h = h0;
  double last_step = 0.0;
  const double hmin = 1e-15 * sc.length;

  auto finish_hit = [&](int target, double dist) {
    tr.points.push_back(tps[target].location);
    tr.branch.push_back(0.0);
    tr.fate.kind = FateKind::HitTurningPoint;
    tr.fate.target = target;
    tr.fate.distance = dist;
    tr.fate.arc_length = arc + dist;
  };

  while (true) {
    if (arc > sc.max_length) {
      tr.fate.kind = FateKind::Truncated;
      tr.fate.arc_length = arc;
      return tr;
    }
    double dnear = std::numeric_limits<double>::infinity();
    for (int r = 0; r < tps.size(); ++r) dnear = std::min(dnear, std::abs(z - tps[r].location));
    const double hcap = std::min(0.25 * dnear, 0.25 * std::max(std::abs(z), sc.length));
    h = std::min(h, hcap);

    cplx znew, snew;
    while (true) {
      if (h < hmin) throw Error(ErrorKind::Trace, "step size underflow near z = (" + std::to_string(z.real()) +
                                                      ", " + std::to_string(z.imag()) + ")");
      const cplx ref = s;
      cplx err;
      znew = dopri5_step([&](cplx w) { return detail::stokes_velocity(pot, w, ref); }, z, h, err);
      const double tol = opts.rtol * std::max(sc.length, std::abs(z));
      const double ratio = std::abs(err) / tol;
      snew = detail::sqrt_near(pot(znew), s);
      if (ratio > 1.0 || std::abs(std::arg(snew / s)) > pi / 3) {
        h *= ratio > 1.0 ? std::max(0.2, step_factor(ratio)) : 0.5;
        continue;
      }
      arc += h;
      last_step = h;
      z = znew;
      s = snew;
      tr.points.push_back(z);
      tr.branch.push_back(s);
      h = std::min(h * step_factor(ratio), 4.0 * h);
      break;
    }

    // Hit detection: direct proximity, or a resolved closest approach.
    arc_hist = {arc_hist[1], arc_hist[2], arc};
    for (std::size_t r = 0; r < nroots; ++r) {
      if (static_cast<int>(r) == root) continue;
      const double dist = std::abs(z - tps[static_cast<int>(r)].location);
      auto& hr = hist[r];
      hr = {hr[1], hr[2], dist};
      if (dist <= sc.hit) {
        finish_hit(static_cast<int>(r), dist);
        return tr;
      }
      if (hr[1] < hr[0] && hr[1] <= hr[2] && std::isfinite(hr[0])) {
        // parabola through (arc, dist) samples
        const double x0 = arc_hist[0], x1 = arc_hist[1], x2 = arc_hist[2];
        const double d01 = (hr[1] - hr[0]) / (x1 - x0), d12 = (hr[2] - hr[1]) / (x2 - x1);
        const double c2 = (d12 - d01) / (x2 - x0);
        double dmin = hr[1];
        if (c2 > 0.0) {
          const double xm = 0.5 * (x0 + x1) - d01 / (2.0 * c2);
          dmin = std::min(dmin, hr[0] + d01 * (xm - x0) + c2 * (xm - x0) * (xm - x1));
        }
        if (dmin <= sc.hit) {
          finish_hit(static_cast<int>(r), std::max(dmin, 0.0));
          return tr;
        }
      }
    }

    // Escape: outside R_escape and moving outward.
    const double rz = std::abs(z);
    const cplx vel = detail::stokes_velocity(pot, z, s);
    if (rz > sc.escape_radius && std::real(std::conj(z) * vel) > 0.0) {
      // Replace the last point by the crossing of |z| = R_escape, found by
      // bisecting the length of the last step so the point stays on the line.
      const cplx a = tr.points[tr.points.size() - 2];
      const cplx sa = tr.branch[tr.branch.size() - 2];
      auto along = [&](double len) {
        cplx err;
        return dopri5_step([&](cplx w) { return detail::stokes_velocity(pot, w, sa); }, a, len, err);
      };
      double lo = 0.0, hi = last_step;
      if (std::abs(a) < sc.escape_radius) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (std::abs(along(mid)) < sc.escape_radius ? lo : hi) = mid;
        }
      } else {
        hi = 0.0;
      }
      const cplx crossing = hi > 0.0 ? along(hi) : a;
      tr.points.back() = crossing;
      tr.branch.back() = detail::sqrt_near(pot(crossing), sa);
      tr.fate.kind = FateKind::EscapedToRay;
      tr.fate.arc_length = arc - last_step + hi;

      // Continue outward for the asymptotic direction.
      const double far = opts.far_factor * sc.escape_radius;
      cplx zf = z, sf = s;
      double hf = std::max(h, 0.01 * rz);
      int guard = 0;
      while (std::abs(zf) < far && guard++ < 100000) {
        hf = std::min(hf, 0.25 * std::abs(zf));
        const cplx ref = sf;
        cplx err;
        const cplx zn = dopri5_step([&](cplx w) { return detail::stokes_velocity(pot, w, ref); }, zf, hf, err);
        const double ratio = std::abs(err) / (opts.rtol * std::abs(zf));
        const cplx sn = detail::sqrt_near(pot(zn), sf);
        if (ratio > 1.0 || std::abs(std::arg(sn / sf)) > pi / 3) {
          hf *= 0.5;
          if (hf < hmin) break;
          continue;
        }
        zf = zn;
        sf = sn;
        hf = std::min(hf * step_factor(ratio), 4.0 * hf);
      }
      tr.fate.asymptotic_angle = wrap_2pi(std::arg(zf));
      tr.fate.ray = stokes_sectors(pot.poly).nearest_ray(tr.fate.asymptotic_angle);
      return tr;
    }
  }
}

/// Same as above, taking the direction angle; it must be one of emanating_directions().
inline Trace trace_stokes_line_at(const Potential& pot, int root, double direction, const TraceOptions& opts = {}) {
  const auto dirs = emanating_directions(pot, root);
  for (std::size_t k = 0; k < dirs.size(); ++k)
    if (angle_distance(dirs[k], direction) < 1e-9) return trace_stokes_line(pot, root, static_cast<int>(k), opts);
  throw Error(ErrorKind::Precondition, "direction is not an emanating direction of the root");
}

/// Largest |Re xi(z_k) - Re xi(origin)| along the polyline, with xi transported
/// vertex to vertex by quadrature on the trace's own branch.
inline double re_xi_drift(const Potential& pot, const Trace& tr) {
  double drift = 0.0;
  cplx xi{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < tr.points.size(); ++k) {
    const cplx a = tr.points[k], b = tr.points[k + 1];
    const cplx ref = std::abs(tr.branch[k]) >= std::abs(tr.branch[k + 1]) ? tr.branch[k] : tr.branch[k + 1];
    const bool zero_a = tr.branch[k] == cplx{0.0, 0.0};
    const bool zero_b = tr.branch[k + 1] == cplx{0.0, 0.0};
    auto f = [&](double t) {
      const cplx z = a + t * (b - a);
      return detail::sqrt_near(pot(z), ref) * (b - a);
    };
    QuadratureResult r;
    if (zero_a)
      r = integrate([&](double v) { return f(v * v) * (2.0 * v); }, 0.0, 1.0);
    else if (zero_b)
      r = integrate([&](double v) { return f(1.0 - v * v) * (2.0 * v); }, 0.0, 1.0);
    else
      r = integrate(f, 0.0, 1.0);
    xi += r.value;
    drift = std::max(drift, std::abs(xi.real()));
  }
  return drift;
}

}  // namespace stokes
