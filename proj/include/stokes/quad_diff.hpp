#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "stokes/quadrature.hpp"
#include "stokes/roots.hpp"

namespace stokes {

using Polyline = std::vector<cplx>;

struct PathOptions {
  /// Clearance delta_path as a fraction of the root-set diameter.
  double clearance_factor = 1e-3;
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
};

/// delta_path for a potential; falls back to the unit scale for a single root.
inline double path_clearance(const TurningPointSet& tps, const PathOptions& opts = {}) {
  const double diam = tps.diameter();
  return opts.clearance_factor * (diam > 0.0 ? diam : 1.0);
}

struct BranchSample {
  cplx z;
  cplx sqrt_p;
};

/// A path with a continuous branch of sqrt(P) along it.
struct BranchedPath {
  std::vector<BranchSample> samples;
  cplx total_integral{0.0, 0.0};

  cplx final_value() const { return samples.back().sqrt_p; }
};

namespace detail {

/// The square root of `value` closest to `reference`.
inline cplx sqrt_near(cplx value, cplx reference) {
  const cplx s = std::sqrt(value);
  return std::real(s * std::conj(reference)) >= 0.0 ? s : -s;
}

inline double point_segment_distance(cplx p, cplx a, cplx b, double* param = nullptr) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  double t = len2 > 0.0 ? std::real((p - a) * std::conj(ab)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (param) *param = t;
  return std::abs(p - (a + t * ab));
}

inline bool at_turning_point(const TurningPointSet& tps, cplx z, double tiny, int* index = nullptr) {
  double dist = 0.0;
  const int k = tps.nearest(z, -1, &dist);
  if (k >= 0 && dist <= tiny) {
    if (index) *index = k;
    return true;
  }
  return false;
}

}  // namespace detail

/// Continues sqrt(P) along a polyline starting from `seed`.
///
/// When the path starts at a turning point, sqrt(P) vanishes there and `seed`
/// only selects the branch: the first interior sample takes the square root
/// closest to `seed`. Only the first and last vertices may sit on turning
/// points; every other part of the path must clear all turning points by
/// delta_path.
inline BranchedPath sqrt_continuation(const Potential& pot, const Polyline& path, cplx seed,
                                      const PathOptions& opts = {}) {
  if (path.size() < 2) throw Error(ErrorKind::Precondition, "path needs at least two vertices");
  const auto& tps = pot.turning_points;
  const double clearance = path_clearance(tps, opts);
  const double scale = tps.scale();
  const double tiny = 1e-12 * scale;

  BranchedPath out;
  int start_root = -1, end_root = -1;
  const bool starts_at_root = detail::at_turning_point(tps, path.front(), tiny, &start_root);
  const bool ends_at_root = detail::at_turning_point(tps, path.back(), tiny, &end_root);

  cplx reference = seed;
  if (starts_at_root) {
    out.samples.push_back({tps[start_root].location, cplx{0.0, 0.0}});
    if (seed == cplx{0.0, 0.0}) reference = 1.0;
  } else {
    const cplx v = pot(path.front());
    if (std::abs(seed * seed - v) > 1e-8 * std::max(std::abs(v), 1e-300) + 1e-300)
      throw Error(ErrorKind::Precondition, "seed does not square to P at the path start");
    out.samples.push_back({path.front(), seed});
  }

  const std::size_t nseg = path.size() - 1;
  for (std::size_t k = 0; k < nseg; ++k) {
    const cplx a = k == 0 && starts_at_root ? tps[start_root].location : path[k];
    const cplx b = k + 1 == nseg && ends_at_root ? tps[end_root].location : path[k + 1];
    const int skip_a = k == 0 ? start_root : -1;
    const int skip_b = k + 1 == nseg ? end_root : -1;

    // Clearance of the segment against every turning point not at its ends.
    for (int r = 0; r < tps.size(); ++r) {
      if (r == skip_a || r == skip_b) continue;
      if (detail::point_segment_distance(tps[r].location, a, b) < clearance)
        throw Error(ErrorKind::Clearance, "path passes within delta_path of a turning point");
    }

    const double len = std::abs(b - a);
    if (len == 0.0) continue;
    const cplx dir = (b - a) / len;
    double s = 0.0;
    bool from_root = k == 0 && starts_at_root;
    while (s < len) {
      const cplx z = a + s * dir;
      double dmin = std::numeric_limits<double>::infinity();
      for (int r = 0; r < tps.size(); ++r) {
        if (r == skip_a || r == skip_b) continue;
        dmin = std::min(dmin, std::abs(z - tps[r].location));
      }
      double h = std::min(len - s, 0.25 * dmin);
      if (from_root) h = std::min(h, 0.5 * len);
      while (true) {
        const double s_next = (len - s - h) <= 1e-14 * len ? len : s + h;
        const cplx zn = s_next == len ? b : a + s_next * dir;
        const bool hits_end_root = s_next == len && skip_b >= 0;
        cplx v = hits_end_root ? cplx{0.0, 0.0} : detail::sqrt_near(pot(zn), reference);
        const cplx prev = out.samples.back().sqrt_p;
        const bool check = !hits_end_root && prev != cplx{0.0, 0.0} && v != cplx{0.0, 0.0};
        if (check && std::abs(std::arg(v / prev)) > 0.25 * pi && h > 1e-14 * scale) {
          h *= 0.5;
          continue;
        }
        out.samples.push_back({zn, v});
        if (v != cplx{0.0, 0.0}) reference = v;
        s = s_next;
        break;
      }
      from_root = false;
    }
  }
  return out;
}

/// Integrates g(z, sqrtP) dz along a branched path. The branch at quadrature
/// nodes is the root nearest the larger of the two sample values bounding each
/// piece; pieces ending at a turning point use s = u^2 to absorb the
/// square-root singularity.
template <class G>
QuadratureResult integrate_on_branch(const Potential& pot, const BranchedPath& bp, G&& g,
                                     const PathOptions& opts = {}) {
  QuadratureResult total{{0.0, 0.0}, 0.0, 0};
  for (std::size_t k = 0; k + 1 < bp.samples.size(); ++k) {
    const auto& p0 = bp.samples[k];
    const auto& p1 = bp.samples[k + 1];
    const cplx dz = p1.z - p0.z;
    if (dz == cplx{0.0, 0.0}) continue;
    const bool zero0 = p0.sqrt_p == cplx{0.0, 0.0};
    const bool zero1 = p1.sqrt_p == cplx{0.0, 0.0};
    const cplx ref = std::abs(p0.sqrt_p) >= std::abs(p1.sqrt_p) ? p0.sqrt_p : p1.sqrt_p;
    auto f = [&](double s) -> cplx {
      const cplx z = p0.z + s * dz;
      return g(z, detail::sqrt_near(pot(z), ref)) * dz;
    };
    QuadratureResult r;
    if (zero0 && !zero1) {
      r = integrate([&](double u) { return f(u * u) * (2.0 * u); }, 0.0, 1.0, opts.abs_tol, opts.rel_tol);
    } else if (zero1 && !zero0) {
      r = integrate([&](double u) { return f(1.0 - u * u) * (2.0 * u); }, 0.0, 1.0, opts.abs_tol, opts.rel_tol);
    } else {
      r = integrate(f, 0.0, 1.0, opts.abs_tol, opts.rel_tol);
    }
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
  }
  return total;
}

/// Integral of sqrt(P) dz along the path, on the branch fixed by `seed`.
inline QuadratureResult canonical_integral_detailed(const Potential& pot, const Polyline& path, cplx seed,
                                                    const PathOptions& opts = {}) {
  const BranchedPath bp = sqrt_continuation(pot, path, seed, opts);
  return integrate_on_branch(pot, bp, [](cplx, cplx s) { return s; }, opts);
}

inline cplx canonical_parameter_integral(const Potential& pot, const Polyline& path, cplx seed,
                                         const PathOptions& opts = {}) {
  return canonical_integral_detailed(pot, path, seed, opts).value;
}

// ---------------------------------------------------------------------------
// Periods between turning points

struct Period {
  int a = -1;
  int b = -1;
  Polyline path;
  cplx value{0.0, 0.0};
  /// Branch selector at the start of `path` (see sqrt_continuation).
  cplx branch_seed{1.0, 0.0};
  bool detoured = false;
};

/// Straight segment a->b, bent around every other turning point within
/// delta_path by a semicircle of radius 2*delta_path. The semicircle goes to
/// the side with the smaller |P| at its apex; ties go to the left of travel.
inline Polyline period_path(const Potential& pot, int a, int b, const PathOptions& opts = {},
                            bool* detoured = nullptr) {
  const auto& tps = pot.turning_points;
  const double clearance = path_clearance(tps, opts);
  const cplx za = tps[a].location, zb = tps[b].location;
  const cplx u = (zb - za) / std::abs(zb - za);

  struct Obstacle {
    double param;
    cplx center;
  };
  std::vector<Obstacle> obstacles;
  for (int c = 0; c < tps.size(); ++c) {
    if (c == a || c == b) continue;
    double t = 0.0;
    if (detail::point_segment_distance(tps[c].location, za, zb, &t) < clearance)
      obstacles.push_back({t, za + t * (zb - za)});
  }
  std::sort(obstacles.begin(), obstacles.end(), [](const auto& x, const auto& y) { return x.param < y.param; });
  if (detoured) *detoured = !obstacles.empty();

  Polyline path{za};
  const double radius = 2.0 * clearance;
  constexpr int arc_points = 16;
  for (const auto& ob : obstacles) {
    const double left = std::abs(pot(ob.center + radius * I * u));
    const double right = std::abs(pot(ob.center - radius * I * u));
    const double side = (right < left && (left - right) > 1e-12 * std::max(left, right)) ? -1.0 : 1.0;
    for (int k = 0; k <= arc_points; ++k) {
      const double phi = side * pi * (1.0 - static_cast<double>(k) / arc_points);
      path.push_back(ob.center + radius * u * std::polar(1.0, phi));
    }
  }
  path.push_back(zb);
  return path;
}

/// w_ab for every unordered pair of distinct turning points, with the branch
/// chosen so that Im w >= 0 (real w: Re w > 0).
inline std::vector<Period> pairwise_periods(const Potential& pot, const PathOptions& opts = {}) {
  const auto& tps = pot.turning_points;
  if (pot.degree() < 2 || tps.size() < 2)
    throw Error(ErrorKind::Precondition, "pairwise_periods needs at least two distinct roots");
  const double tiny = 1e-12 * tps.scale();
  std::vector<Period> out;
  for (int a = 0; a < tps.size(); ++a) {
    for (int b = a + 1; b < tps.size(); ++b) {
      if (std::abs(tps[a].location - tps[b].location) <= tiny)
        throw Error(ErrorKind::DegeneratePair, "coincident turning points in a pair");
      Period per;
      per.a = a;
      per.b = b;
      per.path = period_path(pot, a, b, opts, &per.detoured);
      per.value = canonical_parameter_integral(pot, per.path, per.branch_seed, opts);
      const bool real = std::abs(per.value.imag()) <= 1e-12 * std::abs(per.value);
      if ((!real && per.value.imag() < 0.0) || (real && per.value.real() < 0.0)) {
        per.value = -per.value;
        per.branch_seed = -per.branch_seed;
      }
      out.push_back(std::move(per));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correction densities alpha_j

namespace detail {

/// Coefficients lowest degree first.
using CoeffVec = std::vector<cplx>;

inline CoeffVec poly_mul(const CoeffVec& x, const CoeffVec& y) {
  if (x.empty() || y.empty()) return {};
  CoeffVec out(x.size() + y.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

inline CoeffVec poly_add(const CoeffVec& x, const CoeffVec& y, cplx fy = 1.0) {
  CoeffVec out(std::max(x.size(), y.size()), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += fy * y[i];
  return out;
}

inline CoeffVec poly_scale(CoeffVec x, cplx f) {
  for (auto& c : x) c *= f;
  return x;
}

inline CoeffVec poly_deriv(const CoeffVec& x) {
  if (x.size() <= 1) return {cplx{0.0, 0.0}};
  CoeffVec out(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) out[i - 1] = x[i] * static_cast<double>(i);
  return out;
}

inline cplx poly_eval(const CoeffVec& x, cplx z) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = x.size(); i-- > 0;) acc = acc * z + x[i];
  return acc;
}

}  // namespace detail

/// alpha_j = N_j(z) / (P^q_j * sqrt(P)^r_j) with r_j in {0, 1}, generated by
/// the recurrence alpha_0 = -P'/(4P),
/// alpha_j = -(sum_{m<j} alpha_m alpha_{j-1-m} + alpha_{j-1}') / (2 sqrt(P)).
/// Derivatives are taken on the closed form, so no numerical differencing.
class AlphaSeries {
 public:
  struct Term {
    detail::CoeffVec numerator;
    int p_power = 0;
    int s_power = 0;
  };

  AlphaSeries(const ComplexPolynomial& p, int j_max) {
    const auto hi = p.coefficients();
    p_.assign(hi.rbegin(), hi.rend());
    dp_ = detail::poly_deriv(p_);
    terms_.push_back({detail::poly_scale(dp_, -0.25), 1, 0});
    for (int j = 1; j <= j_max; ++j) terms_.push_back(next(j));
  }

  int j_max() const { return static_cast<int>(terms_.size()) - 1; }
  const Term& term(int j) const { return terms_[static_cast<std::size_t>(j)]; }

  /// alpha_j at z on the branch sqrt(P(z)) = s.
  cplx evaluate(int j, cplx z, cplx s) const {
    const Term& t = term(j);
    const cplx pz = detail::poly_eval(p_, z);
    cplx den{1.0, 0.0};
    for (int k = 0; k < t.p_power; ++k) den *= pz;
    if (t.s_power == 1) den *= s;
    return detail::poly_eval(t.numerator, z) / den;
  }

 private:
  Term multiply(const Term& x, const Term& y) const {
    Term out{detail::poly_mul(x.numerator, y.numerator), x.p_power + y.p_power, x.s_power + y.s_power};
    if (out.s_power == 2) {
      out.s_power = 0;
      out.p_power += 1;
    }
    return out;
  }

  Term derivative(const Term& x) const {
    // (N P^-q s^-r)' = (N' P - (q + r/2) N P') / (P^(q+1) s^r)
    const double f = x.p_power + 0.5 * x.s_power;
    auto num = detail::poly_add(detail::poly_mul(detail::poly_deriv(x.numerator), p_),
                                detail::poly_mul(x.numerator, dp_), -f);
    return {std::move(num), x.p_power + 1, x.s_power};
  }

  Term add(const Term& x, const Term& y) const {
    if (x.numerator.empty()) return y;
    const int q = std::max(x.p_power, y.p_power);
    auto lift = [&](const Term& t) {
      detail::CoeffVec n = t.numerator;
      for (int k = t.p_power; k < q; ++k) n = detail::poly_mul(n, p_);
      return n;
    };
    return {detail::poly_add(lift(x), lift(y)), q, x.s_power};
  }

  Term next(int j) const {
    Term acc{{}, 0, 0};
    for (int m = 0; m < j; ++m) acc = add(acc, multiply(terms_[static_cast<std::size_t>(m)], terms_[static_cast<std::size_t>(j - 1 - m)]));
    acc = add(acc, derivative(terms_[static_cast<std::size_t>(j - 1)]));
    Term out{detail::poly_scale(acc.numerator, -0.5), acc.p_power, acc.s_power + 1};
    if (out.s_power == 2) {
      out.s_power = 0;
      out.p_power += 1;
    }
    return out;
  }

  detail::CoeffVec p_;
  detail::CoeffVec dp_;
  std::vector<Term> terms_;
};

/// Winding number of a closed polyline around z.
inline int winding_number(const Polyline& contour, cplx z) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < contour.size(); ++k) total += std::arg((contour[k + 1] - z) / (contour[k] - z));
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

/// Sum over turning points of winding number times multiplicity.
inline int enclosed_multiplicity(const TurningPointSet& tps, const Polyline& contour) {
  int total = 0;
  for (const auto& t : tps.points) total += winding_number(contour, t.location) * t.multiplicity;
  return total;
}

namespace detail {

inline void check_contour(const Potential& pot, const Polyline& contour, const PathOptions& opts) {
  if (contour.size() < 4) throw Error(ErrorKind::Precondition, "contour needs at least three segments");
  const double scale = pot.turning_points.scale();
  if (std::abs(contour.front() - contour.back()) > 1e-12 * scale)
    throw Error(ErrorKind::Precondition, "contour is not closed");
  const double clearance = path_clearance(pot.turning_points, opts);
  for (std::size_t k = 0; k + 1 < contour.size(); ++k)
    for (const auto& t : pot.turning_points.points)
      if (point_segment_distance(t.location, contour[k], contour[k + 1]) < clearance)
        throw Error(ErrorKind::Clearance, "contour passes within delta_path of a turning point");
  if (enclosed_multiplicity(pot.turning_points, contour) % 2 != 0)
    throw Error(ErrorKind::Branch, "contour encloses odd total multiplicity; sqrt(P) is not single valued");
}

}  // namespace detail

/// Closed contour integral of sqrt(P) starting on the branch `seed`
/// (default: principal root at the first vertex).
inline cplx contour_integral_sqrt(const Potential& pot, const Polyline& contour, std::optional<cplx> seed = {},
                                  const PathOptions& opts = {}) {
  detail::check_contour(pot, contour, opts);
  const cplx s0 = seed ? *seed : std::sqrt(pot(contour.front()));
  const BranchedPath bp = sqrt_continuation(pot, contour, s0, opts);
  return integrate_on_branch(pot, bp, [](cplx, cplx s) { return s; }, opts).value;
}

/// Contour integrals of alpha_0..alpha_jmax along a closed contour, on the
/// branch `seed` at the first vertex (default: principal root).
inline std::vector<cplx> alpha_contour_integrals(const Potential& pot, const Polyline& contour, int j_max,
                                                 std::optional<cplx> seed = {}, const PathOptions& opts = {}) {
  if (j_max < 0) throw Error(ErrorKind::Domain, "j_max must be nonnegative");
  detail::check_contour(pot, contour, opts);
  const cplx s0 = seed ? *seed : std::sqrt(pot(contour.front()));
  const BranchedPath bp = sqrt_continuation(pot, contour, s0, opts);
  const AlphaSeries series(pot.poly, j_max);
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(j_max) + 1);
  for (int j = 0; j <= j_max; ++j)
    out.push_back(
        integrate_on_branch(pot, bp, [&](cplx z, cplx s) { return series.evaluate(j, z, s); }, opts).value);
  return out;
}

/// Closed polygon approximating a circle, counterclockwise, first vertex repeated.
inline Polyline circle_contour(cplx center, double radius, int vertices = 64) {
  Polyline c;
  c.reserve(static_cast<std::size_t>(vertices) + 1);
  for (int k = 0; k < vertices; ++k) c.push_back(center + std::polar(radius, 2.0 * pi * k / vertices));
  c.push_back(c.front());
  return c;
}

}  // namespace stokes
