#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "stokes/polynomial.hpp"

namespace stokes {

struct TurningPoint {
  cplx location;
  int multiplicity = 1;
};

/// Roots of P with multiplicities, sorted by (real, imag).
struct TurningPointSet {
  std::vector<TurningPoint> points;

  int size() const { return static_cast<int>(points.size()); }
  const TurningPoint& operator[](int i) const { return points[static_cast<std::size_t>(i)]; }

  int total_multiplicity() const {
    int m = 0;
    for (const auto& p : points) m += p.multiplicity;
    return m;
  }

  bool all_simple() const {
    return std::all_of(points.begin(), points.end(), [](const auto& p) { return p.multiplicity == 1; });
  }

  double max_modulus() const {
    double r = 0.0;
    for (const auto& p : points) r = std::max(r, std::abs(p.location));
    return r;
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        d = std::max(d, std::abs(points[i].location - points[j].location));
    return d;
  }

  /// Diameter plus one; the length scale used by scale-free tolerances.
  double scale() const { return diameter() + 1.0; }

  /// Index of the closest turning point, optionally skipping one index.
  int nearest(cplx z, int skip = -1, double* distance = nullptr) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
      if (i == skip) continue;
      const double dist = std::abs(z - points[static_cast<std::size_t>(i)].location);
      if (dist < bd) {
        bd = dist;
        best = i;
      }
    }
    if (distance) *distance = bd;
    return best;
  }
};

struct RootOptions {
  double tol = 1e-10;
  int max_iterations = 2000;
};

namespace detail {

inline double horner_abs(const std::vector<cplx>& c, double r) {
  double acc = std::abs(c.front());
  for (std::size_t k = 1; k < c.size(); ++k) acc = acc * r + std::abs(c[k]);
  return acc;
}

inline void horner_with_derivative(const std::vector<cplx>& c, cplx z, cplx& p, cplx& dp) {
  p = c.front();
  dp = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
}

/// Aberth-Ehrlich simultaneous iteration on monic coefficients.
/// Each approximation is frozen once its residual reaches the rounding bound.
inline std::vector<cplx> aberth(const std::vector<cplx>& monic, int max_iterations) {
  const int d = static_cast<int>(monic.size()) - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  const cplx centroid = -monic[1] / static_cast<double>(d);

  // Radius: Fujiwara-style bound of the shifted polynomial is overkill; use the
  // unshifted bound plus the centroid distance.
  double radius = 0.0;
  for (int k = 1; k <= d; ++k)
    radius = std::max(radius, std::pow(std::abs(monic[static_cast<std::size_t>(k)]), 1.0 / k));
  radius = 2.0 * radius + std::abs(centroid) + 1e-3;

  std::vector<cplx> z(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    z[static_cast<std::size_t>(k)] = centroid + std::polar(0.5 * radius, 2.0 * pi * k / d + 0.4);

  std::vector<bool> done(static_cast<std::size_t>(d), false);
  for (int it = 0; it < max_iterations; ++it) {
    bool all = true;
    for (int i = 0; i < d; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      if (done[static_cast<std::size_t>(i)]) continue;
      cplx p, dp;
      horner_with_derivative(monic, zi, p, dp);
      const double bound = horner_abs(monic, std::abs(zi));
      if (std::abs(p) <= 4.0 * (d + 1) * eps * bound) {
        done[static_cast<std::size_t>(i)] = true;
        continue;
      }
      all = false;
      const cplx ratio = p / dp;
      cplx s{0.0, 0.0};
      for (int j = 0; j < d; ++j)
        if (j != i) s += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
      const cplx w = ratio / (1.0 - ratio * s);
      zi -= w;
      if (std::abs(w) <= 2.0 * eps * std::abs(zi)) done[static_cast<std::size_t>(i)] = true;
    }
    if (all) return z;
  }
  std::ostringstream msg;
  msg << "root iteration did not converge; residuals:";
  for (const auto& zi : z) {
    cplx p, dp;
    horner_with_derivative(monic, zi, p, dp);
    msg << ' ' << std::abs(p);
  }
  throw Error(ErrorKind::Convergence, msg.str());
}

/// Newton polish of a cluster center on the (m-1)-th derivative, where an
/// m-fold root is simple.
inline cplx polish(const ComplexPolynomial& p, cplx z, int m, double max_move) {
  const ComplexPolynomial q = m > 1 ? p.derivative(m - 1) : p;
  const std::vector<cplx>& c = q.base_coefficients();
  const cplx start = z;
  for (int it = 0; it < 20; ++it) {
    cplx v, dv;
    horner_with_derivative(c, z, v, dv);
    if (dv == cplx{0.0, 0.0}) break;
    const cplx step = v / dv;
    const cplx next = z - step;
    if (std::abs(next - start) > max_move) break;
    z = next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(z))) break;
  }
  return z;
}

/// Connected components of the graph joining points closer than `radius`.
inline std::vector<std::vector<cplx>> single_linkage(const std::vector<cplx>& pts, double radius) {
  std::vector<int> label(pts.size(), -1);
  std::vector<std::vector<cplx>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (label[i] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<std::size_t> stack{i};
    label[i] = id;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      out.back().push_back(pts[k]);
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (label[j] < 0 && std::abs(pts[j] - pts[k]) <= radius) {
          label[j] = id;
          stack.push_back(j);
        }
    }
  }
  return out;
}

}  // namespace detail

/// All d roots with multiplicity. Approximations from the simultaneous
/// iteration are grouped by single linkage; a group of size m is accepted when
/// its members lie within tol^(1/m) (relative to the root scale) of each other.
inline TurningPointSet roots(const ComplexPolynomial& p, const RootOptions& opts = {}) {
  const int d = p.degree();
  if (d < 1) throw Error(ErrorKind::Precondition, "roots needs degree >= 1");
  const auto& base = p.base_coefficients();
  std::vector<cplx> monic(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) monic[k] = base[k] / base.front();

  std::vector<cplx> approx;
  if (d == 1) {
    approx = {-monic[1]};
  } else {
    approx = detail::aberth(monic, opts.max_iterations);
  }

  double scale = 1.0;
  for (const auto& z : approx) scale = std::max(scale, std::abs(z));

  // A group of m approximations counts as one m-fold root when its diameter
  // is within scale * tol^(1/m). Groups are proposed by single linkage and
  // split recursively with the next tighter threshold until they qualify.
  auto threshold = [&](std::size_t m) { return scale * std::pow(opts.tol, 1.0 / static_cast<double>(m)); };
  std::vector<std::vector<cplx>> groups;
  std::vector<std::vector<cplx>> pending{approx};
  std::vector<std::size_t> level{approx.size()};
  while (!pending.empty()) {
    std::vector<cplx> g = std::move(pending.back());
    const std::size_t m = level.back();
    pending.pop_back();
    level.pop_back();
    double diam = 0.0;
    for (const auto& x : g)
      for (const auto& y : g) diam = std::max(diam, std::abs(x - y));
    if (g.size() == 1 || (m <= g.size() && diam <= threshold(g.size()))) {
      groups.push_back(std::move(g));
      continue;
    }
    if (m <= 1) {
      for (const auto& x : g) groups.push_back({x});
      continue;
    }
    for (auto& part : detail::single_linkage(g, threshold(std::min(m, g.size()))))
      if (part.size() == g.size()) {
        pending.push_back(std::move(part));
        level.push_back(std::min(m, g.size()) - 1);
      } else {
        level.push_back(part.size());
        pending.push_back(std::move(part));
      }
  }

  TurningPointSet out;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    cplx c{0.0, 0.0};
    double spread = 0.0;
    for (const auto& z : g) c += z;
    c /= static_cast<double>(g.size());
    for (const auto& z : g) spread = std::max(spread, std::abs(z - c));
    const int m = static_cast<int>(g.size());
    const double max_move = std::max(10.0 * spread, 1e-12 * scale) + scale * opts.tol;
    out.points.push_back({detail::polish(p, c, m, max_move), m});
  }
  std::sort(out.points.begin(), out.points.end(), [](const TurningPoint& a, const TurningPoint& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return out;
}

inline TurningPointSet roots(const ComplexPolynomial& p, double tol) {
  RootOptions o;
  o.tol = tol;
  return roots(p, o);
}

/// Max coefficient error of a0 * prod (z - r)^m against P.
inline double reconstruction_residual(const ComplexPolynomial& p, const TurningPointSet& tps) {
  std::vector<cplx> rs;
  for (const auto& t : tps.points)
    for (int k = 0; k < t.multiplicity; ++k) rs.push_back(t.location);
  const auto rebuilt = from_roots(rs, p.base_coefficients().front());
  const auto& a = p.base_coefficients();
  const auto& b = rebuilt.base_coefficients();
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double err = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) err = std::max(err, std::abs(a[k] - b[k]));
  return err;
}

/// A polynomial together with its turning points. Rotations share the
/// turning points, so roots(rotate(P,t)) equals roots(P) exactly.
struct Potential {
  ComplexPolynomial poly;
  TurningPointSet turning_points;

  static Potential from(const ComplexPolynomial& p, const RootOptions& opts = {}) {
    if (p.degree() < 1) return {p, {}};
    return {p, roots(p, opts)};
  }

  Potential rotated(double t) const { return {poly.rotated(t), turning_points}; }

  int degree() const { return poly.degree(); }
  cplx operator()(cplx z) const { return poly.evaluate(z); }
};

}  // namespace stokes
