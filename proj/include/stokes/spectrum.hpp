#pragma once

#include <array>
#include <map>
#include <vector>

#include "stokes/geodesics.hpp"

namespace stokes {

// ---------------------------------------------------------------------------
// Accumulation rays

/// Closed ccw contour at distance `radius` around an open polyline.
inline Polyline stadium_contour(const Polyline& line, double radius, int cap_points = 24) {
  if (line.size() < 2) throw Error(ErrorKind::Precondition, "stadium needs a polyline");
  // thin the polyline so consecutive vertices are at least radius/2 apart
  Polyline pts{line.front()};
  for (std::size_t k = 1; k + 1 < line.size(); ++k)
    if (std::abs(line[k] - pts.back()) >= 0.5 * radius && std::abs(line[k] - line.back()) >= 0.5 * radius)
      pts.push_back(line[k]);
  pts.push_back(line.back());

  const std::size_t n = pts.size();
  auto tangent = [&](std::size_t k) {
    const cplx d = k == 0 ? pts[1] - pts[0] : k + 1 == n ? pts[n - 1] - pts[n - 2] : pts[k + 1] - pts[k - 1];
    return d / std::abs(d);
  };
  Polyline c;
  // right side forward, cap around the end, left side back, cap around the start
  for (std::size_t k = 0; k < n; ++k) c.push_back(pts[k] - I * radius * tangent(k));
  const double a_end = std::arg(-I * tangent(n - 1));
  for (int j = 1; j < cap_points; ++j) c.push_back(pts[n - 1] + std::polar(radius, a_end + pi * j / cap_points));
  for (std::size_t k = n; k-- > 0;) c.push_back(pts[k] + I * radius * tangent(k));
  const double a_start = std::arg(I * tangent(0));
  for (int j = 1; j < cap_points; ++j) c.push_back(pts[0] + std::polar(radius, a_start + pi * j / cap_points));
  c.push_back(c.front());
  return c;
}

struct AccumulationRay {
  double angle = 0.0;  // = geodesic.t_star
  ShortGeodesic geodesic;
  /// Integral of sqrt(P) around the tight stadium, ccw, principal branch at its first vertex.
  cplx loop_period;
  Polyline contour;
  /// Wider stadium around the same line, used for the correction integrals.
  Polyline wide_contour;
};

struct SpectrumOptions {
  GeodesicOptions geodesics;
  /// Tight stadium clearance as a multiple of delta_path.
  double stadium_factor = 3.0;
  /// Wide stadium radius as a fraction of min(|a-b|, distance to the other roots).
  double wide_fraction = 0.25;
  int max_order = 8;
  /// eigenvalue_asymptotics refuses n whose leading estimate is smaller than this.
  double min_modulus = 0.0;
  int max_iterations = 50;
  double rel_tol = 1e-12;
};

inline AccumulationRay accumulation_ray(const Potential& pot, const ShortGeodesic& g, const SpectrumOptions& opts = {}) {
  const auto& tps = pot.turning_points;
  AccumulationRay ray;
  ray.angle = g.t_star;
  ray.geodesic = g;
  const double rho = opts.stadium_factor * path_clearance(tps, opts.geodesics.path);
  ray.contour = stadium_contour(g.polyline, rho);
  if (enclosed_multiplicity(tps, ray.contour) != 2)
    throw Error(ErrorKind::Clearance, "stadium around the short line encloses other turning points");
  ray.loop_period = contour_integral_sqrt(pot, ray.contour, std::nullopt, opts.geodesics.path);

  double room = std::abs(tps[g.a].location - tps[g.b].location);
  for (int r = 0; r < tps.size(); ++r) {
    if (r == g.a || r == g.b) continue;
    for (std::size_t k = 0; k + 1 < g.polyline.size(); ++k)
      room = std::min(room, detail::point_segment_distance(tps[r].location, g.polyline[k], g.polyline[k + 1]));
  }
  ray.wide_contour = stadium_contour(g.polyline, std::max(rho, opts.wide_fraction * room));
  if (enclosed_multiplicity(tps, ray.wide_contour) != 2) ray.wide_contour = ray.contour;
  return ray;
}

/// One ray per verified short geodesic.
inline std::vector<AccumulationRay> accumulation_rays(const Potential& pot, const GeodesicReport& report,
                                                      const SpectrumOptions& opts = {}) {
  std::vector<AccumulationRay> out;
  for (const auto& g : report.geodesics) out.push_back(accumulation_ray(pot, g, opts));
  return out;
}

inline std::vector<AccumulationRay> accumulation_rays(const Potential& pot, const SpectrumOptions& opts = {}) {
  if (pot.turning_points.size() < 2) return {};
  return accumulation_rays(pot, enumerate_short_geodesics(pot, opts.geodesics), opts);
}

// ---------------------------------------------------------------------------
// Eigenvalue asymptotics

struct EigenvalueEstimate {
  int n = 0;
  double ray_angle = 0.0;
  cplx value;
  int order = 0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Residuals decreased monotonically after the second iterate.
  bool monotone = true;
};

/// Contour data for the quantization condition on one ray:
///   lambda L = i(2 pi n + pi) - sum_j lambda^{-j} A_j,
/// with L and A_j taken on the branch that puts the leading estimate on the ray.
struct QuantizationData {
  cplx loop;
  std::vector<cplx> corrections;  // A_1..A_order
  double angle = 0.0;
};

inline QuantizationData quantization_data(const Potential& pot, const AccumulationRay& ray, int order,
                                          const SpectrumOptions& opts = {}) {
  if (order < 0) throw Error(ErrorKind::Domain, "order must be nonnegative");
  if (order > opts.max_order) throw Error(ErrorKind::Domain, "order exceeds the supported correction depth");
  const cplx seed = std::sqrt(pot(ray.wide_contour.front()));
  const cplx loop = contour_integral_sqrt(pot, ray.wide_contour, seed, opts.geodesics.path);
  const auto alphas = alpha_contour_integrals(pot, ray.wide_contour, order, seed, opts.geodesics.path);
  // branch flip: L -> -L, A_j -> (-1)^j A_j
  const cplx lead = I * pi / loop;
  const double sigma = std::real(std::polar(1.0, -ray.angle) * lead) >= 0.0 ? 1.0 : -1.0;
  QuantizationData q;
  q.loop = sigma * loop;
  q.angle = ray.angle;
  for (int j = 1; j <= order; ++j)
    q.corrections.push_back((j % 2 == 1 ? sigma : 1.0) * alphas[static_cast<std::size_t>(j)]);
  return q;
}

inline std::vector<EigenvalueEstimate> eigenvalue_asymptotics(const Potential& pot, const AccumulationRay& ray,
                                                              int n_min, int n_max, int order,
                                                              const SpectrumOptions& opts = {}) {
  if (n_min < 0 || n_max < n_min) throw Error(ErrorKind::Domain, "invalid index range");
  const auto q = quantization_data(pot, ray, order, opts);
  std::vector<EigenvalueEstimate> out;
  for (int n = n_min; n <= n_max; ++n) {
    const cplx rhs0 = I * (2.0 * pi * n + pi);
    auto residual = [&](cplx lam) {
      cplx r = lam * q.loop - rhs0;
      cplx p = 1.0;
      for (const auto& a : q.corrections) {
        p /= lam;
        r += p * a;
      }
      return std::abs(r);
    };
    EigenvalueEstimate e;
    e.n = n;
    e.ray_angle = ray.angle;
    e.order = order;
    cplx lam = rhs0 / q.loop;
    if (std::abs(lam) < opts.min_modulus)
      throw Error(ErrorKind::Precondition, "leading estimate below the configured modulus threshold");
    double prev = residual(lam);
    for (int it = 0; it < opts.max_iterations; ++it) {
      cplx corr = 0.0, p = 1.0;
      for (const auto& a : q.corrections) {
        p /= lam;
        corr += p * a;
      }
      const cplx next = (rhs0 - corr) / q.loop;
      const double step = std::abs(next - lam);
      lam = next;
      ++e.iterations;
      const double res = residual(lam);
      if (it >= 2 && res > prev * (1.0 + 1e-9) && res > 1e-14 * std::abs(rhs0)) e.monotone = false;
      prev = res;
      if (step <= opts.rel_tol * std::abs(lam)) {
        e.converged = true;
        break;
      }
    }
    if (q.corrections.empty()) e.converged = true;
    e.value = lam;
    e.residual = residual(lam);
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subdominant solutions of -y'' + lambda^2 P y = 0

/// m * exp(log_scale); keeps values representable across large growth.
struct ScaledComplex {
  cplx mantissa;
  double log_scale = 0.0;
};

/// Pair (y, y') for the second-order ODE.
struct OdeState {
  cplx v[2];
  cplx operator[](int k) const { return v[k]; }
  double norm() const { return std::max(std::abs(v[0]), std::abs(v[1])); }
  friend OdeState operator+(const OdeState& a, const OdeState& b) { return {{a.v[0] + b.v[0], a.v[1] + b.v[1]}}; }
  friend OdeState operator-(const OdeState& a, const OdeState& b) { return {{a.v[0] - b.v[0], a.v[1] - b.v[1]}}; }
  friend OdeState operator*(double c, const OdeState& a) { return {{c * a.v[0], c * a.v[1]}}; }
};

struct SubdominantOptions {
  double rtol = 1e-10;
  double max_steps = 2e6;
};

struct SubdominantSolution {
  int sector = -1;
  double direction = 0.0;  // angle of the integration ray
  cplx start;              // normalization point R e^{i direction}, y(start) = 1
  cplx match;
  /// y and y' at the match point, sharing one scale factor.
  cplx y, dy;
  double log_scale = 0.0;
  int steps = 0;
  /// |y| grows monotonically over the first (outer) half of the inward integration.
  bool decays_outward = true;
};

/// Default initialization radius: R_escape shrunk by max(1, |lambda|)^{-2/(d+2)}.
inline double default_wkb_radius(const Potential& pot, cplx lambda) {
  const double base = 10.0 * (1.0 + pot.turning_points.max_modulus());
  return base * std::pow(std::max(1.0, std::abs(lambda)), -2.0 / (pot.degree() + 2));
}

/// The solution decaying along sector `sector` of P (sector centers follow
/// lambda: they turn by -2 arg(lambda)/(d+2)). It is started from the WKB form
/// at R e^{i theta} and integrated straight to `match`.
inline SubdominantSolution subdominant_solution(const Potential& pot, cplx lambda, int sector, double R,
                                                cplx match = 0.0, const SubdominantOptions& opts = {}) {
  const int d = pot.degree();
  if (d < 1) throw Error(ErrorKind::Precondition, "degree must be at least 1");
  if (lambda == cplx{0.0, 0.0}) throw Error(ErrorKind::Domain, "lambda must be nonzero");
  const auto sectors = stokes_sectors(pot.poly);
  if (sector < 0 || sector >= sectors.size()) throw Error(ErrorKind::Precondition, "sector index out of range");
  if (!(R > pot.turning_points.max_modulus())) throw Error(ErrorKind::Precondition, "R must exceed all turning points");

  SubdominantSolution sol;
  sol.sector = sector;
  sol.direction = sectors.sectors[static_cast<std::size_t>(sector)].center - 2.0 * std::arg(lambda) / (d + 2);
  const cplx u = std::polar(1.0, sol.direction);
  sol.start = R * u;
  sol.match = match;

  const auto der = pot.poly.evaluate_derivatives(sol.start);
  cplx q = lambda * std::sqrt(der.value);
  if (std::real(q * u) < 0.0) q = -q;
  OdeState y{{cplx{1.0, 0.0}, -q - der.first / (4.0 * der.value)}};
  double log_scale = 0.0;

  const cplx span = match - sol.start;
  const double len = std::abs(span);
  const cplx lam2 = lambda * lambda;
  auto rhs = [&](double tau, const OdeState& s) {
    const cplx z = sol.start + tau * span;
    return OdeState{{span * s[1], span * lam2 * pot(z) * s[0]}};
  };

  double tau = 0.0;
  double h = 1e-3 / (1.0 + std::abs(lambda) * std::sqrt(std::abs(der.value)) * len);
  double prev_abs_log = std::log(std::abs(y[0]));
  int steps = 0;
  while (tau < 1.0) {
    if (steps > opts.max_steps) throw Error(ErrorKind::Convergence, "subdominant integration exceeded step budget");
    h = std::min(h, 1.0 - tau);
    OdeState err;
    const OdeState y5 = dopri5_step_t(rhs, tau, y, h, err);
    const double ratio = err.norm() / (opts.rtol * std::max(y.norm(), y5.norm()));
    ++steps;
    if (!(ratio <= 1.0)) {
      h *= std::isfinite(ratio) ? std::max(0.2, step_factor(ratio)) : 0.2;
      continue;
    }
    tau += h;
    y = y5;
    h *= step_factor(ratio);
    // projective renormalization
    const double m = y.norm();
    if (m > 1e50 || m < 1e-50) {
      y = (1.0 / m) * y;
      log_scale += std::log(m);
    }
    if (tau <= 0.5) {
      const double abs_log = std::log(std::abs(y[0]) + 1e-300) + log_scale;
      if (abs_log < prev_abs_log - 1e-9) sol.decays_outward = false;
      prev_abs_log = abs_log;
    }
  }
  sol.y = y[0];
  sol.dy = y[1];
  sol.log_scale = log_scale;
  sol.steps = steps;
  return sol;
}

/// W = y1 y2' - y1' y2 at the common match point.
inline ScaledComplex wronskian(const SubdominantSolution& a, const SubdominantSolution& b) {
  return {a.y * b.dy - a.dy * b.y, a.log_scale + b.log_scale};
}

struct Rectangle {
  double re_min, re_max, im_min, im_max;
};

struct WronskianSearchOptions {
  SubdominantOptions ode;
  /// Fixed initialization radius for the whole search; <= 0 picks the default
  /// radius at the largest |lambda| of the rectangle.
  double radius = 0.0;
  cplx match = 0.0;
  int max_depth = 8;
  double newton_tol = 1e-12;
};

/// W(lambda) for a fixed sector pair, cached by lambda.
class WronskianFunction {
 public:
  WronskianFunction(const Potential& pot, int sector_a, int sector_b, double radius, cplx match,
                    SubdominantOptions ode)
      : pot_(pot), sa_(sector_a), sb_(sector_b), radius_(radius), match_(match), ode_(ode) {}

  ScaledComplex operator()(cplx lambda) {
    const auto key = std::make_pair(lambda.real(), lambda.imag());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto y1 = subdominant_solution(pot_, lambda, sa_, radius_, match_, ode_);
    const auto y2 = subdominant_solution(pot_, lambda, sb_, radius_, match_, ode_);
    const auto w = wronskian(y1, y2);
    cache_.emplace(key, w);
    return w;
  }

  std::size_t evaluations() const { return cache_.size(); }

 private:
  Potential pot_;
  int sa_, sb_;
  double radius_;
  cplx match_;
  SubdominantOptions ode_;
  std::map<std::pair<double, double>, ScaledComplex> cache_;
};

namespace detail {

inline double phase_step(const ScaledComplex& a, const ScaledComplex& b) { return std::arg(b.mantissa / a.mantissa); }

/// Winding of W along the segment a -> b, refining until phase steps are small.
/// Returns false if W looks like it vanishes on the segment.
inline bool segment_winding(WronskianFunction& w, cplx a, cplx b, double& total, int depth = 0) {
  const auto wa = w(a), wb = w(b);
  if (wa.mantissa == cplx{0.0, 0.0} || wb.mantissa == cplx{0.0, 0.0}) return false;
  const double step = phase_step(wa, wb);
  if (std::abs(step) < pi / 4) {
    total += step;
    return true;
  }
  if (depth > 14) return false;
  const cplx m = 0.5 * (a + b);
  return segment_winding(w, a, m, total, depth + 1) && segment_winding(w, m, b, total, depth + 1);
}

inline bool cell_winding(WronskianFunction& w, const Rectangle& r, int& winding) {
  const std::array<cplx, 5> corners = {cplx(r.re_min, r.im_min), cplx(r.re_max, r.im_min), cplx(r.re_max, r.im_max),
                                       cplx(r.re_min, r.im_max), cplx(r.re_min, r.im_min)};
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    // four sub-samples per edge before adaptive refinement
    for (int j = 0; j < 4; ++j) {
      const cplx a = corners[k] + (corners[k + 1] - corners[k]) * (j / 4.0);
      const cplx b = corners[k] + (corners[k + 1] - corners[k]) * ((j + 1) / 4.0);
      if (!segment_winding(w, a, b, total)) return false;
    }
  }
  const double turns = total / (2 * pi);
  winding = static_cast<int>(std::lround(turns));
  return std::abs(turns - winding) < 0.05;
}

}  // namespace detail

struct WronskianSearchResult {
  std::vector<cplx> zeros;
  std::size_t evaluations = 0;
  int jitters = 0;
};

/// Zeros of W(lambda) inside the rectangle: argument principle on a grid of
/// cells, subdividing until each holds at most one zero, then Newton.
inline WronskianSearchResult wronskian_eigenvalue_search(const Potential& pot, int sector_a, int sector_b,
                                                         const Rectangle& rect, int nx = 8, int ny = 1,
                                                         const WronskianSearchOptions& opts = {}) {
  const int ns = pot.degree() + 2;
  if (sector_a == sector_b || (sector_a - sector_b + ns) % ns == 1 || (sector_b - sector_a + ns) % ns == 1)
    throw Error(ErrorKind::Precondition, "sectors must be non-adjacent");
  if (!(rect.re_max > rect.re_min && rect.im_max > rect.im_min) || nx < 1 || ny < 1)
    throw Error(ErrorKind::Precondition, "empty search rectangle");
  double lam_max = 0.0;
  for (cplx c : {cplx(rect.re_min, rect.im_min), cplx(rect.re_max, rect.im_min), cplx(rect.re_min, rect.im_max),
                 cplx(rect.re_max, rect.im_max)})
    lam_max = std::max(lam_max, std::abs(c));
  const double R = opts.radius > 0.0 ? opts.radius : default_wkb_radius(pot, lam_max);
  WronskianFunction w(pot, sector_a, sector_b, R, opts.match, opts.ode);

  WronskianSearchResult res;
  std::vector<std::pair<Rectangle, int>> work;
  const double dx = (rect.re_max - rect.re_min) / nx, dy = (rect.im_max - rect.im_min) / ny;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      work.push_back({{rect.re_min + i * dx, rect.re_min + (i + 1) * dx, rect.im_min + j * dy,
                       rect.im_min + (j + 1) * dy},
                      0});

  auto newton = [&](cplx lam, const Rectangle& cell) -> std::optional<cplx> {
    const double h = 1e-6 * (1.0 + std::abs(lam));
    for (int it = 0; it < 60; ++it) {
      const auto f0 = w(lam), fp = w(lam + h), fm = w(lam - h);
      const cplx rp = fp.mantissa / f0.mantissa * std::exp(fp.log_scale - f0.log_scale);
      const cplx rm = fm.mantissa / f0.mantissa * std::exp(fm.log_scale - f0.log_scale);
      const cplx dlog = (rp - rm) / (2.0 * h);  // W'/W
      const cplx step = 1.0 / dlog;
      lam -= step;
      if (std::abs(step) < opts.newton_tol * (1.0 + std::abs(lam))) {
        const double mx = 0.1 * (cell.re_max - cell.re_min), my = 0.1 * (cell.im_max - cell.im_min);
        if (lam.real() < cell.re_min - mx || lam.real() > cell.re_max + mx || lam.imag() < cell.im_min - my ||
            lam.imag() > cell.im_max + my)
          return std::nullopt;
        return lam;
      }
    }
    return std::nullopt;
  };

  while (!work.empty()) {
    auto [cell, depth] = work.back();
    work.pop_back();
    int wn = 0;
    const bool ok = detail::cell_winding(w, cell, wn);
    auto split = [&](double fx, double fy) {
      const double xm = cell.re_min + fx * (cell.re_max - cell.re_min);
      const double ym = cell.im_min + fy * (cell.im_max - cell.im_min);
      work.push_back({{cell.re_min, xm, cell.im_min, ym}, depth + 1});
      work.push_back({{xm, cell.re_max, cell.im_min, ym}, depth + 1});
      work.push_back({{cell.re_min, xm, ym, cell.im_max}, depth + 1});
      work.push_back({{xm, cell.re_max, ym, cell.im_max}, depth + 1});
    };
    if (!ok) {
      // a zero on (or very near) the boundary: shift the cell edges and retry
      ++res.jitters;
      if (depth >= opts.max_depth) throw Error(ErrorKind::Convergence, "argument principle failed to resolve a cell");
      const Rectangle grown{cell.re_min - 0.013 * (cell.re_max - cell.re_min), cell.re_max + 0.011 * (cell.re_max - cell.re_min),
                            cell.im_min - 0.017 * (cell.im_max - cell.im_min), cell.im_max + 0.007 * (cell.im_max - cell.im_min)};
      work.push_back({grown, depth + 1});
      continue;
    }
    if (wn <= 0) continue;
    if (wn == 1) {
      const cplx center(0.5 * (cell.re_min + cell.re_max), 0.5 * (cell.im_min + cell.im_max));
      if (auto z = newton(center, cell)) {
        const bool dup = std::any_of(res.zeros.begin(), res.zeros.end(),
                                     [&](cplx x) { return std::abs(x - *z) < 1e-6 * (1.0 + std::abs(x)); });
        if (!dup) res.zeros.push_back(*z);
        continue;
      }
    }
    if (depth >= opts.max_depth) throw Error(ErrorKind::Convergence, "could not isolate zeros of the Wronskian");
    split(0.5, 0.5);
  }
  std::sort(res.zeros.begin(), res.zeros.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  res.evaluations = w.evaluations();
  return res;
}

}  // namespace stokes
