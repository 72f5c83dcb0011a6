#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace stokes {

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<std::complex<double>, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> k = fc * kronrod_weights[7];
  std::complex<double> g = fc * gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kronrod_nodes[static_cast<std::size_t>(j)];
    const std::complex<double> s = f(c - x) + f(c + x);
    k += kronrod_weights[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) g += gauss_weights[static_cast<std::size_t>(j / 2)] * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of a complex valued function of
/// a real variable. Panels with the largest error estimate are bisected until
/// the summed estimate drops below max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-12,
                           int max_panels = 4000) {
  struct Panel {
    double a, b;
    std::complex<double> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  std::priority_queue<Panel> heap;
  auto [v0, e0] = detail::gk15(f, a, b);
  heap.push({a, b, v0, e0});
  std::complex<double> total = v0;
  double err = e0;
  int panels = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && panels < max_panels) {
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b) {
      heap.push(p);
      break;
    }
    auto [vl, el] = detail::gk15(f, p.a, m);
    auto [vr, er] = detail::gk15(f, m, p.b);
    total += vl + vr - p.value;
    err += el + er - p.error;
    heap.push({p.a, m, vl, el});
    heap.push({m, p.b, vr, er});
    ++panels;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  std::complex<double> sum{0.0, 0.0};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, 15 * (2 * panels - 1)};
}

}  // namespace stokes
