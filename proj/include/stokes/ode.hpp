#pragma once

#include <array>
#include <cmath>

namespace stokes {

/// One Dormand-Prince 5(4) step of y' = f(t, y). `State` needs +, - and
/// multiplication by double. Returns the fifth-order solution and writes the
/// embedded error vector.
template <class State, class F>
State dopri5_step_t(F&& f, double t, const State& y, double h, State& error) {
  constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                   b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                   e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  const State k1 = f(t, y);
  const State k2 = f(t + c2 * h, y + h * (a21 * k1));
  const State k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const State k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = f(t + h, y5);
  error = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return y5;
}

/// Autonomous form, y' = f(y).
template <class State, class F>
State dopri5_step(F&& f, const State& y, double h, State& error) {
  return dopri5_step_t([&](double, const State& v) { return f(v); }, 0.0, y, h, error);
}

/// Standard step-size controller factor for a fifth-order pair.
inline double step_factor(double err_ratio) {
  if (err_ratio <= 0.0) return 5.0;
  double f = 0.9 * std::pow(err_ratio, -0.2);
  return f < 0.2 ? 0.2 : (f > 5.0 ? 5.0 : f);
}

}  // namespace stokes
