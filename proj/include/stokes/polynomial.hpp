#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "stokes/error.hpp"

namespace stokes {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

/// Wraps an angle into [0, period).
inline double wrap_positive(double a, double period) {
  double r = std::fmod(a, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

inline double wrap_2pi(double a) { return wrap_positive(a, 2.0 * pi); }
inline double wrap_pi(double a) { return wrap_positive(a, pi); }

/// Smallest absolute difference between two angles modulo `period`.
inline double angle_distance(double a, double b, double period = 2.0 * pi) {
  double r = wrap_positive(a - b, period);
  return std::min(r, period - r);
}

/// Complex polynomial a0 z^d + a1 z^(d-1) + ... + ad, optionally carrying a
/// rotation factor e^(2it).
///
/// The rotation is kept separate from the stored coefficients so that the
/// rotation family P_t = e^(2it) P shares its root computation with P exactly.
/// The rotation parameter is reduced to [0, pi) because e^(2it) has period pi.
class ComplexPolynomial {
 public:
  ComplexPolynomial() : base_{cplx{1.0, 0.0}} {}

  /// Coefficients ordered highest degree first.
  explicit ComplexPolynomial(std::vector<cplx> coeffs, double rotation = 0.0)
      : base_(std::move(coeffs)), rotation_(wrap_pi(rotation)) {
    if (base_.empty()) throw Error(ErrorKind::Domain, "polynomial needs at least one coefficient");
    if (base_.front() == cplx{0.0, 0.0})
      throw Error(ErrorKind::Domain, "leading coefficient must be nonzero");
    for (const auto& c : base_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw Error(ErrorKind::Domain, "non-finite coefficient");
  }

  int degree() const { return static_cast<int>(base_.size()) - 1; }

  /// Rotation parameter t of e^(2it), in [0, pi).
  double rotation() const { return rotation_; }

  cplx rotation_factor() const { return std::polar(1.0, 2.0 * rotation_); }

  /// Coefficients of the unrotated polynomial, highest first.
  const std::vector<cplx>& base_coefficients() const { return base_; }

  /// Effective coefficients e^(2it) * base, highest first.
  std::vector<cplx> coefficients() const {
    std::vector<cplx> out(base_);
    if (rotation_ != 0.0) {
      const cplx f = rotation_factor();
      for (auto& c : out) c *= f;
    }
    return out;
  }

  cplx leading() const { return base_.front() * rotation_factor(); }

  /// arg a0 of the effective polynomial, in (-pi, pi].
  double phi0() const { return wrap_angle(std::arg(base_.front()) + 2.0 * rotation_); }

  /// arg a0 without wrapping; continuous in the rotation parameter.
  double phi0_unwrapped() const { return std::arg(base_.front()) + 2.0 * rotation_; }

  cplx operator()(cplx z) const { return evaluate(z); }

  cplx evaluate(cplx z) const {
    cplx acc = base_.front();
    for (std::size_t k = 1; k < base_.size(); ++k) acc = acc * z + base_[k];
    return rotation_ == 0.0 ? acc : acc * rotation_factor();
  }

  struct Derivatives {
    cplx value;
    cplx first;
    cplx second;
  };

  /// P, P' and P'' at z by a single nested pass.
  Derivatives evaluate_derivatives(cplx z) const {
    cplx p = base_.front(), dp{0.0, 0.0}, ddp{0.0, 0.0};
    for (std::size_t k = 1; k < base_.size(); ++k) {
      ddp = ddp * z + 2.0 * dp;
      dp = dp * z + p;
      p = p * z + base_[k];
    }
    if (rotation_ != 0.0) {
      const cplx f = rotation_factor();
      p *= f;
      dp *= f;
      ddp *= f;
    }
    return {p, dp, ddp};
  }

  /// Sum |a_k| |z|^(d-k) of the unrotated coefficients; rounding-error scale of evaluate().
  double magnitude_bound(double r) const {
    double acc = std::abs(base_.front());
    for (std::size_t k = 1; k < base_.size(); ++k) acc = acc * r + std::abs(base_[k]);
    return acc;
  }

  /// k-th derivative, keeping the rotation.
  ComplexPolynomial derivative(int k = 1) const {
    if (k <= 0) return *this;
    const int d = degree();
    if (k > d) throw Error(ErrorKind::Domain, "derivative order exceeds degree");
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(d - k + 1));
    for (int i = 0; i <= d - k; ++i) {
      double f = 1.0;
      for (int j = 0; j < k; ++j) f *= static_cast<double>(d - i - j);
      out.push_back(base_[static_cast<std::size_t>(i)] * f);
    }
    return ComplexPolynomial(std::move(out), rotation_);
  }

  ComplexPolynomial rotated(double t) const { return ComplexPolynomial(base_, rotation_ + t); }

  ComplexPolynomial scaled(double c) const {
    if (!(c > 0.0)) throw Error(ErrorKind::Domain, "scale factor must be positive");
    std::vector<cplx> out(base_);
    for (auto& a : out) a *= c;
    return ComplexPolynomial(std::move(out), rotation_);
  }

 private:
  std::vector<cplx> base_;
  double rotation_ = 0.0;
};

/// P_t = e^(2it) P.
inline ComplexPolynomial rotate(const ComplexPolynomial& p, double t) { return p.rotated(t); }

/// Monic polynomial with the given roots (highest first), times `leading`.
inline ComplexPolynomial from_roots(const std::vector<cplx>& roots, cplx leading = 1.0) {
  std::vector<cplx> c{leading};
  for (const auto& r : roots) {
    c.push_back(0.0);
    for (std::size_t k = c.size() - 1; k > 0; --k) c[k] -= r * c[k - 1];
  }
  return ComplexPolynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// Stokes sectors

struct StokesSector {
  double center;
  double half_width;
};

/// d+2 open sectors at infinity, sorted by center angle in [0, 2pi).
/// ray_angles[j] separates sectors j and j+1 (cyclically).
struct StokesSectorSet {
  std::vector<StokesSector> sectors;
  std::vector<double> ray_angles;

  int size() const { return static_cast<int>(sectors.size()); }

  /// Index of the ray closest in angle to `angle`.
  int nearest_ray(double angle) const {
    const int n = size();
    const double step = 2.0 * pi / n;
    const double k = std::round((angle - ray_angles.front()) / step);
    return static_cast<int>(wrap_positive(k, n));
  }

  bool operator==(const StokesSectorSet& other) const {
    if (sectors.size() != other.sectors.size()) return false;
    for (std::size_t j = 0; j < sectors.size(); ++j)
      if (sectors[j].center != other.sectors[j].center ||
          sectors[j].half_width != other.sectors[j].half_width ||
          ray_angles[j] != other.ray_angles[j])
        return false;
    return true;
  }
};

/// Sectors are built from the asymptotic ray directions
/// (pi(2k+1) - phi0)/(d+2), the directions where Re of the integral of
/// sqrt(P) stays bounded; sector centers lie half way between rays.
inline StokesSectorSet stokes_sectors(const ComplexPolynomial& p) {
  const int d = p.degree();
  if (d < 1) throw Error(ErrorKind::Precondition, "stokes_sectors needs degree >= 1");
  const int n = d + 2;
  const double step = 2.0 * pi / n;
  const double c0 = wrap_positive(-p.phi0() / n, step);
  StokesSectorSet out;
  out.sectors.reserve(static_cast<std::size_t>(n));
  out.ray_angles.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    out.sectors.push_back({c0 + step * j, pi / n});
    out.ray_angles.push_back(c0 + step * j + 0.5 * step);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format: comma separated coefficients, highest degree first; each
// coefficient is "re", "re+imi", "re-imi" or "imi".

namespace detail {

inline double parse_real(std::string_view s, std::string_view whole) {
  if (s.empty()) throw Error(ErrorKind::Parse, "empty number in '" + std::string(whole) + "'");
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorKind::Parse, "bad number '" + std::string(s) + "' in '" + std::string(whole) + "'");
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline cplx parse_coefficient(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw Error(ErrorKind::Parse, "empty coefficient");
  if (s.back() != 'i') return {detail::parse_real(s, text), 0.0};
  const std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not the leading one and not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](std::string_view im) {
    if (im == "+" || im.empty()) return 1.0;
    if (im == "-") return -1.0;
    return detail::parse_real(im, text);
  };
  if (split == std::string_view::npos) return {0.0, imag_of(body)};
  return {detail::parse_real(body.substr(0, split), text), imag_of(body.substr(split))};
}

inline ComplexPolynomial parse_polynomial(std::string_view text) {
  std::vector<cplx> coeffs;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view field =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    coeffs.push_back(parse_coefficient(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (coeffs.front() == cplx{0.0, 0.0}) throw Error(ErrorKind::Parse, "leading coefficient is zero");
  return ComplexPolynomial(std::move(coeffs));
}

}  // namespace stokes
