#pragma once

// One-sided alpha-stable laws with Laplace transform exp(-scale * lambda^alpha)
// and the Mittag-Leffler moments of xi^(-alpha).

#include <cfloat>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "quadrature.hpp"
#include "random.hpp"

namespace tiedown {

struct StableParams {
  double alpha = 0.5;
  double scale = 1.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("stable alpha must lie in (0,1), got " + std::to_string(alpha));
    if (!(scale > 0.0)) throw InvalidParameter("stable scale must be positive, got " + std::to_string(scale));
  }
};

/// E[exp(i s xi)] = exp(-|s|^a * scale * (cos(pi a/2) - i sgn(s) sin(pi a/2))).
inline std::complex<double> stable_cf(const StableParams& p, double s) {
  if (s == 0.0) return {1.0, 0.0};
  const double m = std::pow(std::abs(s), p.alpha) * p.scale;
  const double c = std::cos(pi * p.alpha / 2.0);
  const double sn = std::sin(pi * p.alpha / 2.0);
  const double sign = s > 0.0 ? 1.0 : -1.0;
  return std::exp(std::complex<double>(-m * c, m * sign * sn));
}

struct DensityOptions {
  double abs_tol = 1e-9;
  /// Integrand envelopes are cut where they fall below this level.
  double envelope_cut = 1e-12;
  /// Below this point the density is reported as 0.
  double y_floor = 1e-8;
};

namespace detail {

// Geometric breakpoints on (0, upper] refined so that no panel is wider than
// `max_width`; the geometric part resolves the u^alpha cusp at the origin.
inline std::vector<double> panel_breaks(double upper, double max_width) {
  std::vector<double> br{0.0};
  double x = upper * 1e-14;
  std::vector<double> geo;
  while (x < upper) {
    geo.push_back(x);
    x *= 2.0;
  }
  geo.push_back(upper);
  for (double g : geo) {
    const double last = br.back();
    const double width = g - last;
    const int pieces = width > max_width ? static_cast<int>(std::ceil(width / max_width)) : 1;
    for (int i = 1; i <= pieces; ++i) br.push_back(last + width * i / pieces);
  }
  return br;
}

}  // namespace detail

/// Continuous density psi(y) of the one-sided stable law, y >= 0.
///
/// Two exact representations of the Fourier inversion integral are used:
///  * direct:  psi(y) = (1/pi) int_0^S exp(-b c s^a) cos(b s_ s^a - s y) ds,
///    c = cos(pi a/2), s_ = sin(pi a/2), truncated at S where the envelope
///    exp(-b c S^a) reaches `envelope_cut`;
///  * rotated: the same integral with the contour turned onto the negative
///    imaginary axis, psi(y) = (1/pi) int_0^inf exp(-u y - b u^a cos(pi a))
///    sin(b u^a sin(pi a)) du, which decays like exp(-u y).
/// Whichever form has fewer oscillations over its range is integrated with
/// globally adaptive Gauss–Kronrod panels (the rotated form only when its
/// integrand does not grow by more than e^3 before decaying).
inline double stable_density(const StableParams& p, double y, const DensityOptions& opt = {}) {
  p.validate();
  if (!(y >= 0.0)) throw DomainError("stable density needs y >= 0, got " + std::to_string(y));
  if (y < opt.y_floor) return 0.0;

  const double a = p.alpha;
  const double b = p.scale;
  const double cut = -std::log(opt.envelope_cut);

  const double c_half = std::cos(pi * a / 2.0);
  const double s_half = std::sin(pi * a / 2.0);
  const double s_max = std::pow(cut / (b * c_half), 1.0 / a);
  const double cycles_direct = y * s_max / (2.0 * pi);

  const double c_full = std::cos(pi * a);
  const double s_full = std::sin(pi * a);
  // Largest exponent of the growing factor exp(b |cos(pi a)| u^a - u y).
  double peak = 0.0;
  if (c_full < 0.0) {
    const double g = -b * c_full;
    const double u_star = std::pow(a * g / y, 1.0 / (1.0 - a));
    peak = g * std::pow(u_star, a) - u_star * y;
  }
  // Upper limit where u y - max(0, -b cos(pi a)) u^a exceeds the cut.
  double u_max = (cut + peak + 1.0) / y;
  if (c_full < 0.0) {
    while (u_max * y + b * c_full * std::pow(u_max, a) < cut) u_max *= 2.0;
  }
  const double cycles_rotated = b * s_full * std::pow(u_max, a) / (2.0 * pi);

  double value;
  if (cycles_rotated < cycles_direct && peak < 3.0) {
    auto integrand = [=](double u) {
      if (u <= 0.0) return 0.0;
      const double ua = std::pow(u, a);
      return std::exp(-u * y - b * c_full * ua) * std::sin(b * s_full * ua);
    };
    const double width = cycles_rotated > 1.0 ? u_max / (4.0 * cycles_rotated) : u_max;
    const auto br = detail::panel_breaks(u_max, width);
    value = integrate_adaptive(integrand, br, opt.abs_tol * pi).value / pi;
  } else {
    auto integrand = [=](double s) {
      if (s <= 0.0) return 1.0;
      const double sa = std::pow(s, a);
      return std::exp(-b * c_half * sa) * std::cos(b * s_half * sa - s * y);
    };
    // Half a period of the e^{-isy} factor per panel (plus the phase drift
    // from the characteristic function near the origin, handled adaptively).
    const double width = y > 0.0 ? std::min(s_max, pi / y) : s_max;
    const auto br = detail::panel_breaks(s_max, width);
    value = integrate_adaptive(integrand, br, opt.abs_tol * pi).value / pi;
  }
  return value < 0.0 ? 0.0 : value;
}

/// Exact draw by Kanter's one-uniform-one-exponential representation:
/// S = sin(aU) / sin(U)^(1/a) * (sin((1-a)U) / E)^((1-a)/a), U ~ U(0,pi),
/// E ~ Exp(1), has Laplace transform exp(-lambda^a); returns scale^(1/a) S.
inline double stable_sample(const StableParams& p, Rng& rng) {
  const double a = p.alpha;
  const double u = pi * uniform_open(rng);
  const double e = exponential(rng);
  const double log_s = std::log(std::sin(a * u)) - std::log(std::sin(u)) / a +
                       (1.0 - a) / a * (std::log(std::sin((1.0 - a) * u)) - std::log(e));
  return std::exp(log_s + std::log(p.scale) / a);
}

/// n-th moment of xi^(-alpha) for xi with Laplace transform exp(-c lambda^a):
/// n! / (c^n Gamma(1 + n a)). Throws OverflowError once the value leaves the
/// double range (for c = 1, alpha = 1/2 that happens past n = 268).
inline double ml_moment(double alpha, double c, unsigned n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  if (n == 0) return 1.0;
  const double nd = static_cast<double>(n);
  const double log_value = std::lgamma(nd + 1.0) - nd * std::log(c) - std::lgamma(1.0 + nd * alpha);
  if (log_value > std::log(DBL_MAX)) throw OverflowError("Mittag-Leffler moment of order " + std::to_string(n));
  return std::exp(log_value);
}

}  // namespace tiedown
