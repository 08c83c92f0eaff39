#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "../error.hpp"

namespace tiedown {

/// Negated least-squares slope of log tail[n] against log n for n in
/// [first, last] (indices into `tail`).
inline double fit_tail_exponent(std::span<const double> tail, std::int64_t first, std::int64_t last) {
  if (first < 1 || last <= first || last >= static_cast<std::int64_t>(tail.size()))
    throw InvalidParameter("tail fit window [" + std::to_string(first) + ", " + std::to_string(last) + "]");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(last - first + 1);
  for (std::int64_t n = first; n <= last; ++n) {
    const double v = tail[static_cast<std::size_t>(n)];
    if (!(v > 0.0)) throw DomainError("tail value at n = " + std::to_string(n) + " is not positive");
    const double x = std::log(static_cast<double>(n)), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double xm = sx / m;
  return -(sxy - xm * sy) / (sxx - xm * sx);
}

/// Constant c in tail[n] ~ c n^-alpha: geometric mean of tail[n] n^alpha
/// over [first, last].
inline double fit_tail_constant(std::span<const double> tail, double alpha, std::int64_t first, std::int64_t last) {
  if (first < 1 || last < first || last >= static_cast<std::int64_t>(tail.size()))
    throw InvalidParameter("tail fit window [" + std::to_string(first) + ", " + std::to_string(last) + "]");
  double acc = 0.0;
  for (std::int64_t n = first; n <= last; ++n) {
    const double v = tail[static_cast<std::size_t>(n)];
    if (!(v > 0.0)) throw DomainError("tail value at n = " + std::to_string(n) + " is not positive");
    acc += std::log(v) + alpha * std::log(static_cast<double>(n));
  }
  return std::exp(acc / static_cast<double>(last - first + 1));
}

}  // namespace tiedown
