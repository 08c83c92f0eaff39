#pragma once

// Interval maps with indifferent fixed points. Points are carried as
// (distance to the nearest endpoint, side) so that iterates creeping towards
// x = 1 keep full relative precision, just like those near x = 0.

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "../error.hpp"

namespace tiedown {

/// x = s on the lower half, x = 1 - s on the upper half; 0 <= s <= 1/2.
struct MapPoint {
  double s = 0.0;
  bool upper = false;

  double x() const { return upper ? 1.0 - s : s; }

  static MapPoint from_x(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point " + std::to_string(x) + " outside [0,1]");
    return x > 0.5 ? MapPoint{1.0 - x, true} : MapPoint{x, false};
  }
};

namespace detail {

/// Re-expresses a value v in [0,1], given either as v itself (lower) or as
/// 1 - v (upper), in canonical MapPoint form.
inline MapPoint canonical(double low, double high) {
  // low = v, high = 1 - v, both computed accurately by the caller.
  return low <= 0.5 ? MapPoint{low, false} : MapPoint{high, true};
}

inline double clamp_escape(double v, const char* what) {
  if (v < 0.0) {
    if (v < -1e-12) throw NumericalEscape(std::string(what) + " = " + std::to_string(v));
    return 0.0;
  }
  return v;
}

}  // namespace detail

/// f(x) = x(1-x)/(1-x-x^2) on [0,1/2], 1 - f(1-x) on (1/2,1]; conjugate to
/// Boole's transformation t -> t - 1/t through t = 1/(1-x) - 1/x.
class BooleMap {
 public:
  std::string name() const { return "boole"; }
  std::size_t dim() const { return 2; }
  double alpha() const { return 0.5; }
  std::vector<double> breaks() const { return {0.5}; }
  std::vector<double> fixed_points() const { return {0.0, 1.0}; }
  std::vector<double> tangency() const { return {1.0, 1.0}; }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("Boole map evaluated at " + std::to_string(x));
    if (x <= 0.5) return x * (1.0 - x) / (1.0 - x - x * x);
    const double y = 1.0 - x;
    return 1.0 - y * (1.0 - y) / (1.0 - y - y * y);
  }

  /// Uses f(1 - x) = 1 - f(x); 1 - f(s) = (1 - 2s)/(1 - s - s^2). Written
  /// without branches so that several orbits can be interleaved.
  MapPoint step(MapPoint p) const {
    const double s = p.s;
    const double inv = 1.0 / (1.0 - s - s * s);
    const double fs = s * (1.0 - s) * inv;
    const double complement = (1.0 - 2.0 * s) * inv;
    const bool flip = fs > 0.5;
    return {flip ? complement : fs, p.upper != flip};
  }

  /// Inverse of branch j (0 or 1) at y in [0,1].
  double inverse(std::size_t j, double y) const {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("inverse branch at " + std::to_string(y));
    const double x = 2.0 * y / ((1.0 + y) + std::sqrt(1.0 - 2.0 * y + 5.0 * y * y));
    return j == 0 ? x : 1.0 - inverse(0, 1.0 - y);
  }
};

/// Thaler map with polynomial tangency: branch j on [e_{j-1}, e_j] is
/// x + c_j sgn(x - x_j) |x - x_j|^(1 + 1/alpha), mapping onto [0,1], with
/// x_1 = 0, x_d = 1 and interior fixed points placed so both ends match.
class PolynomialMap {
 public:
  PolynomialMap(double alpha, std::vector<double> breaks) : alpha_(alpha), p_(1.0 + 1.0 / alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("map alpha must lie in (0,1)");
    if (breaks.empty()) throw InvalidParameter("a Thaler map needs at least one interior break");
    edges_.push_back(0.0);
    for (double b : breaks) {
      if (!(b > edges_.back() && b < 1.0)) throw InvalidParameter("breaks must increase strictly inside (0,1)");
      edges_.push_back(b);
    }
    edges_.push_back(1.0);
    const std::size_t d = edges_.size() - 1;
    for (std::size_t j = 0; j < d; ++j) {
      const double a = edges_[j], b = edges_[j + 1];
      double xj;
      if (j == 0)
        xj = 0.0;
      else if (j + 1 == d)
        xj = 1.0;
      else {
        // a / (x - a)^p = (1 - b) / (b - x)^p; the log difference decreases in x.
        double lo = a, hi = b;
        for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double g = std::log(a) - p_ * std::log(mid - a) - std::log(1.0 - b) + p_ * std::log(b - mid);
          (g > 0.0 ? lo : hi) = mid;
        }
        xj = 0.5 * (lo + hi);
      }
      fixed_.push_back(xj);
      const double dl = xj - a, dr = b - xj;
      // f(a) = 0 and f(b) = 1; use whichever side is nondegenerate.
      c_.push_back(dl > 0.0 ? a / std::pow(dl, p_) : (1.0 - b) / std::pow(dr, p_));
    }
  }

  std::string name() const { return "polynomial"; }
  std::size_t dim() const { return edges_.size() - 1; }
  double alpha() const { return alpha_; }
  std::vector<double> breaks() const { return {edges_.begin() + 1, edges_.end() - 1}; }
  const std::vector<double>& edges() const { return edges_; }
  std::vector<double> fixed_points() const { return fixed_; }
  std::vector<double> tangency() const { return c_; }

  std::size_t branch_of(double x) const {
    std::size_t j = 0;
    while (j + 1 < dim() && x > edges_[j + 1]) ++j;
    return j;
  }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("map evaluated at " + std::to_string(x));
    return step(MapPoint::from_x(x)).x();
  }

  MapPoint step(MapPoint pt) const {
    const double x = pt.x();
    const std::size_t j = branch_of(x);
    const double a = edges_[j], b = edges_[j + 1];
    // Distances to the branch ends, exact where the endpoint is 0 or 1.
    const double dl = pt.upper ? (1.0 - a) - pt.s : pt.s - a;
    const double dr = pt.upper ? pt.s - (1.0 - b) : b - pt.s;
    const double xj = fixed_[j];
    const double left = xj - a, right = b - xj;
    const double u = j == 0 ? dl : (j + 1 == dim() ? -dr : dl - left);
    // f - 0 = dl + c (g(u) + left^p), 1 - f = dr + c (right^p - g(u)), g(u) = sgn(u)|u|^p.
    const double low = dl + c_[j] * power_gap(left, -u);
    const double high = dr + c_[j] * power_gap(right, u);
    return detail::canonical(detail::clamp_escape(low, "iterate"), detail::clamp_escape(high, "iterate"));
  }

  /// Inverse of branch j at y, by bisection.
  double inverse(std::size_t j, double y) const {
    if (j >= dim()) throw DomainError("branch index");
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("inverse branch at " + std::to_string(y));
    double lo = edges_[j], hi = edges_[j + 1];
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (value(j, mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  /// m^p - sgn(v)|v|^p for m >= 0, accurate when v is close to m.
  double power_gap(double m, double v) const {
    if (v <= 0.0) return std::pow(m, p_) + std::pow(-v, p_);
    if (m == 0.0) return -std::pow(v, p_);
    return -std::pow(m, p_) * std::expm1(p_ * std::log(v / m));
  }

  double value(std::size_t j, double x) const {
    const double u = x - fixed_[j];
    return x + c_[j] * (u < 0 ? -std::pow(-u, p_) : std::pow(u, p_));
  }

  double alpha_, p_;
  std::vector<double> edges_, fixed_, c_;
};

using MapModel = std::variant<BooleMap, PolynomialMap>;

inline std::size_t map_dim(const MapModel& m) {
  return std::visit([](const auto& f) { return f.dim(); }, m);
}
inline double map_alpha(const MapModel& m) {
  return std::visit([](const auto& f) { return f.alpha(); }, m);
}
inline std::string map_name(const MapModel& m) {
  return std::visit([](const auto& f) { return f.name(); }, m);
}
inline double map_apply(const MapModel& m, double x) {
  return std::visit([x](const auto& f) { return f(x); }, m);
}
inline double map_inverse(const MapModel& m, std::size_t j, double y) {
  return std::visit([&](const auto& f) { return f.inverse(j, y); }, m);
}
inline std::vector<double> map_edges(const MapModel& m) {
  auto b = std::visit([](const auto& f) { return f.breaks(); }, m);
  b.insert(b.begin(), 0.0);
  b.push_back(1.0);
  return b;
}

}  // namespace tiedown
