#pragma once

// Partition [0,1] = A_1 u ... u A_d u Y with x_j in A_j and
// f^-1(A_i) contained in A_i u Y.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../numeric.hpp"
#include "model.hpp"

namespace tiedown {

struct Partition {
  /// A_j = [lo[j], hi[j]] in x; Y is the rest.
  std::vector<double> lo, hi;
  /// The same bounds in the upper coordinate s = 1 - x: [1 - hi, 1 - lo].
  std::vector<double> ulo, uhi;
  /// Unnormalized mu-mass of Y, known in closed form for Boole only.
  std::optional<double> mu_Y;
  /// The 2-periodic point defining the partition when d = 2.
  std::optional<double> gamma;

  /// d = 2 with A_1 inside [0, 1/2] and A_2 inside [1/2, 1].
  bool split_halves = false;

  std::size_t dim() const { return lo.size(); }

  /// Cell index: j for A_j (0-based), dim() for Y.
  std::size_t cell(MapPoint p) const {
    if (split_halves) return p.upper ? (p.s <= uhi[1] ? 1 : 2) : (p.s <= hi[0] ? 0 : 2);
    for (std::size_t j = 0; j < lo.size(); ++j) {
      if (p.upper ? (p.s >= ulo[j] && p.s <= uhi[j]) : (p.s >= lo[j] && p.s <= hi[j])) return j;
    }
    return lo.size();
  }

  std::size_t cell_of_x(double x) const { return cell(MapPoint::from_x(x)); }

  /// Y as a list of closed intervals.
  std::vector<std::pair<double, double>> y;

  const std::vector<std::pair<double, double>>& y_intervals() const { return y; }

  double y_length() const {
    double t = 0;
    for (auto [a, b] : y_intervals()) t += b - a;
    return t;
  }
};

namespace detail {

inline void set_cell(Partition& p, std::size_t j, double lo, double hi, double one_minus_lo, double one_minus_hi) {
  p.lo[j] = lo;
  p.hi[j] = hi;
  p.ulo[j] = one_minus_hi;
  p.uhi[j] = one_minus_lo;
}

}  // namespace detail

/// Grid check of dynamical separation: no grid point of A_i may land in
/// A_j, j != i. Returns the number of violations.
inline std::size_t separation_violations(const MapModel& m, const Partition& part, std::size_t grid = 100000) {
  std::size_t bad = 0;
  for (std::size_t i = 1; i < grid; ++i) {
    const MapPoint p = MapPoint::from_x(static_cast<double>(i) / static_cast<double>(grid));
    const std::size_t from = part.cell(p);
    if (from == part.dim()) continue;
    const MapPoint q = std::visit([&](const auto& f) { return f.step(p); }, m);
    const std::size_t to = part.cell(q);
    if (to != part.dim() && to != from) ++bad;
  }
  return bad;
}

inline Partition build_partition(const MapModel& m, std::size_t check_grid = 100000) {
  const std::size_t d = map_dim(m);
  const auto edges = map_edges(m);
  Partition part;
  part.lo.assign(d, 0.0);
  part.hi.assign(d, 0.0);
  part.ulo.assign(d, 0.0);
  part.uhi.assign(d, 0.0);
  if (d == 2) {
    // gamma in J_1 with f_2(f_1(gamma)) = gamma; on [f_1^-1(e), e] the
    // function f^2(x) - x runs from -x to 1 - e.
    auto g = [&](double x) { return map_apply(m, map_apply(m, x)) - x; };
    double lo = map_inverse(m, 0, edges[1]), hi = edges[1];
    lo += 1e-9 * (hi - lo);  // f_1(lo) must land strictly inside J_2
    if (!(g(lo) < 0.0 && g(hi) > 0.0)) throw RootNotFound("2-periodic point bracket");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    const double gamma = 0.5 * (lo + hi);
    if (std::abs(g(gamma)) > 1e-11) throw RootNotFound("2-periodic point did not converge");
    const MapPoint fg = std::visit([&](const auto& f) { return f.step(MapPoint::from_x(gamma)); }, m);
    const double f_gamma = fg.x();
    const double one_minus_fg = fg.upper ? fg.s : 1.0 - fg.s;
    part.gamma = gamma;
    detail::set_cell(part, 0, 0.0, gamma, 1.0, 1.0 - gamma);
    detail::set_cell(part, 1, f_gamma, 1.0, one_minus_fg, 0.0);
    // Exclude the boundary points themselves from A so Y = [gamma, f(gamma)].
    part.hi[0] = std::nextafter(gamma, 0.0);
    part.uhi[1] = std::nextafter(one_minus_fg, 0.0);
    part.lo[1] = std::nextafter(f_gamma, 2.0);
    part.ulo[0] = std::nextafter(1.0 - gamma, 2.0);
    part.y = {{gamma, f_gamma}};
    part.split_halves = part.hi[0] <= 0.5 && part.lo[1] >= 0.5;
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      const double a = map_inverse(m, j, edges[j]);
      const double b = map_inverse(m, j, edges[j + 1]);
      detail::set_cell(part, j, j == 0 ? 0.0 : a, j + 1 == d ? 1.0 : b, 1.0 - (j == 0 ? 0.0 : a),
                       j + 1 == d ? 0.0 : 1.0 - b);
    }
    for (std::size_t j = 0; j + 1 < d; ++j) part.y.emplace_back(part.hi[j], part.lo[j + 1]);
  }
  if (std::holds_alternative<BooleMap>(m)) part.mu_Y = std::sqrt(2.0);
  if (check_grid > 0) {
    const std::size_t bad = separation_violations(m, part, check_grid);
    if (bad) throw PreconditionError("dynamical separation fails at " + std::to_string(bad) + " grid points");
  }
  return part;
}

/// Invariant density normalized so that mu(Y) = 1; closed form for Boole only.
inline double invariant_density(const MapModel& m, const Partition& part, double x) {
  if (!std::holds_alternative<BooleMap>(m))
    throw UnsupportedMap("no closed-form invariant density for map '" + map_name(m) + "'");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("invariant density is singular at the fixed points");
  const double y = 1.0 - x;
  return (1.0 / (x * x) + 1.0 / (y * y)) / part.mu_Y.value();
}

/// Boole coordinate t = 1/(1-x) - 1/x; mu is Lebesgue measure in t.
inline double boole_coordinate(double x) { return 1.0 / (1.0 - x) - 1.0 / x; }

/// Point with Boole coordinate t, in MapPoint form.
inline MapPoint boole_point(double t) {
  // x = 2 / (2 - t + sqrt(t^2 + 4)) and 1 - x = 2 / (2 + t + sqrt(t^2 + 4)).
  const double r = std::sqrt(t * t + 4.0);
  return t <= 0.0 ? MapPoint{2.0 / (2.0 - t + r), false} : MapPoint{2.0 / (2.0 + t + r), true};
}

}  // namespace tiedown
