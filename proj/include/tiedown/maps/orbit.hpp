#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../numeric.hpp"
#include "../random.hpp"
#include "model.hpp"
#include "partition.hpp"

namespace tiedown {

struct OrbitStats {
  std::vector<std::int64_t> s_a;  // visits to A_j at times 1..n
  std::int64_t s_y = 0;
  std::size_t final_cell = 0;     // j for A_j, d for Y
  std::int64_t n = 0;
  MapPoint final_point;
};

namespace detail {

template <class Map>
OrbitStats run_orbit(const Map& f, const Partition& part, MapPoint p, std::int64_t n) {
  OrbitStats st;
  st.n = n;
  const std::size_t d = part.dim();
  st.s_a.assign(d, 0);
  std::size_t c = d;
  for (std::int64_t t = 0; t < n; ++t) {
    p = f.step(p);
    c = part.cell(p);
    if (c == d)
      ++st.s_y;
    else
      ++st.s_a[c];
  }
  st.final_cell = c;
  st.final_point = p;
  return st;
}

/// Orbits advanced in lock step, `lanes` at a time. The per-step cost is
/// dominated by a division whose latency the interleaving hides.
inline constexpr std::size_t orbit_lanes = 8;

template <class Map>
void run_orbit_batch(const Map& f, const Partition& part, std::span<const MapPoint> start, std::int64_t n,
                     std::span<OrbitStats> out) {
  const std::size_t d = part.dim();
  for (std::size_t base = 0; base < start.size(); base += orbit_lanes) {
    const std::size_t w = std::min(orbit_lanes, start.size() - base);
    MapPoint p[orbit_lanes];
    std::size_t c[orbit_lanes];
    std::int64_t counts[orbit_lanes][8] = {};
    if (d + 1 > 8) {
      for (std::size_t i = 0; i < w; ++i) out[base + i] = run_orbit(f, part, start[base + i], n);
      continue;
    }
    for (std::size_t i = 0; i < orbit_lanes; ++i) {
      p[i] = start[base + std::min(i, w - 1)];
      c[i] = d;
    }
    for (std::int64_t t = 0; t < n; ++t) {
      for (std::size_t i = 0; i < orbit_lanes; ++i) {
        p[i] = f.step(p[i]);
        c[i] = part.cell(p[i]);
        ++counts[i][c[i]];
      }
    }
    for (std::size_t i = 0; i < w; ++i) {
      OrbitStats& st = out[base + i];
      st.n = n;
      st.s_a.assign(counts[i], counts[i] + d);
      st.s_y = counts[i][d];
      st.final_cell = c[i];
      st.final_point = p[i];
    }
  }
}

}  // namespace detail

inline OrbitStats simulate_orbit(const MapModel& m, const Partition& part, MapPoint x0, std::int64_t n) {
  if (n < 1) throw DomainError("orbit length must be >= 1");
  if (!(x0.s >= 0.0 && x0.s <= 0.5)) throw DomainError("point not in canonical form");
  return std::visit([&](const auto& f) { return detail::run_orbit(f, part, x0, n); }, m);
}

inline OrbitStats simulate_orbit(const MapModel& m, const Partition& part, double x0, std::int64_t n) {
  if (!(x0 > 0.0 && x0 < 1.0)) throw DomainError("orbit start must lie in (0,1)");
  return simulate_orbit(m, part, MapPoint::from_x(x0), n);
}

/// Initial distribution nu of the map experiments.
class InitialLaw {
 public:
  enum class Kind { uniform, mu_y, tabulated };

  /// Lebesgue measure on [a, b].
  static InitialLaw uniform(double a = 0.0, double b = 1.0) {
    if (!(a >= 0.0 && b <= 1.0 && a < b)) throw InvalidParameter("uniform initial law needs 0 <= a < b <= 1");
    InitialLaw l;
    l.kind_ = Kind::uniform;
    l.a_ = a;
    l.b_ = b;
    return l;
  }

  /// mu restricted to Y and normalized (Boole only, via t-coordinates).
  static InitialLaw mu_y(const MapModel& m, const Partition& part) {
    if (!std::holds_alternative<BooleMap>(m)) throw UnsupportedMap("mu|_Y sampling needs a closed-form density");
    InitialLaw l;
    l.kind_ = Kind::mu_y;
    l.a_ = boole_coordinate(part.gamma.value());
    l.b_ = -l.a_;
    return l;
  }

  /// Density on [0,1] tabulated as a cumulative on `panels` equal panels
  /// (midpoint masses), sampled by linear interpolation of the cumulative.
  static InitialLaw tabulated(const std::function<double(double)>& density, std::size_t panels = std::size_t{1} << 16) {
    if (panels < 2) throw InvalidParameter("need at least two panels");
    InitialLaw l;
    l.kind_ = Kind::tabulated;
    l.cdf_.assign(panels + 1, 0.0);
    const double h = 1.0 / static_cast<double>(panels);
    CompensatedSum acc;
    double prev = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
      const double v = density((static_cast<double>(i) + 0.5) * h);
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidParameter("initial density must be finite and >= 0");
      acc.add(v * h);
      l.cdf_[i + 1] = acc.value();
      if (i > 0) l.envelope_gap_ += std::abs(v - prev) * h;
      prev = v;
    }
    const double total = acc.value();
    if (!(total > 0.0) || std::abs(total - 1.0) > 1e-3)
      throw InvalidParameter("initial density integrates to " + std::to_string(total) + ", not 1");
    for (double& c : l.cdf_) c /= total;
    l.cdf_.back() = 1.0;
    return l;
  }

  Kind kind() const { return kind_; }

  /// Sum over panels of the jump between neighbouring midpoint values times
  /// the panel width: a bound on the gap between the upper and lower step
  /// envelopes of the tabulated density.
  double envelope_gap() const { return envelope_gap_; }

  MapPoint sample(Rng& rng) const {
    const double u = uniform_open(rng);
    switch (kind_) {
      case Kind::uniform:
        return MapPoint::from_x(a_ + (b_ - a_) * u);
      case Kind::mu_y:
        return boole_point(a_ + (b_ - a_) * u);
      case Kind::tabulated: {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf_.begin() - 1, 0,
                                                                           static_cast<std::ptrdiff_t>(cdf_.size() - 2)));
        const double width = cdf_[i + 1] - cdf_[i];
        const double frac = width > 0.0 ? (u - cdf_[i]) / width : 0.5;
        const double x = (static_cast<double>(i) + frac) / static_cast<double>(cdf_.size() - 1);
        return MapPoint::from_x(std::clamp(x, 0.0, 1.0));
      }
    }
    return {};
  }

 private:
  Kind kind_ = Kind::uniform;
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> cdf_;
  double envelope_gap_ = 0.0;
};

}  // namespace tiedown
