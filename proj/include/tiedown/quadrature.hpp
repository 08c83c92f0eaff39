#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace tiedown {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

/// Globally adaptive Gauss–Kronrod (21-point) integration over the union of
/// the intervals [breaks[i], breaks[i+1]]. The panel with the largest error
/// estimate is bisected until the summed estimate drops below `abs_tol`.
/// Throws QuadratureError when `max_panels` is reached first.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breaks, double abs_tol,
                                    std::size_t max_panels = 200000) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double a, double b) {
    double err = 0.0;
    const double v = GK::integrate(f, a, b, 0, 0.0, &err);
    return Panel{a, b, v, err};
  };

  std::priority_queue<Panel> queue;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Panel p = eval(breaks[i], breaks[i + 1]);
    total_err += p.error;
    queue.push(p);
  }

  while (total_err > abs_tol && !queue.empty()) {
    if (queue.size() >= max_panels)
      throw QuadratureError("error estimate " + std::to_string(total_err) + " above tolerance " +
                            std::to_string(abs_tol) + " after " + std::to_string(queue.size()) + " panels");
    Panel p = queue.top();
    queue.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      // Panel cannot be split further in double precision; keep its estimate.
      throw QuadratureError("panel collapsed at " + std::to_string(p.a));
    }
    Panel left = eval(p.a, mid);
    Panel right = eval(mid, p.b);
    total_err += left.error + right.error - p.error;
    queue.push(left);
    queue.push(right);
  }

  // Sum the accepted panels in a fixed (sorted) order for reproducibility.
  std::vector<Panel> done;
  done.reserve(queue.size());
  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum value, error;
  for (const auto& p : done) {
    value.add(p.value);
    error.add(p.error);
  }
  return {value.value(), error.value(), done.size()};
}

template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, std::size_t max_panels = 200000) {
  const double br[2] = {a, b};
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(br, 2), abs_tol, max_panels);
}

}  // namespace tiedown
