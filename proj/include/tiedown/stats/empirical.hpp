#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../numeric.hpp"

namespace tiedown {

/// Weighted samples of a fixed-dimension vector.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::size_t dims = 1) : dims_(dims) {
    if (dims == 0) throw InvalidParameter("empirical distribution needs dims >= 1");
  }

  void add(std::span<const double> value, double weight = 1.0) {
    if (value.size() != dims_) throw DimensionError("sample has " + std::to_string(value.size()) + " coordinates");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidParameter("sample weights must be finite and >= 0");
    values_.insert(values_.end(), value.begin(), value.end());
    weights_.push_back(weight);
    total_.add(weight);
  }

  void append(const EmpiricalDistribution& other) {
    if (other.dims_ != dims_) throw DimensionError("cannot merge distributions of different dimension");
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    weights_.insert(weights_.end(), other.weights_.begin(), other.weights_.end());
    total_.merge(other.total_);
  }

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return weights_.size(); }
  double total_weight() const { return total_.value(); }
  double value(std::size_t i, std::size_t coord) const { return values_[i * dims_ + coord]; }
  std::span<const double> sample(std::size_t i) const { return {values_.data() + i * dims_, dims_}; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// (value, weight) pairs of one coordinate, sorted by value.
  std::vector<std::pair<double, double>> projection(std::size_t coord) const {
    if (coord >= dims_) throw DimensionError("projection onto coordinate " + std::to_string(coord));
    std::vector<std::pair<double, double>> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = {value(i, coord), weights_[i]};
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Self-normalized weighted mean of f over the samples.
  double mean(const std::function<double(std::span<const double>)>& f) const {
    check_nonempty();
    CompensatedSum s;
    for (std::size_t i = 0; i < size(); ++i) s.add(weights_[i] * f(sample(i)));
    return s.value() / total_weight();
  }

  void check_nonempty() const {
    if (size() == 0 || !(total_weight() > 0.0)) throw EmptyDistribution("no samples with positive weight");
  }

 private:
  std::size_t dims_;
  std::vector<double> values_;
  std::vector<double> weights_;
  CompensatedSum total_;
};

/// Kolmogorov distance between the weighted ECDF of coordinate `coord` and
/// a continuous or step CDF. Both one-sided limits are compared at every
/// sample point.
inline double ks_distance(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf,
                          std::size_t coord = 0) {
  emp.check_nonempty();
  if (emp.size() < 10) throw PreconditionError("ks_distance needs at least 10 samples");
  const auto pts = emp.projection(coord);
  const double total = emp.total_weight();
  double worst = 0.0;
  CompensatedSum cum;
  for (std::size_t i = 0; i < pts.size();) {
    const double x = pts[i].first;
    const double below = cum.value() / total;
    while (i < pts.size() && pts[i].first == x) cum.add(pts[i++].second);
    const double at = std::min(1.0, cum.value() / total);
    worst = std::max(worst, std::abs(below - cdf(std::nextafter(x, -INFINITY))));
    worst = std::max(worst, std::abs(at - cdf(x)));
  }
  return worst;
}

/// sup |F_a - F_b| between two weighted ECDFs of one coordinate.
inline double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b, std::size_t coord_a = 0,
                            std::size_t coord_b = 0) {
  a.check_nonempty();
  b.check_nonempty();
  const auto pa = a.projection(coord_a), pb = b.projection(coord_b);
  const double ta = a.total_weight(), tb = b.total_weight();
  CompensatedSum ca, cb;
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < pa.size() || j < pb.size()) {
    double x = INFINITY;
    if (i < pa.size()) x = pa[i].first;
    if (j < pb.size()) x = std::min(x, pb[j].first);
    while (i < pa.size() && pa[i].first == x) ca.add(pa[i++].second);
    while (j < pb.size() && pb[j].first == x) cb.add(pb[j++].second);
    worst = std::max(worst, std::abs(ca.value() / ta - cb.value() / tb));
  }
  return worst;
}

/// Effective sample size (sum w)^2 / sum w^2 of a weighted sample.
inline double effective_size(const EmpiricalDistribution& emp) {
  CompensatedSum s2;
  for (std::size_t i = 0; i < emp.size(); ++i) s2.add(emp.weight(i) * emp.weight(i));
  const double t = emp.total_weight();
  return s2.value() > 0.0 ? t * t / s2.value() : 0.0;
}

inline double arcsine_cdf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 2.0 / pi * std::asin(std::sqrt(t));
}

inline double uniform_cdf(double t) { return std::clamp(t, 0.0, 1.0); }

}  // namespace tiedown
