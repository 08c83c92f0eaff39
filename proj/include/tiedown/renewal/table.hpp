#pragma once

// Return-distribution tables {r00, r[j][n]} of a dynamically separated
// system: r[j][n] is the mass of excursions that spend exactly n steps in
// A_j before returning to Y (return time n + 1); r00 is the mass of
// immediate returns. Mass of excursions longer than the stored horizon is
// kept per branch in `overflow`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../numeric.hpp"

namespace tiedown {

/// Slowly varying factor ell(t): either a constant c or c * log(e + t)^p.
struct SlowVariation {
  enum class Kind { constant, log_power };
  Kind kind = Kind::constant;
  double c = 1.0;
  double p = 0.0;

  static SlowVariation constant(double c) { return {Kind::constant, c, 0.0}; }
  static SlowVariation log_power(double c, double p) { return {Kind::log_power, c, p}; }

  double operator()(double t) const {
    if (kind == Kind::constant) return c;
    return c * std::pow(std::log(std::numbers::e + t), p);
  }
};

class RenewalTable {
 public:
  RenewalTable() = default;

  /// Builds and checks a table. `r[j]` holds r[j][n] at index n (index 0 is
  /// ignored and must be 0) for n = 1..n_max. `overflow` may be empty.
  RenewalTable(double alpha, std::vector<double> beta, SlowVariation ell, double r00,
               std::vector<std::vector<double>> r, std::vector<double> overflow = {})
      : alpha_(alpha), beta_(std::move(beta)), ell_(ell), r00_(r00), r_(std::move(r)), overflow_(std::move(overflow)) {
    if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw InvalidParameter("table alpha must lie in (0,1)");
    if (beta_.empty() || r_.size() != beta_.size()) throw InvalidParameter("table needs one row per beta weight");
    if (overflow_.empty()) overflow_.assign(beta_.size(), 0.0);
    if (overflow_.size() != beta_.size()) throw InvalidParameter("overflow needs one entry per branch");
    n_max_ = static_cast<std::int64_t>(r_.front().size()) - 1;
    if (n_max_ < 1) throw InvalidParameter("table horizon must be at least 1");
    for (const auto& row : r_) {
      if (static_cast<std::int64_t>(row.size()) != n_max_ + 1) throw InvalidParameter("table rows differ in length");
      if (row[0] != 0.0) throw InvalidParameter("r[j][0] must be zero");
      for (double x : row)
        if (!(x >= 0.0)) throw InvalidParameter("table entries must be nonnegative");
    }
    if (!(r00_ >= 0.0)) throw InvalidParameter("r00 must be nonnegative");
    for (double x : overflow_)
      if (!(x >= 0.0)) throw InvalidParameter("overflow masses must be nonnegative");

    // Suffix sums, accumulated from the far end so small tails keep their
    // relative accuracy.
    branch_tail_.assign(dim(), std::vector<double>(n_max_ + 2, 0.0));
    return_tail_.assign(n_max_ + 2, 0.0);
    for (std::size_t j = 0; j < dim(); ++j) {
      CompensatedSum acc;
      acc.add(overflow_[j]);
      branch_tail_[j][n_max_ + 1] = acc.value();
      for (std::int64_t n = n_max_; n >= 1; --n) {
        acc.add(r_[j][n]);
        branch_tail_[j][n] = acc.value();
      }
      branch_tail_[j][0] = branch_tail_[j][1];
    }
    CompensatedSum total;
    total.add(r00_);
    for (std::size_t j = 0; j < dim(); ++j) total.add(branch_tail_[j][1]);
    total_mass_ = total.value();
    if (std::abs(total_mass_ - 1.0) > 1e-12)
      throw InvalidParameter("table mass must be 1, got " + std::to_string(total_mass_));
    for (std::int64_t t = 2; t <= n_max_ + 1; ++t) {
      CompensatedSum acc;
      for (std::size_t j = 0; j < dim(); ++j) acc.add(branch_tail_[j][t - 1]);
      return_tail_[t] = acc.value();
    }
    return_tail_[1] = 1.0;
    return_tail_[0] = 1.0;
  }

  double alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }
  const SlowVariation& ell() const { return ell_; }
  std::size_t dim() const { return beta_.size(); }
  std::int64_t n_max() const { return n_max_; }
  double r00() const { return r00_; }
  double r(std::size_t j, std::int64_t n) const { return n >= 1 && n <= n_max_ ? r_[j][n] : 0.0; }
  const std::vector<double>& row(std::size_t j) const { return r_[j]; }
  double overflow(std::size_t j) const { return overflow_[j]; }
  double total_mass() const { return total_mass_; }

  /// sum_{k >= n} r[j][k], including the overflow mass; n <= n_max + 1.
  double branch_tail(std::size_t j, std::int64_t n) const {
    if (n > n_max_ + 1) throw HorizonError("branch tail at " + std::to_string(n));
    return branch_tail_[j][std::max<std::int64_t>(n, 0)];
  }

  /// mu[Y and {phi >= t}] for integer t, using phi = n + 1 on the (j, n) cell
  /// and phi = 1 on the r00 cell.
  double return_tail(std::int64_t t) const {
    if (t > n_max_ + 1) throw HorizonError("return tail at " + std::to_string(t));
    return return_tail_[std::max<std::int64_t>(t, 0)];
  }

 private:
  double alpha_ = 0.5;
  std::vector<double> beta_;
  SlowVariation ell_;
  double r00_ = 0.0;
  std::int64_t n_max_ = 0;
  std::vector<std::vector<double>> r_;
  std::vector<double> overflow_;
  std::vector<std::vector<double>> branch_tail_;
  std::vector<double> return_tail_;
  double total_mass_ = 0.0;
};

/// Table with r[j][n] = beta_j ell(n) (n^-a - (n+1)^-a) for n <= n_max.
/// The mass beyond the horizon, beta_j ell(n_max+1) (n_max+1)^-a (exact for
/// constant ell, leading order otherwise), is kept as overflow. If the total
/// exceeds one everything is rescaled; otherwise the remainder goes to r00.
inline RenewalTable make_stable_table(double alpha, const std::vector<double>& beta, SlowVariation ell,
                                      std::int64_t n_max) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
  if (n_max < 64) throw InvalidParameter("stable tables need n_max >= 64");
  double bsum = 0.0;
  for (double b : beta) {
    if (!(b > 0.0 && b <= 1.0)) throw InvalidParameter("beta weights must lie in (0,1]");
    bsum += b;
  }
  if (beta.empty() || std::abs(bsum - 1.0) > 1e-12) throw InvalidParameter("beta weights must sum to 1");

  std::vector<std::vector<double>> r(beta.size(), std::vector<double>(n_max + 1, 0.0));
  std::vector<double> overflow(beta.size());
  CompensatedSum total;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    for (std::int64_t n = 1; n <= n_max; ++n) {
      const double nd = static_cast<double>(n);
      const double diff = -std::pow(nd, -alpha) * std::expm1(-alpha * std::log1p(1.0 / nd));
      r[j][n] = beta[j] * ell(nd) * diff;
      total.add(r[j][n]);
    }
    const double edge = static_cast<double>(n_max + 1);
    overflow[j] = beta[j] * ell(edge) * std::pow(edge, -alpha);
    total.add(overflow[j]);
  }
  double r00 = 1.0 - total.value();
  if (r00 < 0.0) {
    const double s = 1.0 / total.value();
    for (auto& row : r)
      for (double& x : row) x *= s;
    for (double& x : overflow) x *= s;
    CompensatedSum again;
    for (const auto& row : r)
      for (double x : row) again.add(x);
    for (double x : overflow) again.add(x);
    r00 = std::max(0.0, 1.0 - again.value());
  }
  return RenewalTable(alpha, beta, ell, r00, std::move(r), std::move(overflow));
}

/// b_t = 1 / (Gamma(1 - alpha) mu[Y and {phi >= [t]}]).
inline double scaling_b(const RenewalTable& t, double time) {
  if (!(time >= 1.0)) throw DomainError("scaling_b needs t >= 1");
  const double fl = std::floor(time);
  if (fl > static_cast<double>(t.n_max())) throw HorizonError("b_t at t = " + std::to_string(time));
  return 1.0 / (std::tgamma(1.0 - t.alpha()) * t.return_tail(static_cast<std::int64_t>(fl)));
}

/// a_k = min{n : b_n > k}; equivalently b_t <= k iff t < a_k.
inline std::int64_t scaling_a(const RenewalTable& t, std::int64_t k) {
  if (k < 1) throw DomainError("scaling_a needs k >= 1");
  const double kd = static_cast<double>(k);
  if (!(scaling_b(t, static_cast<double>(t.n_max())) > kd)) throw HorizonError("a_k for k = " + std::to_string(k));
  std::int64_t lo = 1, hi = t.n_max();  // b_hi > k
  if (scaling_b(t, 1.0) > kd) return 1;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (scaling_b(t, static_cast<double>(mid)) > kd)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// w(n) = Gamma(alpha) n / b_n.
inline double normalizer_w(const RenewalTable& t, std::int64_t n) {
  if (n < 1) throw DomainError("normalizer_w needs n >= 1");
  return std::tgamma(t.alpha()) * static_cast<double>(n) / scaling_b(t, static_cast<double>(n));
}

/// max over integers k in [b_{n/c}, b_{cn}) of |k / b_n - (a_k / n)^alpha|.
inline double scaling_discrepancy(const RenewalTable& t, std::int64_t n, double c = 2.0) {
  if (!(c > 1.0)) throw DomainError("scaling_discrepancy needs c > 1");
  const double nd = static_cast<double>(n);
  const double bn = scaling_b(t, nd);
  const double lo = scaling_b(t, std::max(1.0, nd / c));
  const double hi = scaling_b(t, c * nd);
  double worst = 0.0;
  for (auto k = static_cast<std::int64_t>(std::max(1.0, std::ceil(lo))); static_cast<double>(k) < hi; ++k) {
    const double ak = static_cast<double>(scaling_a(t, k));
    worst = std::max(worst, std::abs(static_cast<double>(k) / bn - std::pow(ak / nd, t.alpha())));
  }
  return worst;
}

}  // namespace tiedown
