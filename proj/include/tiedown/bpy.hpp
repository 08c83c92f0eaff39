#pragma once

// Barlow–Pitman–Yor generalized uniform law of (U_1, ..., U_d, W), realized
// through independent one-sided stable variables xi_j with scales beta_j,
// eta = sum_j xi_j, U_j = xi_j / eta, W = eta^(-alpha), reweighted by
// Gamma(1 + alpha) eta^(-alpha).

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "stable.hpp"
#include "stats/empirical.hpp"

namespace tiedown {

struct BpyParams {
  double alpha = 0.5;
  std::vector<double> beta{0.5, 0.5};

  std::size_t dim() const { return beta.size(); }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    if (beta.size() < 2) throw InvalidParameter("need at least two beta weights");
    double total = 0.0;
    for (double b : beta) {
      if (!(b > 0.0 && b < 1.0)) throw InvalidParameter("each beta_j must lie in (0,1)");
      total += b;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("beta weights must sum to 1, got " + std::to_string(total));
  }
};

struct BpyDraw {
  std::vector<double> u;
  double w = 0.0;
  double weight = 0.0;
};

/// Bounded test function g(u_1..u_d, w).
using BpyFunction = std::function<double(std::span<const double>, double)>;

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

inline BpyDraw bpy_draw(const BpyParams& p, Rng& rng) {
  BpyDraw d;
  d.u.resize(p.dim());
  double eta = 0.0;
  for (std::size_t j = 0; j < p.dim(); ++j) {
    d.u[j] = stable_sample({p.alpha, p.beta[j]}, rng);
    eta += d.u[j];
  }
  for (double& x : d.u) x /= eta;
  d.w = std::pow(eta, -p.alpha);
  d.weight = std::tgamma(1.0 + p.alpha) * d.w;
  return d;
}

/// m importance-weighted draws; the weights have mean one.
inline std::vector<BpyDraw> bpy_sample_weighted(const BpyParams& p, std::size_t m, Rng& rng) {
  p.validate();
  if (m == 0) throw InvalidParameter("need at least one draw");
  std::vector<BpyDraw> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(bpy_draw(p, rng));
  return out;
}

namespace detail {

struct MomentAccumulator {
  CompensatedSum sum, sum_sq;
  std::size_t n = 0;
  void add(double x) {
    sum.add(x);
    sum_sq.add(x * x);
    ++n;
  }
  void merge(const MomentAccumulator& o) {
    sum.merge(o.sum);
    sum_sq.merge(o.sum_sq);
    n += o.n;
  }
  McEstimate estimate() const {
    const double m = static_cast<double>(n);
    const double mean = sum.value() / m;
    const double var = std::max(0.0, sum_sq.value() / m - mean * mean) * m / std::max(1.0, m - 1.0);
    return {mean, std::sqrt(var / m), n};
  }
};

inline constexpr std::size_t bpy_chunk = 1 << 16;

}  // namespace detail

/// Monte Carlo estimate of E[g(U, W)]: mean of weight * g over m draws, with
/// its standard error. Work is split into chunks of 2^16 draws, each on its
/// own sub-stream of `par.seed`.
inline McEstimate bpy_expectation(const BpyParams& p, const BpyFunction& g, std::size_t m, const Parallelism& par) {
  p.validate();
  if (m < 1000) throw InvalidParameter("bpy_expectation needs m >= 1000");
  const std::size_t chunks = (m + detail::bpy_chunk - 1) / detail::bpy_chunk;
  auto parts = run_chunks(par, 0, chunks, [&](std::size_t c, Rng& rng) {
    detail::MomentAccumulator acc;
    const std::size_t begin = c * detail::bpy_chunk;
    const std::size_t end = std::min(m, begin + detail::bpy_chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const BpyDraw d = bpy_draw(p, rng);
      acc.add(d.weight * g(d.u, d.w));
    }
    return acc;
  });
  detail::MomentAccumulator total;
  for (const auto& part : parts) total.merge(part);
  return total.estimate();
}

/// Several expectations from one shared set of draws (same estimator as
/// bpy_expectation, but the functions are evaluated on common samples).
inline std::vector<McEstimate> bpy_expectations(const BpyParams& p, std::span<const BpyFunction> gs, std::size_t m,
                                                const Parallelism& par) {
  p.validate();
  if (m < 1000) throw InvalidParameter("bpy_expectations needs m >= 1000");
  const std::size_t chunks = (m + detail::bpy_chunk - 1) / detail::bpy_chunk;
  auto parts = run_chunks(par, 0, chunks, [&](std::size_t c, Rng& rng) {
    std::vector<detail::MomentAccumulator> acc(gs.size());
    const std::size_t begin = c * detail::bpy_chunk;
    const std::size_t end = std::min(m, begin + detail::bpy_chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const BpyDraw d = bpy_draw(p, rng);
      for (std::size_t k = 0; k < gs.size(); ++k) acc[k].add(d.weight * gs[k](d.u, d.w));
    }
    return acc;
  });
  std::vector<McEstimate> out;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    detail::MomentAccumulator total;
    for (const auto& part : parts) total.merge(part[k]);
    out.push_back(total.estimate());
  }
  return out;
}

/// P[U_1 <= t_1, ..., U_d <= t_d, W <= t_w] by self-normalized weighted
/// Monte Carlo (sum of weights on the event over the sum of all weights), so
/// the estimate is a distribution function in t: exactly 1 at the upper
/// corner. The standard error is the delta-method one.
/// Pass t_w = +infinity to leave W unconstrained.
inline McEstimate bpy_joint_cdf(const BpyParams& p, std::span<const double> t, double t_w, std::size_t m,
                                const Parallelism& par) {
  p.validate();
  if (t.size() != p.dim()) throw DimensionError("threshold vector has wrong length");
  if (m < 1000) throw InvalidParameter("bpy_joint_cdf needs m >= 1000");
  struct Sums {
    CompensatedSum w, wg, w2, wg2;
  };
  const std::size_t chunks = (m + detail::bpy_chunk - 1) / detail::bpy_chunk;
  auto parts = run_chunks(par, 0, chunks, [&](std::size_t c, Rng& rng) {
    Sums s;
    const std::size_t begin = c * detail::bpy_chunk;
    const std::size_t end = std::min(m, begin + detail::bpy_chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const BpyDraw d = bpy_draw(p, rng);
      bool in = d.w <= t_w;
      for (std::size_t j = 0; j < d.u.size() && in; ++j) in = d.u[j] <= t[j];
      const double g = in ? 1.0 : 0.0;
      s.w.add(d.weight);
      s.wg.add(d.weight * g);
      s.w2.add(d.weight * d.weight);
      s.wg2.add(d.weight * d.weight * g);
    }
    return s;
  });
  Sums tot;
  for (const auto& s : parts) {
    tot.w.merge(s.w);
    tot.wg.merge(s.wg);
    tot.w2.merge(s.w2);
    tot.wg2.merge(s.wg2);
  }
  const double md = static_cast<double>(m);
  const double P = tot.wg.value() / tot.w.value();
  // Var of w (g - P) per draw: E[w^2 g] (1 - 2P) + P^2 E[w^2] since g^2 = g.
  const double v = std::max(0.0, (tot.wg2.value() * (1.0 - 2.0 * P) + P * P * tot.w2.value()) / md);
  const double mean_w = tot.w.value() / md;
  return {std::clamp(P, 0.0, 1.0), std::sqrt(v / md) / mean_w, m};
}

/// m weighted draws as an empirical distribution over (u_1..u_d, w), with
/// the importance weights as sample weights.
inline EmpiricalDistribution bpy_empirical(const BpyParams& p, std::size_t m, const Parallelism& par) {
  p.validate();
  if (m == 0) throw InvalidParameter("need at least one draw");
  const std::size_t d = p.dim();
  const std::size_t chunks = (m + detail::bpy_chunk - 1) / detail::bpy_chunk;
  auto parts = run_chunks(par, 0, chunks, [&](std::size_t c, Rng& rng) {
    EmpiricalDistribution e(d + 1);
    const std::size_t begin = c * detail::bpy_chunk;
    const std::size_t end = std::min(m, begin + detail::bpy_chunk);
    std::vector<double> v(d + 1);
    for (std::size_t i = begin; i < end; ++i) {
      const BpyDraw dr = bpy_draw(p, rng);
      std::copy(dr.u.begin(), dr.u.end(), v.begin());
      v[d] = dr.w;
      e.add(v, dr.weight);
    }
    return e;
  });
  EmpiricalDistribution out(d + 1);
  for (const auto& e : parts) out.append(e);
  return out;
}

/// Exact E[W^q] = Gamma(1 + alpha) (q+1)! / Gamma(1 + (q+1) alpha).
inline double bpy_w_moment(double alpha, unsigned q) { return std::tgamma(1.0 + alpha) * ml_moment(alpha, 1.0, q + 1); }

/// Density of U_1 for alpha = 1/2, d = 2:
/// b1 b2 / 2 * (b1^2 (1-x) + b2^2 x)^(-3/2), b2 = 1 - b1.
inline double u1_density_half(double beta1, double x) {
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw InvalidParameter("beta1 must lie in (0,1)");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x must lie in [0,1], got " + std::to_string(x));
  const double b2 = 1.0 - beta1;
  const double base = beta1 * beta1 * (1.0 - x) + b2 * b2 * x;
  return 0.5 * beta1 * b2 * std::pow(base, -1.5);
}

/// Distribution function of the alpha = 1/2 marginal above, in closed form.
inline double u1_cdf_half(double beta1, double x) {
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw InvalidParameter("beta1 must lie in (0,1)");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double b2 = 1.0 - beta1;
  const double base = beta1 * beta1 * (1.0 - x) + b2 * b2 * x;
  // b1 b2 (1/b1 - base^(-1/2)) / (b2^2 - b1^2), rewritten without the
  // removable singularity at b1 = b2.
  const double root = std::sqrt(base);
  return b2 * x / (root * (root + beta1));
}

/// Stieltjes-type transform E[(lambda + U_1)^(-alpha)] for d = 2:
/// (b1 (1+lambda)^alpha + (1-b1) lambda^alpha)^(-1).
inline double u1_stieltjes(const BpyParams& p, double lambda) {
  p.validate();
  if (p.dim() != 2) throw DimensionError("u1_stieltjes is defined for d = 2");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double b1 = p.beta[0];
  return 1.0 / (b1 * std::pow(1.0 + lambda, p.alpha) + (1.0 - b1) * std::pow(lambda, p.alpha));
}

}  // namespace tiedown
