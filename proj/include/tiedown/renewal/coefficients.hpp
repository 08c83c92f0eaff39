#pragma once

// Coefficients T_{n_1..n_d}(k) of R(z)^k for a scalar renewal table, where
// R(z) = r00 + sum_j sum_n r[j][n] z_j^n.
//
// Two routes. tn_coefficients evolves the whole simplex {sum n_j <= H} one
// return at a time (axis-wise convolutions). The factorized route uses
//   R(z)^k = sum over k_1+..+k_d = k of multinomial * prod_j R_j(z_j)^{k_j}
// with R_1 carrying r00, so a coefficient only needs 1-D convolution powers
// of each branch; that is what makes k = 400 or n = 4096 affordable.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../fft.hpp"
#include "../numeric.hpp"
#include "../stable.hpp"
#include "powers.hpp"
#include "table.hpp"

namespace tiedown {

/// Largest lattice (number of stored doubles) tn_coefficients will allocate.
inline constexpr std::size_t tn_memory_bound = std::size_t{1} << 26;

/// Dense array over {0..H}^d; entries outside the simplex sum n_j <= H are 0.
struct TnArray {
  std::int64_t k = 0;
  std::size_t d = 0;
  std::int64_t horizon = 0;
  std::vector<double> values;

  std::size_t index(std::span<const std::int64_t> n) const {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d; ++j) idx = idx * static_cast<std::size_t>(horizon + 1) + static_cast<std::size_t>(n[j]);
    return idx;
  }

  double at(std::span<const std::int64_t> n) const {
    if (n.size() != d) throw DimensionError("TnArray index has wrong dimension");
    std::int64_t s = 0;
    for (auto x : n) {
      if (x < 0) return 0.0;
      s += x;
    }
    return s > horizon ? 0.0 : values[index(n)];
  }

  double total() const {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
  }
};

/// All T_{n}(k) with sum n_j <= horizon, by k successive steps of the
/// single-return kernel. FFT is used along lines longer than the direct
/// convolution limit.
inline TnArray tn_coefficients(const RenewalTable& table, std::int64_t k, std::int64_t horizon) {
  if (k < 0) throw DomainError("tn_coefficients needs k >= 0");
  if (horizon < 0) throw DomainError("tn_coefficients needs horizon >= 0");
  const std::size_t d = table.dim();
  const auto side = static_cast<std::size_t>(horizon + 1);
  std::size_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (cells > tn_memory_bound / side) throw MemoryBoundError("lattice (" + std::to_string(horizon) + "+1)^" + std::to_string(d));
    cells *= side;
  }
  if (2 * cells > tn_memory_bound) throw MemoryBoundError("lattice too large for two buffers");

  TnArray out{k, d, horizon, std::vector<double>(cells, 0.0)};
  out.values[0] = 1.0;
  if (k == 0) return out;

  std::vector<std::vector<double>> kernel(d, std::vector<double>(side, 0.0));
  for (std::size_t j = 0; j < d; ++j)
    for (std::int64_t n = 1; n <= horizon; ++n) kernel[j][n] = table.r(j, n);

  std::unique_ptr<Convolver> conv;
  std::vector<std::vector<std::complex<double>>> spectra;
  if (side > direct_convolution_limit) {
    conv = std::make_unique<Convolver>(side);
    for (std::size_t j = 0; j < d; ++j) spectra.push_back(conv->spectrum(kernel[j]));
  }

  std::vector<std::size_t> stride(d);
  for (std::size_t j = 0; j < d; ++j) {
    stride[j] = 1;
    for (std::size_t i = j + 1; i < d; ++i) stride[j] *= side;
  }

  std::vector<double> next(cells), line(side), result(side);
  std::vector<std::int64_t> idx(d);
  for (std::int64_t step = 0; step < k; ++step) {
    for (std::size_t c = 0; c < cells; ++c) next[c] = table.r00() * out.values[c];
    for (std::size_t j = 0; j < d; ++j) {
      // Walk all multi-indices with idx[j] == 0 inside the simplex.
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        std::int64_t used = 0;
        for (std::size_t i = 0; i < d; ++i) used += idx[i];
        const std::int64_t budget = horizon - used;
        if (budget >= 1) {
          std::size_t base = 0;
          for (std::size_t i = 0; i < d; ++i) base += static_cast<std::size_t>(idx[i]) * stride[i];
          const auto len = static_cast<std::size_t>(budget + 1);
          bool any = false;
          for (std::size_t m = 0; m < len; ++m) {
            line[m] = out.values[base + m * stride[j]];
            any = any || line[m] != 0.0;
          }
          if (any) {
            if (conv && len > direct_convolution_limit) {
              std::fill(line.begin() + static_cast<std::ptrdiff_t>(len), line.end(), 0.0);
              conv->apply(line, spectra[j], result);
            } else {
              convolve_direct(std::span<const double>(line).first(len), std::span<const double>(kernel[j]).first(len),
                              std::span<double>(result).first(len));
            }
            for (std::size_t m = 1; m < len; ++m) next[base + m * stride[j]] += result[m];
          }
        }
        // Advance the odometer over coordinates other than j.
        std::size_t i = d;
        bool done = true;
        while (i-- > 0) {
          if (i == j) continue;
          if (used < horizon) {
            ++idx[i];
            done = false;
            break;
          }
          used -= idx[i];
          idx[i] = 0;
        }
        if (done) break;
      }
    }
    out.values.swap(next);
  }
  out.k = k;
  return out;
}

namespace detail {

/// Branch kernels truncated to `length` terms, normalized to unit mass, with
/// r00 folded into branch 0 at the origin. `mass[j]` is the truncated mass.
struct BranchKernels {
  std::vector<std::vector<double>> kernel;
  std::vector<double> mass;
};

inline BranchKernels branch_kernels(const RenewalTable& table, std::size_t length) {
  BranchKernels bk;
  const std::size_t d = table.dim();
  bk.kernel.assign(d, std::vector<double>(length, 0.0));
  bk.mass.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    auto& ker = bk.kernel[j];
    if (j == 0) ker[0] = table.r00();
    for (std::size_t n = 1; n < length; ++n) ker[n] = table.r(j, static_cast<std::int64_t>(n));
    CompensatedSum s;
    for (std::size_t n = length; n-- > 0;) s.add(ker[n]);
    bk.mass[j] = s.value();
    if (bk.mass[j] > 0.0)
      for (double& x : ker) x /= bk.mass[j];
  }
  return bk;
}

/// Smallest window [lo, hi] of Binomial(k, p) holding all mass above `cut`.
inline std::pair<std::int64_t, std::int64_t> binomial_window(std::int64_t k, double p, double cut) {
  if (p <= 0.0) return {0, 0};
  if (p >= 1.0) return {k, k};
  const auto mode = static_cast<std::int64_t>(std::floor(static_cast<double>(k + 1) * p));
  std::int64_t lo = std::min(mode, k), hi = std::min(mode, k);
  while (lo > 0 && binomial_pmf(k, lo - 1, p) >= cut) --lo;
  while (hi < k && binomial_pmf(k, hi + 1, p) >= cut) ++hi;
  return {lo, hi};
}

inline constexpr double multinomial_cut = 1e-22;

/// Per-branch normalized powers P_j^{(m)} sampled at selected positions, for
/// m in a window around the binomial bulk.
struct FactorizedPowers {
  std::int64_t k = 0;
  std::vector<double> mass;           // truncated branch masses x_j
  std::vector<double> prob;           // x_j / sum x
  double log_total = 0.0;             // log sum x
  std::vector<std::int64_t> lo, hi;   // power windows
  std::vector<std::vector<std::int64_t>> positions;
  std::vector<std::vector<double>> values;  // [j][(m - lo) * npos + p]

  double value(std::size_t j, std::int64_t m, std::size_t p) const {
    if (m < lo[j] || m > hi[j]) return 0.0;
    return values[j][static_cast<std::size_t>(m - lo[j]) * positions[j].size() + p];
  }
};

inline FactorizedPowers factorized_powers(const RenewalTable& table, std::int64_t k,
                                          std::vector<std::vector<std::int64_t>> positions) {
  const std::size_t d = table.dim();
  std::int64_t far = 0;
  for (const auto& ps : positions)
    for (auto p : ps) far = std::max(far, p);
  // Past the horizon the lumped overflow mass has no lattice position.
  bool lumped = false;
  for (std::size_t j = 0; j < d; ++j) lumped = lumped || table.overflow(j) > 0.0;
  if (far > table.n_max() && lumped)
    throw HorizonError("coefficient at n = " + std::to_string(far) + " beyond table horizon");
  const auto length = static_cast<std::size_t>(far + 1);
  BranchKernels bk = branch_kernels(table, length);

  FactorizedPowers fp;
  fp.k = k;
  fp.mass = bk.mass;
  double total = 0.0;
  for (double x : bk.mass) total += x;
  fp.log_total = std::log(total);
  for (double x : bk.mass) fp.prob.push_back(x / total);
  fp.positions = std::move(positions);
  fp.lo.resize(d);
  fp.hi.resize(d);
  fp.values.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto [lo, hi] = binomial_window(k, fp.prob[j], multinomial_cut);
    fp.lo[j] = lo;
    fp.hi[j] = hi;
    const auto& pos = fp.positions[j];
    auto& vals = fp.values[j];
    vals.assign(static_cast<std::size_t>(hi - lo + 1) * pos.size(), 0.0);
    for_each_power(bk.kernel[j], lo, hi, length, [&](std::int64_t m, std::span<const double> pw) {
      const std::size_t row = static_cast<std::size_t>(m - lo) * pos.size();
      for (std::size_t p = 0; p < pos.size(); ++p) vals[row + p] = pw[static_cast<std::size_t>(pos[p])];
    });
  }
  return fp;
}

/// T_n(k) from factorized powers; `slot[j]` is the index of n_j in
/// positions[j].
inline double factorized_coefficient(const FactorizedPowers& fp, std::span<const std::size_t> slot) {
  const std::size_t d = fp.prob.size();
  // Sequential binomials: k_j ~ Bin(remaining, p_j / sum_{i >= j} p_i).
  std::vector<double> rest(d + 1, 0.0);
  for (std::size_t j = d; j-- > 0;) rest[j] = rest[j + 1] + fp.prob[j];
  std::function<double(std::size_t, std::int64_t)> rec = [&](std::size_t j, std::int64_t remaining) -> double {
    if (j + 1 == d) return fp.value(j, remaining, slot[j]);
    const double q = rest[j] > 0.0 ? std::min(1.0, fp.prob[j] / rest[j]) : 0.0;
    const std::int64_t lo = std::max<std::int64_t>(fp.lo[j], 0), hi = std::min(fp.hi[j], remaining);
    double acc = 0.0;
    for (std::int64_t m = lo; m <= hi; ++m) {
      const double v = fp.value(j, m, slot[j]);
      if (v == 0.0) continue;
      const double w = binomial_pmf(remaining, m, q);
      if (w < multinomial_cut) continue;
      acc += w * v * rec(j + 1, remaining - m);
    }
    return acc;
  };
  return std::exp(static_cast<double>(fp.k) * fp.log_total) * rec(0, fp.k);
}

}  // namespace detail

/// Single coefficient T_n(k) by the factorized route.
inline double tn_coefficient(const RenewalTable& table, std::int64_t k, std::span<const std::int64_t> n) {
  if (n.size() != table.dim()) throw DimensionError("coefficient index has wrong dimension");
  if (k < 0) throw DomainError("tn_coefficient needs k >= 0");
  std::vector<std::vector<std::int64_t>> pos;
  for (auto x : n) {
    if (x < 0) return 0.0;
    pos.push_back({x});
  }
  const auto fp = detail::factorized_powers(table, k, std::move(pos));
  const std::vector<std::size_t> slot(n.size(), 0);
  return detail::factorized_coefficient(fp, slot);
}

struct LltPoint {
  std::vector<double> y;
  double scaled = 0.0;  // a_k^d T
  double limit = 0.0;   // prod psi_j(y_j)
  double deviation = 0.0;
};

struct LltProfile {
  std::int64_t k = 0;
  std::int64_t a_k = 0;
  std::vector<LltPoint> points;
  double max_deviation = 0.0;
};

/// |a_k^d T_{floor(y a_k)}(k) - prod_j psi_j(y_j)| on a grid of y in (0,inf)^d,
/// psi_j the one-sided stable density with scale beta_j.
inline LltProfile llt_profile(const RenewalTable& table, std::int64_t k, const std::vector<std::vector<double>>& grid) {
  const std::size_t d = table.dim();
  if (k < 1) throw DomainError("llt needs k >= 1");
  LltProfile prof;
  prof.k = k;
  prof.a_k = scaling_a(table, k);
  const double ak = static_cast<double>(prof.a_k);

  std::vector<std::vector<std::int64_t>> pos(d);
  std::vector<std::vector<std::size_t>> slots;
  for (const auto& y : grid) {
    if (y.size() != d) throw DimensionError("grid point has wrong dimension");
    std::vector<std::size_t> slot(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!(y[j] > 0.0)) throw DomainError("grid points must be positive");
      const auto n = static_cast<std::int64_t>(std::floor(y[j] * ak));
      auto it = std::find(pos[j].begin(), pos[j].end(), n);
      slot[j] = static_cast<std::size_t>(it - pos[j].begin());
      if (it == pos[j].end()) pos[j].push_back(n);
    }
    slots.push_back(std::move(slot));
  }
  const auto fp = detail::factorized_powers(table, k, std::move(pos));
  const double scale = std::pow(ak, static_cast<double>(d));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    LltPoint pt;
    pt.y = grid[g];
    pt.scaled = scale * detail::factorized_coefficient(fp, slots[g]);
    pt.limit = 1.0;
    for (std::size_t j = 0; j < d; ++j) pt.limit *= stable_density({table.alpha(), table.beta()[j]}, grid[g][j]);
    pt.deviation = std::abs(pt.scaled - pt.limit);
    prof.max_deviation = std::max(prof.max_deviation, pt.deviation);
    prof.points.push_back(std::move(pt));
  }
  return prof;
}

inline double llt_deviation(const RenewalTable& table, std::int64_t k, const std::vector<std::vector<double>>& grid) {
  return llt_profile(table, k, grid).max_deviation;
}

namespace detail {

/// Return-time law: q[1] = r00, q[t] = sum_j r[j][t - 1], truncated to n + 1.
inline std::vector<double> return_time_kernel(const RenewalTable& table, std::int64_t n) {
  std::vector<double> q(static_cast<std::size_t>(n + 1), 0.0);
  if (n >= 1) q[1] = table.r00();
  for (std::int64_t t = 2; t <= n; ++t) {
    CompensatedSum s;
    for (std::size_t j = 0; j < table.dim(); ++j) s.add(table.r(j, t - 1));
    q[static_cast<std::size_t>(t)] = s.value();
  }
  return q;
}

}  // namespace detail

/// [sum over n_1+..+n_d = n-k of T_n(k)] / (k n^{-alpha-1} ell(n)), i.e. the
/// probability that the k-th return happens at time n, relative to the
/// large-deviation envelope. Requires n >= a_k.
inline double lld_ratio(const RenewalTable& table, std::int64_t n, std::int64_t k) {
  if (k < 1) throw DomainError("lld_ratio needs k >= 1");
  if (n > table.n_max()) throw HorizonError("lld_ratio at n = " + std::to_string(n));
  const std::int64_t ak = scaling_a(table, k);
  if (n < ak)
    throw PreconditionError("lld_ratio needs n >= a_k (n = " + std::to_string(n) + ", a_k = " + std::to_string(ak) + ")");
  const auto q = detail::return_time_kernel(table, n);
  double hit = 0.0;
  for_each_power(q, k, k, q.size(), [&](std::int64_t, std::span<const double> pw) { hit = pw[static_cast<std::size_t>(n)]; });
  const double nd = static_cast<double>(n);
  return hit / (static_cast<double>(k) * std::pow(nd, -table.alpha() - 1.0) * table.ell()(nd));
}

/// Exact tied-down law at time n for d = 2: mass[k - 1][n_1] is the sum of
/// T_{n_1, n - k - n_1}(k), the probability of k returns with the last one at
/// time n and n_1 steps in A_1.
struct TiedDownLaw {
  std::int64_t n = 0;
  double b_n = 0.0;
  double w_n = 0.0;
  std::vector<std::vector<double>> mass;

  /// Total mass, the renewal probability u_n.
  double total() const {
    CompensatedSum s;
    for (const auto& row : mass)
      for (double v : row) s.add(v);
    return s.value();
  }

  /// w(n) sum g(n_1/n, n_2/n, k/b_n) T_{n_1,n_2}(k).
  double functional(const std::function<double(std::span<const double>, double)>& g) const {
    CompensatedSum s;
    const double nd = static_cast<double>(n);
    double u[2];
    for (std::size_t ki = 0; ki < mass.size(); ++ki) {
      const auto k = static_cast<std::int64_t>(ki + 1);
      const double w = static_cast<double>(k) / b_n;
      for (std::size_t n1 = 0; n1 < mass[ki].size(); ++n1) {
        if (mass[ki][n1] == 0.0) continue;
        u[0] = static_cast<double>(n1) / nd;
        u[1] = static_cast<double>(n - k - static_cast<std::int64_t>(n1)) / nd;
        s.add(g(std::span<const double>(u, 2), w) * mass[ki][n1]);
      }
    }
    return w_n * s.value();
  }

  /// Conditional CDF of n_1 / n at t, given the return at n.
  double u1_cdf(double t) const {
    CompensatedSum s;
    const double nd = static_cast<double>(n);
    for (const auto& row : mass)
      for (std::size_t n1 = 0; n1 < row.size() && static_cast<double>(n1) / nd <= t; ++n1) s.add(row[n1]);
    return s.value() / total();
  }
};

/// Return counts beyond the point where P[k-th return by time n] drops
/// below this are dropped from the tied-down law.
inline constexpr double tied_down_count_cut = 1e-18;

inline TiedDownLaw tied_down_law(const RenewalTable& table, std::int64_t n) {
  if (table.dim() != 2) throw DimensionError("the exact tied-down law is implemented for d = 2 only");
  if (n < 1) throw DomainError("tied_down_law needs n >= 1");
  if (n > table.n_max()) throw HorizonError("tied_down_law at n = " + std::to_string(n));
  TiedDownLaw law;
  law.n = n;
  law.b_n = scaling_b(table, static_cast<double>(n));
  law.w_n = normalizer_w(table, n);

  // Largest useful return count.
  const auto q = detail::return_time_kernel(table, n);
  std::int64_t k_max = 0;
  bool cut = false;
  for_each_power(q, 1, n, q.size(), [&](std::int64_t k, std::span<const double> pw) {
    CompensatedSum s;
    for (double v : pw) s.add(v);
    if (s.value() < tied_down_count_cut) {
      cut = true;
      return false;
    }
    k_max = k;
    return true;
  });
  if (!cut) k_max = n;
  if (k_max < 1) return law;

  const auto length = static_cast<std::size_t>(n + 1);
  if (2 * static_cast<std::size_t>(k_max + 1) * length > 2 * tn_memory_bound)
    throw MemoryBoundError("tied-down law with " + std::to_string(k_max) + " return counts at n = " + std::to_string(n));
  detail::BranchKernels bk = detail::branch_kernels(table, length);
  const double total = bk.mass[0] + bk.mass[1];
  const double p = bk.mass[0] / total;
  const double log_total = std::log(total);

  std::vector<std::vector<double>> powers[2];
  for (int j = 0; j < 2; ++j) {
    powers[j].reserve(static_cast<std::size_t>(k_max + 1));
    for_each_power(bk.kernel[j], 0, k_max, length, [&](std::int64_t, std::span<const double> pw) {
      powers[j].emplace_back(pw.begin(), pw.end());
    });
  }

  law.mass.assign(static_cast<std::size_t>(k_max), {});
  for (std::int64_t k = 1; k <= k_max; ++k) {
    auto& row = law.mass[static_cast<std::size_t>(k - 1)];
    const std::int64_t span_len = n - k;
    if (span_len < 0) break;
    row.assign(static_cast<std::size_t>(span_len + 1), 0.0);
    const double scale = std::exp(static_cast<double>(k) * log_total);
    const auto [lo, hi] = detail::binomial_window(k, p, detail::multinomial_cut);
    for (std::int64_t k1 = lo; k1 <= hi; ++k1) {
      const double w = scale * binomial_pmf(k, k1, p);
      const auto& a = powers[0][static_cast<std::size_t>(k1)];
      const auto& b = powers[1][static_cast<std::size_t>(k - k1)];
      for (std::int64_t n1 = 0; n1 <= span_len; ++n1) {
        const double x = a[static_cast<std::size_t>(n1)];
        if (x != 0.0) row[static_cast<std::size_t>(n1)] += w * x * b[static_cast<std::size_t>(span_len - n1)];
      }
    }
  }
  return law;
}

inline double tied_down_functional(const RenewalTable& table, std::int64_t n,
                                   const std::function<double(std::span<const double>, double)>& g) {
  return tied_down_law(table, n).functional(g);
}

}  // namespace tiedown
