#pragma once

// Rejection realization of the tied-down condition: i.i.d. excursions (j, m)
// drawn from the table, each taking m + 1 steps; a trial is accepted when
// the elapsed time hits n exactly.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../parallel.hpp"
#include "../random.hpp"
#include "../stats/empirical.hpp"
#include "table.hpp"

namespace tiedown {

struct BridgeOptions {
  std::size_t chunk_trials = std::size_t{1} << 14;
  double min_rate = 1e-6;          // TimeoutError below this acceptance rate
  std::size_t min_trials = 100000;  // before the rate floor is enforced
  std::size_t max_trials = std::size_t{1} << 34;
};

/// Accepted bridges. `records` holds (k, n_1..n_d) per accepted trial;
/// `emp` holds ((n_j / n)_j, k / b_n).
struct BridgeResult {
  std::int64_t n = 0;
  double b_n = 0.0;
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::vector<std::vector<std::int64_t>> records;
  EmpiricalDistribution emp{1};

  double rate() const { return trials ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0; }
};

namespace detail {

/// Excursion sampler: cell 0 is the immediate return, then (j, m) for
/// m = 1..limit per branch, then one overflow cell per branch.
class ExcursionSampler {
 public:
  ExcursionSampler(const RenewalTable& t, std::int64_t limit) : d_(t.dim()), limit_(limit) {
    cdf_.reserve(1 + d_ * static_cast<std::size_t>(limit + 1));
    CompensatedSum acc;
    acc.add(t.r00());
    cdf_.push_back(acc.value());
    for (std::size_t j = 0; j < d_; ++j) {
      for (std::int64_t m = 1; m <= limit; ++m) {
        acc.add(t.r(j, m));
        cdf_.push_back(acc.value());
      }
    }
    for (std::size_t j = 0; j < d_; ++j) {
      acc.add(t.branch_tail(j, limit + 1));
      cdf_.push_back(acc.value());
    }
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  /// Returns branch (-1 for the immediate return) and length; overflow
  /// excursions report length limit + 1.
  std::pair<int, std::int64_t> draw(Rng& rng) const {
    const double u = uniform_open(rng);
    const auto cell = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    if (cell == 0) return {-1, 0};
    const std::size_t body = d_ * static_cast<std::size_t>(limit_);
    if (cell <= body) {
      const std::size_t c = cell - 1;
      return {static_cast<int>(c / static_cast<std::size_t>(limit_)), static_cast<std::int64_t>(c % limit_) + 1};
    }
    return {static_cast<int>(std::min(cell - body - 1, d_ - 1)), limit_ + 1};
  }

 private:
  std::size_t d_;
  std::int64_t limit_;
  std::vector<double> cdf_;
};

}  // namespace detail

/// Runs chunks of trials until at least `accepted` bridges are collected.
/// The sample is the union of the shortest chunk prefix reaching the target,
/// so it does not depend on the worker count.
inline BridgeResult bridge_sample_mc(const RenewalTable& table, std::int64_t n, std::size_t accepted,
                                     const Parallelism& par, const BridgeOptions& opt = {}) {
  if (accepted < 1) throw InvalidParameter("bridge_sample_mc needs accepted >= 1");
  if (n < 1) throw DomainError("bridge length must be >= 1");
  if (n - 1 > table.n_max()) throw HorizonError("bridge of length " + std::to_string(n) + " beyond table horizon");
  const std::size_t d = table.dim();
  const detail::ExcursionSampler sampler(table, std::min<std::int64_t>(table.n_max(), n - 1));

  struct Chunk {
    std::size_t trials = 0;
    std::vector<std::int64_t> flat;  // (k, n_1..n_d) per acceptance
  };
  auto run = [&](std::size_t, Rng& rng) {
    Chunk c;
    std::vector<std::int64_t> occ(d);
    for (std::size_t t = 0; t < opt.chunk_trials; ++t) {
      std::fill(occ.begin(), occ.end(), 0);
      std::int64_t time = 0, k = 0;
      while (time < n) {
        const auto [j, m] = sampler.draw(rng);
        time += m + 1;
        ++k;
        if (j >= 0) occ[static_cast<std::size_t>(j)] += m;
      }
      if (time == n) {
        c.flat.push_back(k);
        c.flat.insert(c.flat.end(), occ.begin(), occ.end());
      }
    }
    c.trials = opt.chunk_trials;
    return c;
  };

  BridgeResult res;
  res.n = n;
  res.b_n = scaling_b(table, static_cast<double>(n));
  res.emp = EmpiricalDistribution(d + 1);
  const auto chunks = run_until(
      par, accepted, run, [&](const Chunk& c) { return c.flat.size() / (d + 1); },
      [&](std::size_t done, std::size_t got) {
        const std::size_t trials = done * opt.chunk_trials;
        const double rate = static_cast<double>(got) / static_cast<double>(trials);
        if (trials >= opt.min_trials && rate < opt.min_rate)
          throw TimeoutError("bridge acceptance rate " + std::to_string(rate) + " below floor");
        if (trials >= opt.max_trials) throw TimeoutError("bridge trial budget exhausted");
      });
  const double nd = static_cast<double>(n);
  std::vector<double> point(d + 1);
  for (const auto& c : chunks) {
    res.trials += c.trials;
    for (std::size_t i = 0; i < c.flat.size(); i += d + 1) {
      std::vector<std::int64_t> rec(c.flat.begin() + static_cast<std::ptrdiff_t>(i),
                                    c.flat.begin() + static_cast<std::ptrdiff_t>(i + d + 1));
      for (std::size_t j = 0; j < d; ++j) point[j] = static_cast<double>(rec[j + 1]) / nd;
      point[d] = static_cast<double>(rec[0]) / res.b_n;
      res.emp.add(point);
      res.records.push_back(std::move(rec));
      ++res.accepted;
    }
  }
  return res;
}

}  // namespace tiedown
