#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../numeric.hpp"
#include "../parallel.hpp"
#include "../renewal/table.hpp"
#include "../stats/empirical.hpp"
#include "../stats/fit.hpp"
#include "model.hpp"
#include "orbit.hpp"
#include "partition.hpp"

namespace tiedown {

struct ReturnTableOptions {
  std::int64_t horizon = std::int64_t{1} << 16;  // excursions longer than this are lumped per branch
  std::int64_t cap = std::int64_t{1} << 20;       // orbit-chain excursions are abandoned past this
  std::size_t chunk_samples = std::size_t{1} << 14;
  std::size_t burn_in = 64;                      // returns discarded when a chain (re)starts
  std::int64_t fit_first = 16;
  std::int64_t fit_last = 1024;
};

struct ReturnTableEstimate {
  RenewalTable table;
  std::size_t samples = 0;
  std::size_t immediate = 0;                 // returns with phi = 1
  std::vector<std::vector<std::uint64_t>> counts;  // counts[j][n], n = 1..horizon
  std::vector<std::uint64_t> overflow_counts;
  std::size_t capped = 0;                    // chain restarts after hitting the cap
  double alpha_fit = 0.0;                    // tail exponent of mu[phi > n]
  double ell_fit = 0.0;                      // constant in mu[phi > n] ~ ell n^-alpha (nominal alpha)
  std::vector<double> beta_fit;

  /// Empirical branch tail: fraction of samples spending >= n steps in A_j.
  double branch_tail(std::size_t j, std::int64_t n) const { return table.branch_tail(j, n); }
};

namespace detail {

struct ReturnChunk {
  std::uint64_t immediate = 0;
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::uint64_t> overflow;
  std::size_t capped = 0;
};

/// Follows the excursion starting at Y-point p. Returns the branch
/// (d for an immediate return) and the number of steps in it, stopping at
/// `stop` steps; `p` is left at the return point when the return happens.
template <class Map>
std::pair<std::size_t, std::int64_t> excursion(const Map& f, const Partition& part, MapPoint& p, std::int64_t stop) {
  const std::size_t d = part.dim();
  p = f.step(p);
  const std::size_t j = part.cell(p);
  if (j == d) return {d, 0};
  std::int64_t len = 1;
  while (len < stop) {
    p = f.step(p);
    const std::size_t c = part.cell(p);
    if (c == d) return {j, len};
    if (c != j) throw PreconditionError("orbit moved between A cells without visiting Y");
    ++len;
  }
  return {j, len};
}

inline MapPoint uniform_on_y(const Partition& part, Rng& rng) {
  const auto ys = part.y_intervals();
  double u = uniform_open(rng) * part.y_length();
  for (auto [a, b] : ys) {
    if (u <= b - a) return MapPoint::from_x(a + u);
    u -= b - a;
  }
  return MapPoint::from_x(ys.back().second);
}

}  // namespace detail

/// Empirical return-distribution table. For Boole, Y-points are drawn
/// i.i.d. from mu|_Y; for other maps the first-return chain of a single
/// orbit per chunk is followed (restarting after `cap`), which samples the
/// same law by ergodicity of the return map.
inline ReturnTableEstimate estimate_return_table(const MapModel& m, const Partition& part, std::size_t samples,
                                                 const Parallelism& par, const ReturnTableOptions& opt = {}) {
  if (samples < 1) throw InvalidParameter("need at least one return sample");
  if (opt.horizon < 64) throw InvalidParameter("return-table horizon must be >= 64");
  const std::size_t d = part.dim();
  const std::int64_t H = opt.horizon;
  const bool iid = std::holds_alternative<BooleMap>(m);
  const std::size_t chunks = (samples + opt.chunk_samples - 1) / opt.chunk_samples;

  auto run = [&](std::size_t c, Rng& rng) {
    detail::ReturnChunk out;
    out.counts.assign(d, std::vector<std::uint64_t>(static_cast<std::size_t>(H + 1), 0));
    out.overflow.assign(d, 0);
    const std::size_t todo = std::min(opt.chunk_samples, samples - c * opt.chunk_samples);
    std::visit(
        [&](const auto& f) {
          auto record = [&](std::size_t j, std::int64_t len) {
            if (j == d)
              ++out.immediate;
            else if (len > H)
              ++out.overflow[j];
            else
              ++out.counts[j][static_cast<std::size_t>(len)];
          };
          if (iid) {
            const InitialLaw nu = InitialLaw::mu_y(m, part);
            for (std::size_t i = 0; i < todo; ++i) {
              MapPoint p = nu.sample(rng);
              const auto [j, len] = detail::excursion(f, part, p, H + 1);
              record(j, len);
            }
            return;
          }
          MapPoint p{};
          auto restart = [&] {
            for (;;) {
              p = detail::uniform_on_y(part, rng);
              bool ok = true;
              for (std::size_t b = 0; b < opt.burn_in && ok; ++b) ok = detail::excursion(f, part, p, opt.cap).second < opt.cap;
              if (ok) return;
              ++out.capped;
            }
          };
          restart();
          for (std::size_t i = 0; i < todo; ++i) {
            const auto [j, len] = detail::excursion(f, part, p, opt.cap);
            record(j, len);
            if (len >= opt.cap) {
              ++out.capped;
              restart();
            }
          }
        },
        m);
    return out;
  };
  auto parts = run_chunks(par, 0, chunks, run);

  ReturnTableEstimate est;
  est.samples = samples;
  est.counts.assign(d, std::vector<std::uint64_t>(static_cast<std::size_t>(H + 1), 0));
  est.overflow_counts.assign(d, 0);
  for (const auto& pc : parts) {
    est.immediate += pc.immediate;
    est.capped += pc.capped;
    for (std::size_t j = 0; j < d; ++j) {
      est.overflow_counts[j] += pc.overflow[j];
      for (std::size_t n = 0; n <= static_cast<std::size_t>(H); ++n) est.counts[j][n] += pc.counts[j][n];
    }
  }
  const double m_d = static_cast<double>(samples);
  std::vector<std::vector<double>> r(d, std::vector<double>(static_cast<std::size_t>(H + 1), 0.0));
  std::vector<double> overflow(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t n = 1; n <= static_cast<std::size_t>(H); ++n) r[j][n] = static_cast<double>(est.counts[j][n]) / m_d;
    overflow[j] = static_cast<double>(est.overflow_counts[j]) / m_d;
  }
  const double alpha = map_alpha(m);
  const double r00 = static_cast<double>(est.immediate) / m_d;
  RenewalTable raw(alpha, std::vector<double>(d, 1.0 / static_cast<double>(d)), SlowVariation::constant(1.0), r00, r,
                   overflow);

  // Fits on the total tail mu[phi > n] = sum_j (steps in A_j >= n).
  const std::int64_t first = opt.fit_first, last = std::min(opt.fit_last, H / 2);
  std::vector<double> tail(static_cast<std::size_t>(last + 1), 0.0);
  std::vector<double> branch_sum(d, 0.0);
  double total_sum = 0.0;
  for (std::int64_t n = 1; n <= last; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      const double t = raw.branch_tail(j, n);
      tail[static_cast<std::size_t>(n)] += t;
      if (n >= first) branch_sum[j] += t;
    }
    if (n >= first) total_sum += tail[static_cast<std::size_t>(n)];
  }
  est.alpha_fit = fit_tail_exponent(tail, first, last);
  est.ell_fit = fit_tail_constant(tail, alpha, first, last);
  for (double b : branch_sum) est.beta_fit.push_back(b / total_sum);
  est.table = RenewalTable(std::clamp(est.alpha_fit, 0.01, 0.99), est.beta_fit, SlowVariation::constant(est.ell_fit),
                           r00, std::move(r), std::move(overflow));
  return est;
}

/// Smooth surrogate of an estimated table for normalizing sequences: the
/// stable table with the map's alpha, the fitted beta and ell = fitted constant.
inline RenewalTable scaling_table(const MapModel& m, const ReturnTableEstimate& est, std::int64_t horizon) {
  return make_stable_table(map_alpha(m), est.beta_fit, SlowVariation::constant(est.ell_fit), horizon);
}

struct MapAcceptRecord {
  double x0 = 0.0;
  std::vector<std::int64_t> s_a;
  std::int64_t s_y = 0;
};

struct MapExperimentOptions {
  std::size_t chunk_orbits = 4096;
  double min_rate = 1e-6;
  std::size_t min_trials = 100000;
  std::size_t max_trials = std::size_t{1} << 36;
};

struct MapTiedDownResult {
  std::int64_t n = 0;
  double b_n = 0.0;
  std::size_t trials = 0;
  std::size_t accepted = 0;
  /// b_n mu[A] / (Gamma(alpha) n), when mu[A] is known in closed form.
  double predicted_rate = std::numeric_limits<double>::quiet_NaN();
  std::vector<MapAcceptRecord> records;
  EmpiricalDistribution emp{1};  // ((S_{A_j}(n)/n)_j, S_Y(n)/b_n)

  double rate() const { return trials ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0; }
};

/// Samples x0 ~ nu, runs n steps and keeps the orbits with f^n(x0) in the
/// interval A = [a_lo, a_hi] inside Y. b_n comes from `scaling`.
inline MapTiedDownResult tied_down_experiment(const MapModel& m, const Partition& part, const InitialLaw& nu,
                                              std::int64_t n, std::pair<double, double> A, std::size_t accepted,
                                              const RenewalTable& scaling, const Parallelism& par,
                                              const MapExperimentOptions& opt = {}) {
  if (n < 1) throw DomainError("tied-down experiment needs n >= 1");
  if (accepted < 1) throw InvalidParameter("need at least one accepted orbit");
  const std::size_t d = part.dim();
  if (!(A.first < A.second) || part.cell_of_x(A.first) != d || part.cell_of_x(A.second) != d)
    throw InvalidParameter("target set must be a nondegenerate interval inside Y");
  for (auto [a, b] : part.y_intervals())
    if (A.first < a && A.second > b) throw InvalidParameter("target set must lie in one component of Y");

  struct Chunk {
    std::vector<MapAcceptRecord> hits;
  };
  auto run = [&](std::size_t, Rng& rng) {
    Chunk c;
    std::visit(
        [&](const auto& f) {
          std::vector<MapPoint> starts(opt.chunk_orbits);
          for (auto& p0 : starts) p0 = nu.sample(rng);
          std::vector<OrbitStats> stats(starts.size());
          detail::run_orbit_batch(f, part, starts, n, stats);
          for (std::size_t i = 0; i < starts.size(); ++i) {
            const OrbitStats& st = stats[i];
            if (st.final_cell != d) continue;
            const double x = st.final_point.x();
            if (x < A.first || x > A.second) continue;
            c.hits.push_back({starts[i].x(), st.s_a, st.s_y});
          }
        },
        m);
    return c;
  };

  MapTiedDownResult res;
  res.n = n;
  res.b_n = scaling_b(scaling, static_cast<double>(n));
  if (part.mu_Y) {
    const double muA = (boole_coordinate(A.second) - boole_coordinate(A.first)) / *part.mu_Y;
    res.predicted_rate = res.b_n * muA / (std::tgamma(map_alpha(m)) * static_cast<double>(n));
  }
  const auto chunks = run_until(
      par, accepted, run, [](const Chunk& c) { return c.hits.size(); },
      [&](std::size_t done, std::size_t got) {
        const std::size_t trials = done * opt.chunk_orbits;
        const double rate = static_cast<double>(got) / static_cast<double>(trials);
        if (trials >= opt.min_trials && rate < opt.min_rate)
          throw TimeoutError("map acceptance rate " + std::to_string(rate) + " below floor");
        if (trials >= opt.max_trials) throw TimeoutError("map trial budget exhausted");
      });
  res.emp = EmpiricalDistribution(d + 1);
  std::vector<double> pt(d + 1);
  const double nd = static_cast<double>(n);
  for (const auto& c : chunks) {
    res.trials += opt.chunk_orbits;
    for (const auto& h : c.hits) {
      for (std::size_t j = 0; j < d; ++j) pt[j] = static_cast<double>(h.s_a[j]) / nd;
      pt[d] = static_cast<double>(h.s_y) / res.b_n;
      res.emp.add(pt);
      res.records.push_back(h);
      ++res.accepted;
    }
  }
  return res;
}

/// Unconditioned occupation fractions ((S_{A_j}(n)/n)_j, S_Y(n)/n) of
/// `orbits` orbits started from nu.
inline EmpiricalDistribution occupation_experiment(const MapModel& m, const Partition& part, const InitialLaw& nu,
                                                   std::int64_t n, std::size_t orbits, const Parallelism& par,
                                                   std::size_t chunk_orbits = 1024) {
  if (n < 1) throw DomainError("occupation experiment needs n >= 1");
  if (orbits < 1) throw InvalidParameter("need at least one orbit");
  const std::size_t d = part.dim();
  const std::size_t chunks = (orbits + chunk_orbits - 1) / chunk_orbits;
  auto run = [&](std::size_t c, Rng& rng) {
    std::vector<double> flat;
    const std::size_t todo = std::min(chunk_orbits, orbits - c * chunk_orbits);
    std::visit(
        [&](const auto& f) {
          std::vector<MapPoint> starts(todo);
          for (auto& p0 : starts) p0 = nu.sample(rng);
          std::vector<OrbitStats> stats(todo);
          detail::run_orbit_batch(f, part, starts, n, stats);
          for (const OrbitStats& st : stats) {
            for (std::size_t j = 0; j < d; ++j) flat.push_back(static_cast<double>(st.s_a[j]) / static_cast<double>(n));
            flat.push_back(static_cast<double>(st.s_y) / static_cast<double>(n));
          }
        },
        m);
    return flat;
  };
  const auto parts = run_chunks(par, 0, chunks, run);
  EmpiricalDistribution emp(d + 1);
  for (const auto& flat : parts)
    for (std::size_t i = 0; i < flat.size(); i += d + 1) emp.add(std::span<const double>(flat).subspan(i, d + 1));
  return emp;
}

}  // namespace tiedown
