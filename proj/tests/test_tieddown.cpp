#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "tiedown/renewal/bridge.hpp"
#include "tiedown/renewal/coefficients.hpp"

using namespace tiedown;

namespace {

// r00 = 0.4, r[1][1] = r[2][1] = 0.2, r[1][2] = r[2][2] = 0.1, padded with
// zeros up to 16.
RenewalTable toy() {
  std::vector<std::vector<double>> r(2, std::vector<double>(17, 0.0));
  r[0][1] = r[1][1] = 0.2;
  r[0][2] = r[1][2] = 0.1;
  return RenewalTable(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 0.4, std::move(r));
}

// mass[k][n1] of all step sequences whose last return lands exactly at n.
std::vector<std::vector<double>> enumerate(const RenewalTable& t, std::int64_t n) {
  std::vector<std::vector<double>> mass(n + 1, std::vector<double>(n + 1, 0.0));
  std::function<void(std::int64_t, std::int64_t, std::int64_t, double)> rec = [&](std::int64_t time, std::int64_t k,
                                                                                   std::int64_t n1, double w) {
    if (time == n) {
      mass[k][n1] += w;
      return;
    }
    if (time > n) return;
    rec(time + 1, k + 1, n1, w * t.r00());
    for (std::int64_t m = 1; m <= t.n_max(); ++m) {
      if (t.r(0, m) > 0) rec(time + m + 1, k + 1, n1 + m, w * t.r(0, m));
      if (t.r(1, m) > 0) rec(time + m + 1, k + 1, n1, w * t.r(1, m));
    }
  };
  rec(0, 0, 0, 1.0);
  return mass;
}

// Renewal probabilities u_n = sum_t q_t u_{n-t}.
std::vector<double> renewal_sequence(const RenewalTable& t, std::int64_t n) {
  std::vector<double> q(n + 1, 0.0), u(n + 1, 0.0);
  q[1] = t.r00();
  for (std::int64_t s = 2; s <= n; ++s) q[s] = t.r(0, s - 1) + t.r(1, s - 1);
  u[0] = 1.0;
  for (std::int64_t m = 1; m <= n; ++m)
    for (std::int64_t s = 1; s <= m; ++s) u[m] += q[s] * u[m - s];
  return u;
}

}  // namespace

TEST(TiedDown, ToyMatchesEnumeration) {
  const auto t = toy();
  const std::int64_t n = 12;
  const auto law = tied_down_law(t, n);
  const auto exact = enumerate(t, n);
  double worst = 0.0;
  for (std::int64_t k = 1; k <= n; ++k)
    for (std::int64_t n1 = 0; n1 <= n; ++n1) {
      double v = 0.0;
      if (k - 1 < static_cast<std::int64_t>(law.mass.size()) && n1 < static_cast<std::int64_t>(law.mass[k - 1].size()))
        v = law.mass[k - 1][n1];
      worst = std::max(worst, std::abs(v - exact[k][n1]));
    }
  EXPECT_LT(worst, 1e-15);
  EXPECT_NEAR(law.total(), renewal_sequence(t, n)[n], 1e-15);
}

TEST(TiedDown, TotalIsRenewalProbability) {
  const auto t = make_stable_table(0.5, {0.3, 0.7}, SlowVariation::constant(1.0), 4096);
  const std::int64_t n = 1000;
  const auto u = renewal_sequence(t, n);
  const auto law = tied_down_law(t, n);
  EXPECT_NEAR(law.total() / u[n], 1.0, 1e-12);
  EXPECT_NEAR(law.functional([](std::span<const double>, double) { return 1.0; }), law.w_n * u[n], 1e-12);
  EXPECT_NEAR(law.u1_cdf(1.0), 1.0, 1e-14);
  EXPECT_EQ(law.u1_cdf(-0.1), 0.0);
}

TEST(TiedDown, ConvergesToUniformLaw) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), std::int64_t{1} << 13);
  double prev = INFINITY;
  for (std::int64_t n : {512, 2048, 4096}) {
    const auto law = tied_down_law(t, n);
    double err = std::abs(law.functional([](std::span<const double>, double) { return 1.0; }) - 1.0);
    for (double s : {0.25, 0.5, 0.75})
      err = std::max(err, std::abs(law.functional([s](std::span<const double> u, double) { return u[0] <= s ? 1.0 : 0.0; }) - s));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(TiedDown, Errors) {
  const auto t3 = make_stable_table(0.5, {0.2, 0.3, 0.5}, SlowVariation::constant(1.0), 256);
  EXPECT_THROW(tied_down_law(t3, 100), DimensionError);
  const auto t2 = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 256);
  EXPECT_THROW(tied_down_law(t2, 1000), HorizonError);
}

TEST(Bridge, HitsExactlyAndMatchesExactLaw) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 4096);
  const std::int64_t n = 2048;
  const auto res = bridge_sample_mc(t, n, 4000, {5, 1});
  // Whole chunks are kept, so at least the requested count comes back.
  EXPECT_GE(res.accepted, 4000u);
  ASSERT_EQ(res.records.size(), res.accepted);
  for (const auto& rec : res.records) EXPECT_EQ(rec[0] + rec[1] + rec[2], n);
  const auto law = tied_down_law(t, n);
  // Acceptance probability is u_n = 1 / w(n) asymptotically.
  const double p = law.total();
  const double se = std::sqrt(p * (1 - p) / double(res.trials));
  EXPECT_LT(std::abs(res.rate() - p), 4 * se);
  const double ks = ks_distance(res.emp, [&](double x) { return law.u1_cdf(x); }, 0);
  EXPECT_LT(ks, 3.0 * 1.36 / std::sqrt(double(res.accepted)));
}

TEST(Bridge, ThreeBranches) {
  const auto t = make_stable_table(0.5, {0.2, 0.3, 0.5}, SlowVariation::constant(1.0), 2048);
  const auto res = bridge_sample_mc(t, 500, 500, {8, 1});
  EXPECT_EQ(res.emp.dims(), 4u);
  for (const auto& rec : res.records) EXPECT_EQ(rec[0] + rec[1] + rec[2] + rec[3], 500);
}

TEST(Bridge, ReproducibleAcrossWorkers) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 1024);
  const auto a = bridge_sample_mc(t, 512, 300, {21, 1});
  const auto b = bridge_sample_mc(t, 512, 300, {21, 3});
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.records, b.records);
}

TEST(Bridge, TimeoutOnTinyRate) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 1024);
  BridgeOptions opt;
  opt.min_rate = 0.5;
  opt.min_trials = 1000;
  EXPECT_THROW(bridge_sample_mc(t, 512, 1000000, {1, 1}, opt), TimeoutError);
}
