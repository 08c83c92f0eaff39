#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "tiedown/random.hpp"
#include "tiedown/renewal/coefficients.hpp"
#include "tiedown/stable.hpp"

using namespace tiedown;

namespace {

using Lattice = std::map<std::vector<std::int64_t>, double>;

// k-fold product of the single-step kernel by dynamic programming over steps.
Lattice step_power(const RenewalTable& t, std::int64_t k) {
  Lattice cur{{std::vector<std::int64_t>(t.dim(), 0), 1.0}};
  for (std::int64_t s = 0; s < k; ++s) {
    Lattice nxt;
    for (const auto& [pos, w] : cur) {
      if (t.r00() > 0) nxt[pos] += w * t.r00();
      for (std::size_t j = 0; j < t.dim(); ++j)
        for (std::int64_t n = 1; n <= t.n_max(); ++n) {
          if (t.r(j, n) == 0) continue;
          auto p = pos;
          p[j] += n;
          nxt[p] += w * t.r(j, n);
        }
    }
    cur = std::move(nxt);
  }
  return cur;
}

RenewalTable random_table(std::size_t d, std::int64_t support, bool r00, Rng& rng) {
  std::vector<std::vector<double>> r(d, std::vector<double>(support + 1, 0.0));
  double z = r00 ? uniform_open(rng) : 0.0, total = z;
  for (auto& row : r)
    for (std::int64_t n = 1; n <= support; ++n) total += row[n] = uniform_open(rng);
  for (auto& row : r)
    for (double& x : row) x /= total;
  z /= total;
  double s = z;
  for (auto& row : r)
    for (double x : row) s += x;
  (r00 ? z : r[0][1]) += 1.0 - s;
  return RenewalTable(0.5, std::vector<double>(d, 1.0 / d), SlowVariation::constant(1.0), z, std::move(r));
}

RenewalTable toy() {
  return RenewalTable(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 0.4, {{0.0, 0.3}, {0.0, 0.3}});
}

}  // namespace

TEST(Coefficients, ToyTable) {
  const auto t = toy();
  const std::int64_t n11[2] = {1, 1};
  EXPECT_NEAR(tn_coefficient(t, 3, n11), 0.216, 1e-15);
  const auto arr = tn_coefficients(t, 3, 3);
  EXPECT_NEAR(arr.at(n11), 0.216, 1e-15);
  const std::int64_t n00[2] = {0, 0}, n30[2] = {3, 0}, n21[2] = {2, 1};
  EXPECT_NEAR(arr.at(n00), 0.064, 1e-15);
  EXPECT_NEAR(arr.at(n30), 0.027, 1e-15);
  EXPECT_NEAR(arr.at(n21), 0.081, 1e-15);
  EXPECT_NEAR(arr.total(), 1.0, 1e-14);
}

TEST(Coefficients, TrivialPowers) {
  const auto t = make_stable_table(0.5, {0.3, 0.7}, SlowVariation::constant(1.0), 64);
  const auto a0 = tn_coefficients(t, 0, 10);
  EXPECT_EQ(a0.values[0], 1.0);
  EXPECT_EQ(a0.total(), 1.0);
  const auto a1 = tn_coefficients(t, 1, 10);
  const std::int64_t o[2] = {0, 0};
  EXPECT_DOUBLE_EQ(a1.at(o), t.r00());
  for (std::int64_t n = 1; n <= 10; ++n) {
    const std::int64_t e1[2] = {n, 0}, e2[2] = {0, n}, mixed[2] = {n, 1};
    EXPECT_DOUBLE_EQ(a1.at(e1), t.r(0, n));
    EXPECT_DOUBLE_EQ(a1.at(e2), t.r(1, n));
    EXPECT_EQ(a1.at(mixed), 0.0);
  }
}

TEST(Coefficients, MatchBruteForceOnSmallTables) {
  Rng rng(99);
  double worst = 0.0;
  for (std::size_t d : {2u, 3u})
    for (std::int64_t support = 1; support <= 3; ++support)
      for (bool r00 : {true, false}) {
        const auto t = random_table(d, support, r00, rng);
        for (std::int64_t k = 0; k <= 5; ++k) {
          const auto lattice = tn_coefficients(t, k, k * support);
          const auto exact = step_power(t, k);
          for (const auto& [pos, v] : exact) {
            worst = std::max(worst, std::abs(lattice.at(pos) - v));
            worst = std::max(worst, std::abs(tn_coefficient(t, k, pos) - v));
          }
          EXPECT_NEAR(lattice.total(), 1.0, 1e-12);
        }
      }
  EXPECT_LT(worst, 1e-12);
}

TEST(Coefficients, RoutesAgreeOnStableTable) {
  // Lattice evolution (FFT along long lines) against the factorized route.
  const auto t = make_stable_table(0.5, {0.4, 0.6}, SlowVariation::constant(1.0), 1024);
  const std::int64_t k = 6, horizon = 600;
  const auto arr = tn_coefficients(t, k, horizon);
  double worst = 0.0;
  for (std::int64_t a : {0, 3, 40, 250})
    for (std::int64_t b : {1, 17, 300}) {
      if (a + b > horizon) continue;
      const std::int64_t n[2] = {a, b};
      const double v = tn_coefficient(t, k, n);
      worst = std::max(worst, std::abs(arr.at(n) - v) / std::max(v, 1e-300));
    }
  EXPECT_LT(worst, 1e-9);
}

TEST(Coefficients, MemoryBound) {
  const auto t = make_stable_table(0.5, {0.2, 0.3, 0.5}, SlowVariation::constant(1.0), 64);
  EXPECT_THROW(tn_coefficients(t, 2, 1000), MemoryBoundError);
}

TEST(Powers, DirectAndFftAgree) {
  std::vector<double> ker(2000);
  for (std::size_t i = 1; i < ker.size(); ++i) ker[i] = std::pow(double(i), -1.5) * 0.4;
  ker[0] = 0.1;
  // Naive reference powers.
  std::vector<double> ref(ker.size(), 0.0);
  ref[0] = 1.0;
  std::vector<std::vector<double>> expected;
  for (int m = 1; m <= 5; ++m) {
    std::vector<double> nxt(ker.size(), 0.0);
    for (std::size_t i = 0; i < ker.size(); ++i)
      for (std::size_t j = 0; i + j < ker.size(); ++j) nxt[i + j] += ref[i] * ker[j];
    ref = nxt;
    expected.push_back(ref);
  }
  for (std::size_t length : {100u, 2000u}) {
    int seen = 0;
    for_each_power(ker, 2, 5, length, [&](std::int64_t m, std::span<const double> pw) {
      ++seen;
      ASSERT_EQ(pw.size(), length);
      for (std::size_t i = 0; i < length; ++i) EXPECT_NEAR(pw[i], expected[m - 1][i], 1e-14);
    });
    EXPECT_EQ(seen, 4);
  }
  int calls = 0;
  for_each_power(ker, 1, 10, 100, [&](std::int64_t m, std::span<const double>) {
    ++calls;
    return m < 3;
  });
  EXPECT_EQ(calls, 3);
}

TEST(Llt, ScalarSanity) {
  // d = 1 with r00 = 0: a_k^{-1} scaled k-th power against the stable density.
  const auto t = make_stable_table(0.5, {1.0}, SlowVariation::constant(1.0), std::int64_t{1} << 16);
  const std::vector<std::vector<double>> grid{{0.25}, {0.5}, {1.0}, {2.0}};
  const auto p20 = llt_profile(t, 20, grid), p80 = llt_profile(t, 80, grid);
  for (const auto& pt : p80.points) {
    EXPECT_GE(pt.deviation, 0.0);
    EXPECT_NEAR(pt.limit, stable_density({0.5, 1.0}, pt.y[0]), 1e-12);
    EXPECT_NEAR(pt.scaled, pt.limit, 0.05 * pt.limit + 1e-3);
  }
  EXPECT_LT(p80.max_deviation, p20.max_deviation);
}

TEST(Llt, DeviationShrinksInTwoDimensions) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), std::int64_t{1} << 17);
  std::vector<std::vector<double>> grid;
  for (double a : {0.25, 0.5, 1.0, 2.0})
    for (double b : {0.25, 0.5, 1.0, 2.0}) grid.push_back({a, b});
  const double d25 = llt_deviation(t, 25, grid), d100 = llt_deviation(t, 100, grid);
  EXPECT_LT(d100, d25 / 1.5);
  EXPECT_THROW(llt_deviation(t, 0, grid), DomainError);
}

TEST(Lld, SingleStepIdentity) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 4096);
  for (std::int64_t n : {16, 256, 2048}) {
    const double hit = t.r(0, n - 1) + t.r(1, n - 1);
    EXPECT_NEAR(lld_ratio(t, n, 1), hit / std::pow(double(n), -1.5), 1e-12);
  }
  // Two steps: q * q at n.
  const std::int64_t n = 300;
  double two = 0.0;
  auto q = [&](std::int64_t s) { return s == 1 ? t.r00() : t.r(0, s - 1) + t.r(1, s - 1); };
  for (std::int64_t s = 1; s < n; ++s) two += q(s) * q(n - s);
  EXPECT_NEAR(lld_ratio(t, n, 2), two / (2.0 * std::pow(double(n), -1.5)), 1e-10);
  EXPECT_THROW(lld_ratio(t, 10, 8), PreconditionError);
  EXPECT_THROW(lld_ratio(t, 5000, 1), HorizonError);
}

TEST(Lld, BoundedRatios) {
  const auto t = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 4096);
  double lo = INFINITY, hi = 0.0;
  for (std::int64_t n : {256, 512, 1024, 2048})
    for (std::int64_t k : {1, 2, 4, 8}) {
      if (n < scaling_a(t, k)) continue;
      const double r = lld_ratio(t, n, k);
      EXPECT_GT(r, 0.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  EXPECT_LT(hi / lo, 10.0);
}
