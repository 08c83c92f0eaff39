#include <gtest/gtest.h>

#include <cmath>

#include "tiedown/maps/experiments.hpp"

using namespace tiedown;

namespace {

// Exact Boole branch tail: mass of Y whose excursion spends >= m steps in
// A_1. In t = 1/(1-x) - 1/x the map is t - 1/t; t_0 = -1/sqrt 2 and t_m is
// the negative preimage of t_{m-1}.
double boole_branch_tail(std::int64_t m) {
  double prev = -1.0 / std::sqrt(2.0), cur = prev;
  for (std::int64_t i = 1; i <= m; ++i) {
    prev = cur;
    cur = (prev - std::sqrt(prev * prev + 4.0)) / 2.0;
  }
  return (prev - cur) / std::sqrt(2.0);
}

}  // namespace

TEST(BooleExact, LadderTail) {
  EXPECT_NEAR(boole_branch_tail(1), 0.5, 1e-15);
  // Regular variation with index 1/2: t_m ~ -sqrt(2m).
  const double r = boole_branch_tail(40000) / boole_branch_tail(10000);
  EXPECT_NEAR(r, 0.5, 1e-3);
}

TEST(ReturnTable, BooleAgainstExactTail) {
  const MapModel m = BooleMap{};
  const auto part = build_partition(m);
  const std::size_t samples = 400000;
  ReturnTableOptions opt;
  opt.horizon = 4096;
  const auto est = estimate_return_table(m, part, samples, {3, 1}, opt);
  EXPECT_NEAR(est.table.total_mass(), 1.0, 1e-12);
  EXPECT_EQ(est.immediate, 0u);
  for (std::int64_t n : {1, 2, 4, 16, 64, 256, 1024}) {
    const double p = boole_branch_tail(n);
    const double se = std::sqrt(p * (1 - p) / double(samples));
    for (std::size_t j = 0; j < 2; ++j) EXPECT_LT(std::abs(est.branch_tail(j, n) - p), 4 * se) << j << " " << n;
  }
  EXPECT_GE(est.alpha_fit, 0.45);
  EXPECT_LE(est.alpha_fit, 0.55);
  EXPECT_NEAR(est.beta_fit[0], 0.5, 0.02);
  // Branch symmetry: the two tails at n = 16 agree within 3 standard errors.
  const double t1 = est.branch_tail(0, 16), t2 = est.branch_tail(1, 16);
  const double se = std::sqrt((t1 + t2) / double(samples));
  EXPECT_LT(std::abs(t1 - t2), 3 * se);
}

TEST(ReturnTable, GenericMapTailExponent) {
  const MapModel m = PolynomialMap(0.5, {0.3, 0.7});
  const auto part = build_partition(m);
  ReturnTableOptions opt;
  opt.horizon = 4096;
  const auto est = estimate_return_table(m, part, 200000, {4, 1}, opt);
  EXPECT_NEAR(est.alpha_fit, 0.5, 0.06);
  ASSERT_EQ(est.beta_fit.size(), 3u);
  double s = 0;
  for (double b : est.beta_fit) {
    EXPECT_GT(b, 0.1);
    s += b;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(ReturnTable, ReproducibleAcrossWorkers) {
  const MapModel m = BooleMap{};
  const auto part = build_partition(m);
  ReturnTableOptions opt;
  opt.horizon = 1024;
  opt.chunk_samples = 4096;
  const auto a = estimate_return_table(m, part, 30000, {8, 1}, opt);
  const auto b = estimate_return_table(m, part, 30000, {8, 4}, opt);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.overflow_counts, b.overflow_counts);
}

TEST(Occupation, ArcsineControl) {
  const MapModel m = BooleMap{};
  const auto part = build_partition(m);
  const auto emp = occupation_experiment(m, part, InitialLaw::uniform(), 4000, 20000, {6, 1});
  EXPECT_EQ(emp.size(), 20000u);
  for (std::size_t i = 0; i < emp.size(); ++i)
    ASSERT_NEAR(emp.value(i, 0) + emp.value(i, 1) + emp.value(i, 2), 1.0, 1e-12);
  EXPECT_LT(ks_distance(emp, arcsine_cdf, 0), 0.025);
  const auto again = occupation_experiment(m, part, InitialLaw::uniform(), 4000, 20000, {6, 2});
  EXPECT_EQ(ks_two_sample(emp, again), 0.0);
}

TEST(TiedDownMap, UniformLawAndRate) {
  const MapModel m = BooleMap{};
  const auto part = build_partition(m);
  const auto scaling = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), std::int64_t{1} << 14);
  const std::int64_t n = 1000;
  const auto res = tied_down_experiment(m, part, InitialLaw::uniform(), n, part.y[0], 3000, scaling, {9, 1});
  EXPECT_GE(res.accepted, 3000u);
  for (const auto& r : res.records) EXPECT_EQ(r.s_a[0] + r.s_a[1] + r.s_y, n);
  EXPECT_LT(ks_distance(res.emp, uniform_cdf, 0), 0.05);
  const double se = std::sqrt(res.rate() / double(res.trials));
  EXPECT_LT(std::abs(res.rate() - res.predicted_rate), 0.1 * res.predicted_rate + 3 * se);
  EXPECT_THROW(tied_down_experiment(m, part, InitialLaw::uniform(), n, {0.1, 0.2}, 10, scaling, {9, 1}), InvalidParameter);
}

TEST(TiedDownMap, ReproducibleAcrossWorkers) {
  const MapModel m = BooleMap{};
  const auto part = build_partition(m);
  const auto scaling = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), 4096);
  MapExperimentOptions opt;
  opt.chunk_orbits = 512;
  const auto a = tied_down_experiment(m, part, InitialLaw::uniform(), 300, part.y[0], 200, scaling, {4, 1}, opt);
  const auto b = tied_down_experiment(m, part, InitialLaw::uniform(), 300, part.y[0], 200, scaling, {4, 3}, opt);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].x0, b.records[i].x0);
    EXPECT_EQ(a.records[i].s_a, b.records[i].s_a);
  }
  EXPECT_EQ(a.trials, b.trials);
}
