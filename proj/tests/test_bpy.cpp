#include <gtest/gtest.h>

#include <cmath>

#include "tiedown/bpy.hpp"
#include "tiedown/quadrature.hpp"

using namespace tiedown;

namespace {

const Parallelism par{42, 1};

void expect_within_se(const McEstimate& e, double exact, double k = 3.0) {
  EXPECT_LT(std::abs(e.value - exact), k * e.std_error) << e.value << " vs " << exact << " se " << e.std_error;
}

}  // namespace

TEST(Bpy, DrawShape) {
  Rng rng(3);
  const BpyParams p{0.4, {0.2, 0.3, 0.5}};
  for (int i = 0; i < 1000; ++i) {
    const auto d = bpy_draw(p, rng);
    ASSERT_EQ(d.u.size(), 3u);
    double s = 0;
    for (double u : d.u) {
      EXPECT_GE(u, 0.0);
      s += u;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_GT(d.w, 0.0);
    EXPECT_GT(d.weight, 0.0);
  }
}

TEST(Bpy, ValidatesParameters) {
  EXPECT_THROW(BpyParams({0.5, {0.6, 0.6}}).validate(), InvalidParameter);
  EXPECT_THROW(BpyParams({1.5, {0.5, 0.5}}).validate(), InvalidParameter);
  EXPECT_THROW(BpyParams({0.5, {}}).validate(), InvalidParameter);
}

TEST(Bpy, WeightsHaveMeanOne) {
  const BpyParams p{0.5, {0.5, 0.5}};
  const auto e = bpy_expectation(p, [](std::span<const double>, double) { return 1.0; }, 1000000, par);
  expect_within_se(e, 1.0);
}

TEST(Bpy, WMoments) {
  EXPECT_NEAR(bpy_w_moment(0.5, 1), std::sqrt(M_PI), 1e-13);
  EXPECT_NEAR(bpy_w_moment(0.5, 2), 4.0, 1e-13);
  const BpyParams p{0.5, {0.5, 0.5}};
  expect_within_se(bpy_expectation(p, [](std::span<const double>, double w) { return w; }, 1000000, par), std::sqrt(M_PI));
  expect_within_se(bpy_expectation(p, [](std::span<const double>, double w) { return w * w; }, 1000000, par), 4.0);
}

TEST(Bpy, UniformLawAtHalf) {
  const BpyParams p{0.5, {0.5, 0.5}};
  std::vector<BpyFunction> gs;
  for (double t : {0.25, 0.5, 0.75}) gs.push_back([t](std::span<const double> u, double) { return u[0] <= t ? 1.0 : 0.0; });
  const auto es = bpy_expectations(p, gs, 1000000, par);
  expect_within_se(es[0], 0.25);
  expect_within_se(es[1], 0.5);
  expect_within_se(es[2], 0.75);
}

TEST(Bpy, JointCdfCorners) {
  const BpyParams p{0.5, {0.5, 0.5}};
  const double ones[2] = {1.0, 1.0}, zeros[2] = {0.0, 0.0}, half[2] = {0.5, 1.0};
  EXPECT_DOUBLE_EQ(bpy_joint_cdf(p, ones, INFINITY, 10000, par).value, 1.0);
  EXPECT_DOUBLE_EQ(bpy_joint_cdf(p, zeros, INFINITY, 10000, par).value, 0.0);
  expect_within_se(bpy_joint_cdf(p, half, INFINITY, 1000000, par), 0.5);
  EXPECT_THROW(bpy_joint_cdf(p, std::span<const double>(ones, 1), INFINITY, 10, par), DimensionError);
}

TEST(Bpy, U1DensityHalf) {
  for (double x : {0.0, 0.3, 1.0}) EXPECT_NEAR(u1_density_half(0.5, x), 1.0, 1e-15);
  // Normalized constant b1 b2 / 2 gives (1 - b1) / (2 b1^2) at x = 0.
  EXPECT_NEAR(u1_density_half(0.3, 0.0), 0.7 / (2 * 0.09), 1e-14);
  const auto q = integrate_adaptive([](double x) { return u1_density_half(0.3, x); }, 0.0, 1.0, 1e-13);
  EXPECT_NEAR(q.value, 1.0, 1e-10);
  EXPECT_THROW(u1_density_half(0.3, 1.5), DomainError);
  // The distribution function integrates the density.
  for (double b : {0.1, 0.3, 0.8})
    for (double t : {0.1, 0.5, 0.9}) {
      const auto c = integrate_adaptive([b](double x) { return u1_density_half(b, x); }, 0.0, t, 1e-13);
      EXPECT_NEAR(u1_cdf_half(b, t), c.value, 1e-11);
    }
}

TEST(Bpy, StieltjesClosedForm) {
  EXPECT_NEAR(u1_stieltjes({0.5, {0.5, 0.5}}, 1.0), 2.0 * (std::sqrt(2.0) - 1.0), 1e-14);
  EXPECT_NEAR(u1_stieltjes({0.5, {0.5, 0.5}}, 1e8) * 1e4, 1.0, 1e-7);
  // Uniform case against direct integration of (lambda + x)^-1/2.
  for (double lam : {0.5, 2.0}) EXPECT_NEAR(u1_stieltjes({0.5, {0.5, 0.5}}, lam), 2.0 * (std::sqrt(lam + 1) - std::sqrt(lam)), 1e-14);
  // alpha = 1/2 marginal density against the transform.
  for (double b : {0.3, 0.7}) {
    const auto q = integrate_adaptive([b](double x) { return u1_density_half(b, x) / std::sqrt(1.0 + x); }, 0.0, 1.0, 1e-13);
    EXPECT_NEAR(u1_stieltjes({0.5, {b, 1 - b}}, 1.0), q.value, 1e-11);
  }
  EXPECT_THROW(u1_stieltjes({0.5, {0.2, 0.3, 0.5}}, 1.0), DimensionError);
}

TEST(Bpy, StieltjesAgainstMonteCarlo) {
  const BpyParams p{0.3, {0.7, 0.3}};
  const auto e = bpy_expectation(p, [](std::span<const double> u, double) { return std::pow(0.5 + u[0], -0.3); }, 1000000, par);
  expect_within_se(e, u1_stieltjes(p, 0.5));
}

TEST(Bpy, EmpiricalMatchesExpectation) {
  const BpyParams p{0.5, {0.3, 0.7}};
  const auto emp = bpy_empirical(p, 200000, par);
  EXPECT_EQ(emp.dims(), 3u);
  EXPECT_EQ(emp.size(), 200000u);
  const auto e = bpy_expectation(p, [](std::span<const double> u, double) { return u[0]; }, 200000, par);
  EXPECT_NEAR(emp.mean([](std::span<const double> v) { return v[0]; }) * emp.total_weight() / 200000.0, e.value, 1e-12);
  EXPECT_LT(ks_distance(emp, [](double x) { return u1_cdf_half(0.3, x); }, 0), 0.01);
}
