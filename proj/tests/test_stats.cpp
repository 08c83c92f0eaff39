#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tiedown/random.hpp"
#include "tiedown/stats/csv.hpp"
#include "tiedown/stats/empirical.hpp"
#include "tiedown/stats/fit.hpp"
#include "tiedown/stats/summary.hpp"
#include "tiedown/stats/svg.hpp"

using namespace tiedown;

namespace {

EmpiricalDistribution sample_1d(const std::vector<double>& xs, const std::vector<double>& ws = {}) {
  EmpiricalDistribution e(1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v[1] = {xs[i]};
    e.add(v, ws.empty() ? 1.0 : ws[i]);
  }
  return e;
}

// Step CDF of a sample, used to compare an ECDF against itself.
std::function<double(double)> step_cdf(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return [xs](double x) { return double(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) / double(xs.size()); };
}

std::vector<SvgSeries> fixture_series() {
  SvgSeries a{"density", {0, 1, 2, 3, 4}, {0.0, 0.5, 0.25, 0.125, 0.0625}};
  SvgSeries b{"ecdf & <step>", {0.5, 1.5, 2.5}, {0.2, 0.6, 1.0}, true};
  return {a, b};
}

}  // namespace

TEST(Ks, Examples) {
  Rng rng(1);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = uniform_open(rng);
  const auto emp = sample_1d(xs);
  EXPECT_LT(ks_distance(emp, uniform_cdf), 0.01);
  EXPECT_NEAR(ks_distance(emp, step_cdf(xs)), 0.0, 1e-12);
  const auto atom = sample_1d(std::vector<double>(20, 0.5));
  EXPECT_NEAR(ks_distance(atom, uniform_cdf), 0.5, 1e-15);
}

TEST(Ks, InvarianceAndErrors) {
  Rng rng(2);
  std::vector<double> xs(500), ws(500);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = uniform_open(rng);
    ws[i] = 0.5 + uniform_open(rng);
  }
  const double base = ks_distance(sample_1d(xs, ws), arcsine_cdf);
  std::vector<double> scaled = ws;
  for (double& w : scaled) w *= 7.25;
  EXPECT_NEAR(ks_distance(sample_1d(xs, scaled), arcsine_cdf), base, 1e-14);
  std::vector<double> rx(xs.rbegin(), xs.rend()), rw(ws.rbegin(), ws.rend());
  EXPECT_NEAR(ks_distance(sample_1d(rx, rw), arcsine_cdf), base, 1e-14);
  EXPECT_THROW(ks_distance(EmpiricalDistribution(1), uniform_cdf), EmptyDistribution);
  EXPECT_THROW(ks_distance(sample_1d({0.1, 0.2}), uniform_cdf), PreconditionError);
  EXPECT_THROW(sample_1d({0.1}, {-1.0}), InvalidParameter);
}

TEST(Ks, TwoSample) {
  const auto a = sample_1d({0.1, 0.2, 0.3, 0.4}), b = sample_1d({0.25, 0.35, 0.45, 0.55});
  EXPECT_NEAR(ks_two_sample(a, b), 0.5, 1e-15);
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
  EXPECT_NEAR(effective_size(sample_1d({1, 2, 3}, {1, 1, 2})), 16.0 / 6.0, 1e-15);
}

TEST(Ks, ArcsineCdf) {
  EXPECT_EQ(arcsine_cdf(0.0), 0.0);
  EXPECT_NEAR(arcsine_cdf(0.5), 0.5, 1e-15);
  EXPECT_NEAR(arcsine_cdf(0.25), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(arcsine_cdf(1.0), 1.0);
}

TEST(Fit, PowerLaws) {
  std::vector<double> tail(5000);
  for (std::size_t n = 1; n < tail.size(); ++n) tail[n] = 3.0 * std::pow(double(n), -0.5);
  EXPECT_NEAR(fit_tail_exponent(tail, 16, 4096), 0.5, 1e-10);
  EXPECT_NEAR(fit_tail_constant(tail, 0.5, 16, 4096), 3.0, 1e-12);
  // A log factor biases the fit down by about 1/log n: local slopes run
  // from 0.5 - 1/log 64 to 0.5 - 1/log 4096 on this window.
  for (std::size_t n = 1; n < tail.size(); ++n) tail[n] = std::pow(double(n), -0.5) * std::log(M_E + n);
  const double a = fit_tail_exponent(tail, 64, 4096);
  EXPECT_GT(a, 0.5 - 1.0 / std::log(64.0));
  EXPECT_LT(a, 0.5 - 1.0 / std::log(4096.0));
  tail[100] = 0.0;
  EXPECT_THROW(fit_tail_exponent(tail, 64, 4096), DomainError);
  EXPECT_THROW(fit_tail_exponent(tail, 0, 10), InvalidParameter);
}

TEST(Fit, ReproducibleFromCsv) {
  Rng rng(4);
  std::vector<double> tail(1025);
  for (std::size_t n = 1; n < tail.size(); ++n) tail[n] = std::pow(double(n), -0.45) * (1.0 + 0.1 * uniform_open(rng));
  CsvTable t{{"n", "tail"}, {}};
  for (std::size_t n = 1; n < tail.size(); ++n) t.add_row({csv_cell(n), csv_cell(tail[n])});
  std::stringstream ss;
  write_csv(ss, t);
  const auto back = parse_csv(ss);
  std::vector<double> again(1025);
  for (const auto& row : back.rows) again[std::stoul(row[0])] = std::strtod(row[1].c_str(), nullptr);
  EXPECT_EQ(fit_tail_exponent(again, 8, 1024), fit_tail_exponent(tail, 8, 1024));
}

TEST(Csv, RoundTripAndSchemas) {
  CsvTable t{schema::bpy_samples(2), {}};
  EXPECT_EQ(t.header, (std::vector<std::string>{"u1", "u2", "w", "weight"}));
  std::stringstream empty;
  write_csv(empty, t);
  EXPECT_EQ(empty.str(), "u1,u2,w,weight\n");
  t.add_row({csv_cell(0.1), csv_cell(1.0 / 3.0), csv_cell(1e-300), csv_cell(std::int64_t{7})});
  t.add_row({csv_cell(-2.5), csv_cell(0.0), csv_cell(123456789.125), csv_cell(true)});
  std::stringstream ss;
  write_csv(ss, t);
  EXPECT_EQ(parse_csv(ss), t);
  EXPECT_EQ(std::strtod(t.rows[0][1].c_str(), nullptr), 1.0 / 3.0);
  EXPECT_THROW(t.add_row({"1"}), InvalidParameter);
  EXPECT_EQ(schema::bridge(3), (std::vector<std::string>{"n", "k", "n1", "n2", "n3"}));
  EXPECT_EQ(schema::map_accept(2), (std::vector<std::string>{"x0", "n", "sa1", "sa2", "sy"}));
  EXPECT_EQ(schema::llt(2), (std::vector<std::string>{"k", "y1", "y2", "deviation"}));
  EXPECT_EQ(schema::lld(), (std::vector<std::string>{"n", "k", "ratio"}));
  EXPECT_EQ(schema::summary(), (std::vector<std::string>{"experiment", "n", "metric", "value", "tolerance", "pass"}));
}

TEST(Csv, FileErrors) {
  CsvTable t{{"a"}, {}};
  EXPECT_THROW(write_csv(std::filesystem::path("/nonexistent/dir/x.csv"), t), IoError);
  EXPECT_THROW(read_csv("/nonexistent/x.csv"), IoError);
  std::istringstream bad("a,b\n1,2,3\n");
  EXPECT_THROW(parse_csv(bad), ParseError);
}

TEST(Summary, Table) {
  const auto t = summary_table({{"demo", 10, "ks", 0.01, 0.05, true}, {"demo", 20, "ks", 0.07, 0.05, false}});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "demo");
  EXPECT_EQ(t.rows[1][5], "false");
}

TEST(Svg, DeterministicAndGolden) {
  const SvgStyle style{"fixture", "x", "y"};
  const std::string a = render_svg(fixture_series(), style), b = render_svg(fixture_series(), style);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("ecdf &amp; &lt;step&gt;"), std::string::npos);
  std::ifstream in(std::string(TIEDOWN_TEST_DATA) + "/golden.svg", std::ios::binary);
  ASSERT_TRUE(in) << "missing golden fixture";
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(a, golden.str());
  SvgStyle logs = style;
  logs.log_x = logs.log_y = true;
  SvgSeries pos{"p", {1, 10, 100}, {1, 0.1, 0.01}};
  EXPECT_NE(render_svg({pos}, logs).find("<polyline"), std::string::npos);
  EXPECT_THROW(write_svg("/nonexistent/dir/x.svg", {pos}, style), IoError);
}
