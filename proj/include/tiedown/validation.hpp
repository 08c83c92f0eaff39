#pragma once

// The acceptance suite: criteria 1-13, each returning a pass/fail verdict
// plus the summary rows it measured. Shared inputs (the reference renewal
// table, the Boole return-table estimate) are built once per context.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bpy.hpp"
#include "maps/experiments.hpp"
#include "numeric.hpp"
#include "renewal/bridge.hpp"
#include "renewal/coefficients.hpp"
#include "renewal/table.hpp"
#include "stable.hpp"
#include "stats/empirical.hpp"
#include "stats/fit.hpp"
#include "stats/summary.hpp"

namespace tiedown {

struct ValidationConfig {
  Parallelism par{20240601, 1};
  bool quick = false;  // skips the criteria marked full-only
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  bool skipped = false;
  double seconds = 0.0;
  std::string detail;
  std::vector<SummaryRow> rows;
};

inline constexpr int criterion_count = 13;

/// Criteria only run by a full validation.
inline bool full_only(int id) { return id == 12; }

namespace detail {

inline double levy_density(double beta, double y) {
  return beta / (2.0 * std::sqrt(pi)) * std::pow(y, -1.5) * std::exp(-beta * beta / (4.0 * y));
}

/// All k-step products of the single-return kernel, summed by endpoint.
inline std::map<std::vector<std::int64_t>, double> brute_force_coefficients(const RenewalTable& t, std::int64_t k) {
  struct Cell {
    std::int64_t j;  // -1 for r00
    std::int64_t n;
    double mass;
  };
  std::vector<Cell> cells;
  if (t.r00() > 0) cells.push_back({-1, 0, t.r00()});
  for (std::size_t j = 0; j < t.dim(); ++j)
    for (std::int64_t n = 1; n <= t.n_max(); ++n)
      if (t.r(j, n) > 0) cells.push_back({static_cast<std::int64_t>(j), n, t.r(j, n)});
  std::map<std::vector<std::int64_t>, double> out;
  std::vector<std::int64_t> pos(t.dim(), 0);
  std::function<void(std::int64_t, double)> rec = [&](std::int64_t left, double w) {
    if (left == 0) {
      out[pos] += w;
      return;
    }
    for (const auto& c : cells) {
      if (c.j >= 0) pos[static_cast<std::size_t>(c.j)] += c.n;
      rec(left - 1, w * c.mass);
      if (c.j >= 0) pos[static_cast<std::size_t>(c.j)] -= c.n;
    }
  };
  rec(k, 1.0);
  return out;
}

/// Random table with r[j][n] > 0 only for n <= support.
inline RenewalTable random_small_table(std::size_t d, std::int64_t support, bool with_r00, Rng& rng) {
  std::vector<std::vector<double>> r(d, std::vector<double>(static_cast<std::size_t>(support + 1), 0.0));
  double r00 = with_r00 ? uniform_open(rng) : 0.0;
  double total = r00;
  for (auto& row : r)
    for (std::int64_t n = 1; n <= support; ++n) total += row[static_cast<std::size_t>(n)] = uniform_open(rng);
  for (auto& row : r)
    for (double& x : row) x /= total;
  r00 /= total;
  // Absorb the rounding of the normalization into r00 (or the first entry).
  CompensatedSum s;
  s.add(r00);
  for (const auto& row : r)
    for (double x : row) s.add(x);
  if (with_r00)
    r00 += 1.0 - s.value();
  else
    r[0][1] += 1.0 - s.value();
  return RenewalTable(0.5, std::vector<double>(d, 1.0 / static_cast<double>(d)), SlowVariation::constant(1.0), r00,
                      std::move(r));
}

}  // namespace detail

class Validator {
 public:
  explicit Validator(ValidationConfig cfg = {}) : cfg_(cfg) {}

  const RenewalTable& reference_table() {
    if (!reference_)
      reference_ = make_stable_table(0.5, {0.5, 0.5}, SlowVariation::constant(1.0), std::int64_t{1} << 20);
    return *reference_;
  }

  const MapModel& boole() { return boole_; }

  const Partition& boole_partition() {
    if (!partition_) partition_ = build_partition(boole_);
    return *partition_;
  }

  const ReturnTableEstimate& boole_returns() {
    if (!returns_) {
      Parallelism p = cfg_.par;
      p.seed ^= 0x5eed0010;
      returns_ = estimate_return_table(boole_, boole_partition(), 1000000, p);
    }
    return *returns_;
  }

  const RenewalTable& boole_scaling() {
    if (!scaling_) scaling_ = scaling_table(boole_, boole_returns(), std::int64_t{1} << 16);
    return *scaling_;
  }

  CriterionResult run(int id) {
    CriterionResult r;
    r.id = id;
    r.title = title(id);
    if (cfg_.quick && full_only(id)) {
      r.skipped = true;
      r.passed = true;
      r.detail = "skipped (full validation only)";
      return r;
    }
    const auto t0 = std::chrono::steady_clock::now();
    switch (id) {
      case 1: stable_oracle(r); break;
      case 2: bpy_uniform(r); break;
      case 3: stieltjes(r); break;
      case 4: w_moments(r); break;
      case 5: coefficient_oracle(r); break;
      case 6: local_limit(r); break;
      case 7: local_large_deviation(r); break;
      case 8: uniform_law(r); break;
      case 9: scaling_lemma(r); break;
      case 10: boole_tails(r); break;
      case 11: arcsine_control(r); break;
      case 12: map_uniform_law(r); break;
      case 13: cross_engine(r); break;
      default: throw InvalidParameter("no criterion " + std::to_string(id));
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double limit = time_limit(id);
    if (limit > 0) {
      const bool fast = r.seconds < limit;
      r.rows.push_back({"criterion" + std::to_string(id), 0, "seconds", r.seconds, limit, fast});
      r.passed = r.passed && fast;
    }
    return r;
  }

  static std::string title(int id) {
    static const char* names[] = {"",
                                  "stable density vs Levy closed form",
                                  "BPY uniform case, weighted KS",
                                  "Stieltjes identity",
                                  "W moments",
                                  "coefficients vs brute force",
                                  "local limit theorem",
                                  "local large deviation bound",
                                  "uniform law in the renewal model",
                                  "scaling discrepancy",
                                  "Boole return-time tails",
                                  "arcsine control",
                                  "tied-down uniform law on the map",
                                  "map bridge vs renewal bridge"};
    return id >= 1 && id <= criterion_count ? names[id] : "?";
  }

  /// Wall-clock bounds in seconds (0 = none).
  static double time_limit(int id) {
    switch (id) {
      case 1: return 5;
      case 2: return 30;
      case 5: return 10;
      case 6: return 120;
      case 8: return 600;
      case 10: return 120;
      case 11: return 600;
      case 12: return 1800;
      default: return 0;
    }
  }

 private:
  Parallelism stream(int id) const {
    Parallelism p = cfg_.par;
    p.seed = detail::splitmix64(cfg_.par.seed + static_cast<std::uint64_t>(id));
    return p;
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
  }

  void stable_oracle(CriterionResult& r) {
    double worst_all = 0.0;
    for (double beta : {0.25, 0.5, 1.0, 2.0}) {
      double worst = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double y = 0.05 * std::pow(400.0, i / 400.0);
        worst = std::max(worst, std::abs(stable_density({0.5, beta}, y) - detail::levy_density(beta, y)));
      }
      r.rows.push_back({"stable-density", 0, "max_abs_err_beta_" + num(beta), worst, 1e-6, worst < 1e-6});
      worst_all = std::max(worst_all, worst);
    }
    r.passed = worst_all < 1e-6;
    r.detail = "max |psi - Levy| = " + num(worst_all) + " (tol 1e-6)";
  }

  void bpy_uniform(CriterionResult& r) {
    const auto emp = bpy_empirical({0.5, {0.5, 0.5}}, 1000000, stream(2));
    const double ks = ks_distance(emp, uniform_cdf, 0);
    r.rows.push_back({"bpy-uniform", 1000000, "ks_u1_vs_uniform", ks, 0.005, ks < 0.005});
    r.passed = ks < 0.005;
    r.detail = "KS = " + num(ks) + " (tol 0.005)";
  }

  void stieltjes(CriterionResult& r) {
    int good = 0;
    double worst = 0.0;
    int cell = 0;
    for (double alpha : {0.3, 0.5, 0.7}) {
      for (double b1 : {0.3, 0.5, 0.7}) {
        const BpyParams p{alpha, {b1, 1.0 - b1}};
        std::vector<BpyFunction> gs;
        const std::vector<double> lambdas{0.5, 1.0, 2.0};
        for (double l : lambdas) gs.push_back([l, alpha](std::span<const double> u, double) { return std::pow(l + u[0], -alpha); });
        Parallelism par = stream(3);
        par.seed += static_cast<std::uint64_t>(cell++);
        const auto est = bpy_expectations(p, gs, 1000000, par);
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
          const double z = std::abs(est[i].value - u1_stieltjes(p, lambdas[i])) / est[i].std_error;
          worst = std::max(worst, z);
          good += z < 3.0;
          r.rows.push_back({"stieltjes", 1000000,
                            "z_alpha_" + num(alpha) + "_beta1_" + num(b1) + "_lambda_" + num(lambdas[i]), z, 3.0, z < 3.0});
        }
      }
    }
    r.passed = good == 27;
    r.detail = std::to_string(good) + "/27 cells within 3 SE, worst " + num(worst) + " SE";
  }

  void w_moments(CriterionResult& r) {
    int good = 0;
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.7}) {
      std::vector<BpyFunction> gs{[](std::span<const double>, double w) { return w; },
                                  [](std::span<const double>, double w) { return w * w; }};
      Parallelism par = stream(4);
      par.seed += static_cast<std::uint64_t>(alpha * 10);
      const auto est = bpy_expectations({alpha, {0.5, 0.5}}, gs, 1000000, par);
      for (unsigned q = 1; q <= 2; ++q) {
        const double z = std::abs(est[q - 1].value - bpy_w_moment(alpha, q)) / est[q - 1].std_error;
        worst = std::max(worst, z);
        good += z < 3.0;
        r.rows.push_back({"w-moments", 1000000, "z_alpha_" + num(alpha) + "_q_" + std::to_string(q), z, 3.0, z < 3.0});
      }
    }
    r.passed = good == 6;
    r.detail = std::to_string(good) + "/6 moments within 3 SE, worst " + num(worst) + " SE";
  }

  void coefficient_oracle(CriterionResult& r) {
    double worst = 0.0;
    Rng rng = split_stream(stream(5).seed, 0);
    std::size_t tables = 0;
    for (std::size_t d : {2u, 3u}) {
      for (std::int64_t support = 1; support <= 3; ++support) {
        for (int rep = 0; rep < 4; ++rep) {
          const RenewalTable t = detail::random_small_table(d, support, rep % 2 == 0, rng);
          ++tables;
          for (std::int64_t k = 0; k <= 5; ++k) {
            const auto exact = detail::brute_force_coefficients(t, k);
            const TnArray arr = tn_coefficients(t, k, k * support);
            for (const auto& [n, v] : exact) worst = std::max(worst, std::abs(arr.at(n) - v));
            worst = std::max(worst, std::abs(arr.total() - 1.0));
          }
        }
      }
    }
    r.rows.push_back({"coefficients", 5, "max_abs_err", worst, 1e-12, worst < 1e-12});
    r.passed = worst < 1e-12;
    r.detail = std::to_string(tables) + " tables, k <= 5: max error " + num(worst) + " (tol 1e-12)";
  }

  void local_limit(CriterionResult& r) {
    std::vector<std::vector<double>> grid;
    for (double a : {0.25, 0.5, 1.0, 2.0})
      for (double b : {0.25, 0.5, 1.0, 2.0}) grid.push_back({a, b});
    const double d50 = llt_deviation(reference_table(), 50, grid);
    const double d400 = llt_deviation(reference_table(), 400, grid);
    r.rows.push_back({"renewal-llt", 50, "deviation", d50, 0.0, true});
    r.rows.push_back({"renewal-llt", 400, "deviation", d400, 0.05, d400 < 0.05});
    r.rows.push_back({"renewal-llt", 400, "deviation_ratio_400_over_50", d400 / d50, 0.5, d400 < d50 / 2});
    r.passed = d400 < d50 / 2 && d400 < 0.05;
    r.detail = "dev(50) = " + num(d50) + ", dev(400) = " + num(d400);
  }

  void local_large_deviation(CriterionResult& r) {
    const RenewalTable& t = reference_table();
    double lo = INFINITY, hi = 0.0;
    std::vector<double> max_by_n;
    for (std::int64_t n : {256, 512, 1024, 2048}) {
      double mx = 0.0;
      for (std::int64_t k : {1, 2, 4, 8}) {
        if (n < scaling_a(t, k)) continue;
        const double q = lld_ratio(t, n, k);
        r.rows.push_back({"renewal-lld", n, "ratio_k_" + std::to_string(k), q, 0.0, true});
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        mx = std::max(mx, q);
      }
      max_by_n.push_back(mx);
    }
    bool no_growth = true;
    for (std::size_t i = 1; i < max_by_n.size(); ++i) no_growth = no_growth && max_by_n[i] <= max_by_n[i - 1];
    const double spread = hi / lo;
    r.rows.push_back({"renewal-lld", 0, "max_over_min", spread, 10.0, spread < 10.0});
    r.rows.push_back({"renewal-lld", 0, "max_ratio_growth_last_doubling", max_by_n.back() / max_by_n[max_by_n.size() - 2], 1.0,
                      no_growth});
    r.passed = spread < 10.0 && no_growth;
    r.detail = "spread " + num(spread) + " (tol 10); max ratio per n " + num(max_by_n.front()) + " -> " +
               num(max_by_n.back()) + (no_growth ? ", non-increasing" : ", grows");
  }

  void uniform_law(CriterionResult& r) {
    const auto law = tied_down_law(reference_table(), 4096);
    const double one = law.functional([](std::span<const double>, double) { return 1.0; });
    double worst = std::abs(one - 1.0);
    r.rows.push_back({"renewal-tieddown", 4096, "g_one", one, 0.02, std::abs(one - 1.0) < 0.02});
    for (double t : {0.25, 0.5, 0.75}) {
      const double v = law.functional([t](std::span<const double> u, double) { return u[0] <= t ? 1.0 : 0.0; });
      r.rows.push_back({"renewal-tieddown", 4096, "g_u1_le_" + num(t), v, 0.02, std::abs(v - t) < 0.02});
      worst = std::max(worst, std::abs(v - t));
    }
    r.passed = worst < 0.02;
    r.detail = "g=1 gives " + num(one) + ", worst deviation " + num(worst) + " (tol 0.02)";
  }

  void scaling_lemma(CriterionResult& r) {
    const double small = scaling_discrepancy(reference_table(), 1 << 10);
    const double large = scaling_discrepancy(reference_table(), 1 << 14);
    r.rows.push_back({"scaling", 1 << 10, "discrepancy", small, 0.0, true});
    r.rows.push_back({"scaling", 1 << 14, "discrepancy", large, small / 2, large < small / 2});
    r.passed = large < small / 2;
    r.detail = "n=2^10: " + num(small) + ", n=2^14: " + num(large);
  }

  void boole_tails(CriterionResult& r) {
    const auto& est = boole_returns();
    std::vector<double> tail1(1025);
    for (std::int64_t n = 1; n <= 1024; ++n) tail1[static_cast<std::size_t>(n)] = est.branch_tail(0, n);
    const double a = fit_tail_exponent(tail1, 16, 1024);
    const bool exponent_ok = a >= 0.45 && a <= 0.55;
    r.rows.push_back({"map-returns", 1000000, "tail_exponent_branch1", a, 0.05, exponent_ok});
    bool symmetric = true;
    double worst = 0.0;
    const double m = static_cast<double>(est.samples);
    for (std::int64_t n : {1, 16, 256, 1024}) {
      const double p1 = est.branch_tail(0, n), p2 = est.branch_tail(1, n);
      const double se = std::sqrt((p1 + p2 - (p1 - p2) * (p1 - p2)) / m);
      const double z = std::abs(p1 - p2) / se;
      worst = std::max(worst, z);
      symmetric = symmetric && z < 3.0;
      r.rows.push_back({"map-returns", n, "branch_tail_asymmetry_z", z, 3.0, z < 3.0});
    }
    r.passed = exponent_ok && symmetric;
    r.detail = "exponent " + num(a) + " (want [0.45,0.55]), worst asymmetry " + num(worst) + " SE";
  }

  void arcsine_control(CriterionResult& r) {
    const auto emp = occupation_experiment(boole(), boole_partition(), InitialLaw::uniform(), 10000, 100000, stream(11));
    const double ks = ks_distance(emp, arcsine_cdf, 0);
    r.rows.push_back({"map-arcsine", 10000, "ks_vs_arcsine", ks, 0.02, ks < 0.02});
    r.passed = ks < 0.02;
    r.detail = "KS = " + num(ks) + " (tol 0.02)";
  }

  void map_uniform_law(CriterionResult& r) {
    const Partition& part = boole_partition();
    const auto res = tied_down_experiment(boole(), part, InitialLaw::uniform(), 2000, part.y[0], 10000, boole_scaling(),
                                          stream(12));
    const double ks = ks_distance(res.emp, uniform_cdf, 0);
    const double ratio = res.rate() / res.predicted_rate;
    r.rows.push_back({"map-tieddown", 2000, "ks_u1_vs_uniform", ks, 0.05, ks < 0.05});
    r.rows.push_back({"map-tieddown", 2000, "rate_over_prediction", ratio, 0.1, std::abs(ratio - 1.0) <= 0.1});
    r.passed = ks < 0.05 && std::abs(ratio - 1.0) <= 0.1;
    r.detail = std::to_string(res.accepted) + " accepted, KS " + num(ks) + ", rate/prediction " + num(ratio);
  }

  void cross_engine(CriterionResult& r) {
    const Partition& part = boole_partition();
    const auto map_res = tied_down_experiment(boole(), part, InitialLaw::mu_y(boole(), part), 2048, part.y[0], 10000,
                                              boole_scaling(), stream(13));
    Parallelism p = stream(13);
    p.seed ^= 0xb51d6e;
    const auto bridge = bridge_sample_mc(boole_returns().table, 2048, 10000, p);
    const double ks = ks_two_sample(map_res.emp, bridge.emp);
    const double noise = std::sqrt(1.0 / static_cast<double>(map_res.accepted) + 1.0 / static_cast<double>(bridge.accepted));
    r.rows.push_back({"cross-engine", 2048, "ks_map_vs_bridge", ks, 3 * noise, ks < 3 * noise});
    r.passed = ks < 3 * noise;
    r.detail = "KS " + num(ks) + " vs 3 x noise " + num(3 * noise);
  }

  ValidationConfig cfg_;
  MapModel boole_ = BooleMap{};
  std::optional<RenewalTable> reference_;
  std::optional<Partition> partition_;
  std::optional<ReturnTableEstimate> returns_;
  std::optional<RenewalTable> scaling_;
};

}  // namespace tiedown
