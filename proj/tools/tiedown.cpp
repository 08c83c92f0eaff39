// Command-line front end: one subcommand per experiment plus `validate`.
// Exit codes: 0 ok, 1 a reported check failed, 2 usage error, 3 numerical
// failure or timeout (also I/O failures).

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tiedown/bpy.hpp"
#include "tiedown/maps/experiments.hpp"
#include "tiedown/maps/spec_file.hpp"
#include "tiedown/renewal/bridge.hpp"
#include "tiedown/renewal/coefficients.hpp"
#include "tiedown/renewal/table_io.hpp"
#include "tiedown/stable.hpp"
#include "tiedown/stats/csv.hpp"
#include "tiedown/stats/svg.hpp"
#include "tiedown/stats/summary.hpp"
#include "tiedown/validation.hpp"

namespace fs = std::filesystem;
using namespace tiedown;

namespace {

struct Common {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out = "results";
  std::string name = "run";

  Parallelism par() const { return {seed, std::max(1u, workers)}; }
};

/// Output directory of one experiment run plus its summary rows.
class Run {
 public:
  Run(const Common& c, const std::string& experiment, const CLI::App& root) : experiment_(experiment) {
    dir_ = fs::path(c.out) / experiment / c.name;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    // Global options plus those of the active subcommand.
    std::ofstream echo(dir_ / "params.echo");
    std::istringstream all(root.config_to_str(true, false));
    for (std::string line; std::getline(all, line);) {
      const auto eq = line.find('=');
      const auto dot = line.find('.');
      if (dot == std::string::npos || dot > eq || line.compare(0, dot, experiment) == 0) echo << line << '\n';
    }
    if (!echo) throw IoError("cannot write " + (dir_ / "params.echo").string());
  }

  const fs::path& dir() const { return dir_; }
  void csv(const std::string& file, const CsvTable& t) const { write_csv(dir_ / file, t); }
  void svg(const std::string& file, const std::vector<SvgSeries>& s, const SvgStyle& st) const {
    write_svg(dir_ / file, s, st);
  }
  void check(std::int64_t n, const std::string& metric, double value, double tol, bool pass) {
    rows_.push_back({experiment_, n, metric, value, tol, pass});
  }
  void info(std::int64_t n, const std::string& metric, double value) { check(n, metric, value, 0.0, true); }
  void add(const std::vector<SummaryRow>& rows) { rows_.insert(rows_.end(), rows.begin(), rows.end()); }

  int finish() const {
    write_csv(dir_ / "summary.csv", summary_table(rows_));
    bool ok = true;
    for (const auto& r : rows_) {
      std::printf("%-18s n=%-8lld %-40s %-14.6g tol=%-10.4g %s\n", r.experiment.c_str(), static_cast<long long>(r.n),
                  r.metric.c_str(), r.value, r.tolerance, r.pass ? "pass" : "FAIL");
      ok = ok && r.pass;
    }
    std::printf("results in %s\n", dir_.string().c_str());
    return ok ? 0 : 1;
  }

 private:
  std::string experiment_;
  fs::path dir_;
  std::vector<SummaryRow> rows_;
};

std::vector<std::vector<double>> tensor_grid(const std::vector<double>& axis, std::size_t d) {
  std::vector<std::vector<double>> grid{{}};
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::vector<double>> next;
    for (const auto& g : grid)
      for (double a : axis) {
        auto h = g;
        h.push_back(a);
        next.push_back(std::move(h));
      }
    grid = std::move(next);
  }
  return grid;
}

RenewalTable load_or_build_table(const std::string& file, double alpha, const std::vector<double>& beta,
                                 double ell, double ell_power, std::int64_t n_max) {
  const SlowVariation sv = ell_power == 0.0 ? SlowVariation::constant(ell) : SlowVariation::log_power(ell, ell_power);
  if (!file.empty()) return read_table(file, sv);
  return make_stable_table(alpha, beta, sv, n_max);
}

struct TableFlags {
  double alpha = 0.5;
  std::vector<double> beta{0.5, 0.5};
  double ell = 1.0;
  double ell_power = 0.0;
  std::int64_t n_max = std::int64_t{1} << 20;
  std::string file;

  void add(CLI::App* app, std::int64_t default_n_max) {
    n_max = default_n_max;
    app->add_option("--alpha", alpha, "tail index in (0,1)")->capture_default_str();
    app->add_option("--beta", beta, "branch weights, comma separated")->delimiter(',')->capture_default_str();
    app->add_option("--ell", ell, "slowly varying constant c")->capture_default_str();
    app->add_option("--ell-power", ell_power, "use ell(t) = c log(e+t)^p")->capture_default_str();
    app->add_option("--nmax", n_max, "table horizon")->capture_default_str();
    app->add_option("--table", file, "read the return table from a file instead");
  }
  RenewalTable build() const { return load_or_build_table(file, alpha, beta, ell, ell_power, n_max); }
};

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tied-down occupation times: renewal and interval-map experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML/INI file (flags override it)");
  Common common;
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--workers", common.workers, "worker threads (output does not depend on it)")->capture_default_str();
  app.add_option("--out", common.out, "output root directory")->capture_default_str();
  app.add_option("--name", common.name, "run name (subdirectory)")->capture_default_str();

  // stable-density
  auto* sd = app.add_subcommand("stable-density", "one-sided stable density on a grid");
  double sd_alpha = 0.5, sd_scale = 1.0, sd_ymin = 0.05, sd_ymax = 20.0;
  int sd_points = 400;
  sd->add_option("--alpha", sd_alpha)->capture_default_str();
  sd->add_option("--scale", sd_scale)->capture_default_str();
  sd->add_option("--ymin", sd_ymin)->capture_default_str();
  sd->add_option("--ymax", sd_ymax)->capture_default_str();
  sd->add_option("--points", sd_points)->capture_default_str();

  // bpy-table
  auto* bt = app.add_subcommand("bpy-table", "BPY law: W moments, Stieltjes transform, U1 marginal");
  double bt_alpha = 0.5;
  std::vector<double> bt_beta{0.5, 0.5}, bt_lambda{0.5, 1.0, 2.0};
  std::size_t bt_samples = 1000000, bt_dump = 10000;
  bt->add_option("--alpha", bt_alpha)->capture_default_str();
  bt->add_option("--beta", bt_beta)->delimiter(',')->capture_default_str();
  bt->add_option("--lambda", bt_lambda)->delimiter(',')->capture_default_str();
  bt->add_option("--samples", bt_samples)->capture_default_str();
  bt->add_option("--dump", bt_dump, "draws written to bpy_samples.csv")->capture_default_str();

  // renewal-llt
  auto* rl = app.add_subcommand("renewal-llt", "local limit theorem deviations");
  TableFlags rl_t;
  rl_t.add(rl, std::int64_t{1} << 20);
  std::vector<std::int64_t> rl_k{50, 100, 200, 400};
  std::vector<double> rl_axis{0.25, 0.5, 1.0, 2.0};
  rl->add_option("--k", rl_k)->delimiter(',')->capture_default_str();
  rl->add_option("--grid", rl_axis, "grid axis values (tensor grid)")->delimiter(',')->capture_default_str();

  // renewal-lld
  auto* ld = app.add_subcommand("renewal-lld", "local large deviation ratios");
  TableFlags ld_t;
  ld_t.add(ld, std::int64_t{1} << 16);
  std::vector<std::int64_t> ld_n{256, 512, 1024, 2048}, ld_k{1, 2, 4, 8};
  ld->add_option("--n", ld_n)->delimiter(',')->capture_default_str();
  ld->add_option("--k", ld_k)->delimiter(',')->capture_default_str();

  // renewal-tieddown
  auto* td = app.add_subcommand("renewal-tieddown", "exact tied-down functionals (d = 2)");
  TableFlags td_t;
  td_t.add(td, std::int64_t{1} << 16);
  std::vector<std::int64_t> td_n{1024, 2048, 4096};
  std::size_t td_mc = 1000000;
  td->add_option("--n", td_n)->delimiter(',')->capture_default_str();
  td->add_option("--mc", td_mc, "BPY draws for the limit values")->capture_default_str();

  // renewal-bridge
  auto* rb = app.add_subcommand("renewal-bridge", "Monte Carlo renewal bridges (any d)");
  TableFlags rb_t;
  rb_t.add(rb, std::int64_t{1} << 16);
  std::int64_t rb_n = 2048;
  std::size_t rb_accepted = 10000;
  rb->add_option("--n", rb_n)->capture_default_str();
  rb->add_option("--accepted", rb_accepted)->capture_default_str();

  // map-returns
  auto* mr = app.add_subcommand("map-returns", "empirical return-time table of a map");
  std::string mr_map = "boole";
  std::size_t mr_samples = 1000000;
  std::int64_t mr_horizon = std::int64_t{1} << 16;
  mr->add_option("--map", mr_map, "'boole' or a map file")->capture_default_str();
  mr->add_option("--samples", mr_samples)->capture_default_str();
  mr->add_option("--horizon", mr_horizon)->capture_default_str();

  // map-arcsine
  auto* ma = app.add_subcommand("map-arcsine", "unconditioned occupation fractions");
  std::string ma_map = "boole";
  std::int64_t ma_n = 10000;
  std::size_t ma_orbits = 100000;
  ma->add_option("--map", ma_map)->capture_default_str();
  ma->add_option("--n", ma_n)->capture_default_str();
  ma->add_option("--orbits", ma_orbits)->capture_default_str();

  // map-tieddown
  auto* mt = app.add_subcommand("map-tieddown", "orbits conditioned on f^n(x) in A");
  std::string mt_map = "boole", mt_nu = "lebesgue";
  std::int64_t mt_n = 2000;
  std::size_t mt_accepted = 10000, mt_returns = 1000000;
  std::vector<double> mt_A;
  mt->add_option("--map", mt_map)->capture_default_str();
  mt->add_option("--n", mt_n)->capture_default_str();
  mt->add_option("--accepted", mt_accepted)->capture_default_str();
  mt->add_option("--nu", mt_nu, "lebesgue | mu-y")->capture_default_str();
  mt->add_option("--target", mt_A, "A = lo,hi inside Y (default: Y)")->delimiter(',')->expected(2);
  mt->add_option("--returns", mt_returns, "return samples used to fit b_n")->capture_default_str();

  // validate
  auto* va = app.add_subcommand("validate", "run the acceptance suite");
  bool va_quick = false, va_full = false;
  std::vector<int> va_only;
  va->add_flag("--quick", va_quick, "skip the full-only criteria");
  va->add_flag("--full", va_full, "run every criterion (default)");
  va->add_option("--only", va_only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const Parallelism par = common.par();

    if (*sd) {
      Run run(common, "stable-density", app);
      const StableParams p{sd_alpha, sd_scale};
      p.validate();
      CsvTable t{{"y", "psi"}, {}};
      const bool levy = sd_alpha == 0.5;
      if (levy) t.header.push_back("levy");
      SvgSeries s{"psi", {}, {}}, l{"Levy closed form", {}, {}};
      double worst = 0.0;
      for (int i = 0; i < sd_points; ++i) {
        const double y = sd_ymin + (sd_ymax - sd_ymin) * i / std::max(1, sd_points - 1);
        const double v = stable_density(p, y);
        std::vector<std::string> row{csv_cell(y), csv_cell(v)};
        s.x.push_back(y);
        s.y.push_back(v);
        if (levy) {
          const double e = detail::levy_density(sd_scale, y);
          worst = std::max(worst, std::abs(v - e));
          row.push_back(csv_cell(e));
          l.x.push_back(y);
          l.y.push_back(e);
        }
        t.add_row(row);
      }
      run.csv("density.csv", t);
      std::vector<SvgSeries> series{s};
      if (levy) series.push_back(l);
      run.svg("density.svg", series, {"one-sided stable density", "y", "psi(y)"});
      if (levy) run.check(sd_points, "max_abs_err_vs_levy", worst, 1e-6, worst < 1e-6);
      return run.finish();
    }

    if (*bt) {
      Run run(common, "bpy-table", app);
      const BpyParams p{bt_alpha, bt_beta};
      p.validate();
      const auto emp = bpy_empirical(p, bt_samples, par);
      const std::size_t d = p.dim();
      CsvTable dump{schema::bpy_samples(d), {}};
      for (std::size_t i = 0; i < std::min(bt_dump, emp.size()); ++i) {
        std::vector<std::string> row;
        for (std::size_t c = 0; c <= d; ++c) row.push_back(csv_cell(emp.value(i, c)));
        row.push_back(csv_cell(emp.weight(i)));
        dump.add_row(row);
      }
      run.csv("bpy_samples.csv", dump);
      const double m = static_cast<double>(emp.size());
      const double mean_weight = emp.total_weight() / m;
      run.info(0, "mean_weight", mean_weight);
      for (unsigned q = 1; q <= 3; ++q) {
        // Unnormalized weighted mean, matching bpy_expectation.
        CompensatedSum s, s2;
        for (std::size_t i = 0; i < emp.size(); ++i) {
          const double v = emp.weight(i) * std::pow(emp.value(i, d), q);
          s.add(v);
          s2.add(v * v);
        }
        const double mean = s.value() / m;
        const double se = std::sqrt(std::max(0.0, s2.value() / m - mean * mean) / m);
        const double exact = bpy_w_moment(bt_alpha, q);
        run.info(0, "E[W^" + std::to_string(q) + "]", mean);
        run.check(0, "E[W^" + std::to_string(q) + "]_z", std::abs(mean - exact) / se, 3.0, std::abs(mean - exact) < 3 * se);
      }
      if (d == 2) {
        for (double lam : bt_lambda) {
          CompensatedSum s, s2;
          for (std::size_t i = 0; i < emp.size(); ++i) {
            const double v = emp.weight(i) * std::pow(lam + emp.value(i, 0), -bt_alpha);
            s.add(v);
            s2.add(v * v);
          }
          const double mean = s.value() / m;
          const double se = std::sqrt(std::max(0.0, s2.value() / m - mean * mean) / m);
          const double exact = u1_stieltjes(p, lam);
          run.info(0, "stieltjes_lambda_" + fmt_num(lam), mean);
          run.check(0, "stieltjes_lambda_" + fmt_num(lam) + "_z", std::abs(mean - exact) / se, 3.0,
                    std::abs(mean - exact) < 3 * se);
        }
      }
      CsvTable cdf{{"t", "empirical_cdf", "closed_form"}, {}};
      const auto proj = emp.projection(0);
      SvgSeries se{"weighted ECDF of U1", {}, {}, true}, cf{"closed form (alpha = 1/2)", {}, {}};
      CompensatedSum cum;
      std::size_t idx = 0;
      for (int i = 0; i <= 100; ++i) {
        const double t = i / 100.0;
        while (idx < proj.size() && proj[idx].first <= t) cum.add(proj[idx++].second);
        const double e = cum.value() / emp.total_weight();
        const double c = (bt_alpha == 0.5 && d == 2) ? u1_cdf_half(bt_beta[0], t) : NAN;
        cdf.add_row({csv_cell(t), csv_cell(e), csv_cell(c)});
        se.x.push_back(t);
        se.y.push_back(e);
        if (bt_alpha == 0.5 && d == 2) {
          cf.x.push_back(t);
          cf.y.push_back(c);
        }
      }
      run.csv("u1_cdf.csv", cdf);
      run.svg("u1_cdf.svg", {se, cf}, {"marginal law of U1", "t", "P[U1 <= t]"});
      if (bt_alpha == 0.5 && d == 2) {
        const double b1 = bt_beta[0];
        const double ks = ks_distance(emp, [b1](double x) { return u1_cdf_half(b1, x); }, 0);
        run.check(static_cast<std::int64_t>(emp.size()), "ks_u1_vs_closed_form", ks, 0.005, ks < 0.005);
      }
      return run.finish();
    }

    if (*rl) {
      Run run(common, "renewal-llt", app);
      const RenewalTable table = rl_t.build();
      const auto grid = tensor_grid(rl_axis, table.dim());
      CsvTable t{schema::llt(table.dim()), {}};
      SvgSeries s{"max deviation", {}, {}};
      double prev = INFINITY;
      bool decreasing = true;
      for (auto k : rl_k) {
        const auto prof = llt_profile(table, k, grid);
        for (const auto& pt : prof.points) {
          std::vector<std::string> row{csv_cell(k)};
          for (double y : pt.y) row.push_back(csv_cell(y));
          row.push_back(csv_cell(pt.deviation));
          t.add_row(row);
        }
        run.info(k, "a_k", static_cast<double>(prof.a_k));
        run.info(k, "max_deviation", prof.max_deviation);
        decreasing = decreasing && prof.max_deviation < prev;
        prev = prof.max_deviation;
        s.x.push_back(static_cast<double>(k));
        s.y.push_back(prof.max_deviation);
      }
      run.csv("llt.csv", t);
      run.svg("llt.svg", {s}, {"local limit deviation", "k", "max deviation", true, true});
      run.check(0, "deviation_decreasing_in_k", decreasing ? 1.0 : 0.0, 0.0, decreasing);
      return run.finish();
    }

    if (*ld) {
      Run run(common, "renewal-lld", app);
      const RenewalTable table = ld_t.build();
      CsvTable t{schema::lld(), {}};
      double lo = INFINITY, hi = 0.0;
      std::vector<SvgSeries> series;
      for (auto k : ld_k) series.push_back({"k = " + std::to_string(k), {}, {}});
      for (auto n : ld_n) {
        for (std::size_t i = 0; i < ld_k.size(); ++i) {
          const auto k = ld_k[i];
          if (n < scaling_a(table, k)) continue;
          const double q = lld_ratio(table, n, k);
          t.add_row({csv_cell(n), csv_cell(k), csv_cell(q)});
          lo = std::min(lo, q);
          hi = std::max(hi, q);
          series[i].x.push_back(static_cast<double>(n));
          series[i].y.push_back(q);
        }
      }
      run.csv("lld.csv", t);
      run.svg("lld.svg", series, {"local large deviation ratio", "n", "ratio", true, false});
      if (hi > 0) run.check(0, "max_over_min", hi / lo, 10.0, hi / lo < 10.0);
      return run.finish();
    }

    if (*td) {
      Run run(common, "renewal-tieddown", app);
      const RenewalTable table = td_t.build();
      const BpyParams bp{table.alpha(), table.beta()};
      struct G {
        std::string name;
        BpyFunction g;
      };
      const std::vector<G> gs{
          {"one", [](std::span<const double>, double) { return 1.0; }},
          {"u1_le_0.25", [](std::span<const double> u, double) { return u[0] <= 0.25 ? 1.0 : 0.0; }},
          {"u1_le_0.5", [](std::span<const double> u, double) { return u[0] <= 0.5 ? 1.0 : 0.0; }},
          {"u1_le_0.75", [](std::span<const double> u, double) { return u[0] <= 0.75 ? 1.0 : 0.0; }},
          {"w_min_5", [](std::span<const double>, double w) { return std::min(w, 5.0); }}};
      std::vector<BpyFunction> fns;
      for (const auto& g : gs) fns.push_back(g.g);
      const auto limits = bpy_expectations(bp, fns, td_mc, par);
      CsvTable t{{"n", "g", "value", "limit", "limit_se", "abs_diff"}, {}};
      std::vector<SvgSeries> cdfs;
      for (auto n : td_n) {
        const auto law = tied_down_law(table, n);
        for (std::size_t i = 0; i < gs.size(); ++i) {
          const double v = law.functional(gs[i].g);
          t.add_row({csv_cell(n), gs[i].name, csv_cell(v), csv_cell(limits[i].value), csv_cell(limits[i].std_error),
                     csv_cell(std::abs(v - limits[i].value))});
          run.info(n, gs[i].name + "_abs_diff", std::abs(v - limits[i].value));
        }
        SvgSeries s{"n = " + std::to_string(n), {}, {}};
        for (int i = 0; i <= 100; ++i) {
          s.x.push_back(i / 100.0);
          s.y.push_back(law.u1_cdf(i / 100.0));
        }
        cdfs.push_back(s);
      }
      run.csv("tieddown.csv", t);
      run.svg("u1_cdf.svg", cdfs, {"tied-down law of n1/n", "t", "P[n1/n <= t | return at n]"});
      return run.finish();
    }

    if (*rb) {
      Run run(common, "renewal-bridge", app);
      const RenewalTable table = rb_t.build();
      const auto res = bridge_sample_mc(table, rb_n, rb_accepted, par);
      CsvTable t{schema::bridge(table.dim()), {}};
      for (const auto& rec : res.records) {
        std::vector<std::string> row{csv_cell(rb_n), csv_cell(rec[0])};
        for (std::size_t j = 1; j < rec.size(); ++j) row.push_back(csv_cell(rec[j]));
        t.add_row(row);
      }
      run.csv("bridge.csv", t);
      run.info(rb_n, "acceptance_rate", res.rate());
      run.info(rb_n, "one_over_w_n", 1.0 / normalizer_w(table, rb_n));
      if (table.dim() == 2) {
        const auto law = tied_down_law(table, rb_n);
        const double ks = ks_distance(res.emp, [&](double x) { return law.u1_cdf(x); }, 0);
        const double noise = 1.0 / std::sqrt(static_cast<double>(res.accepted));
        run.check(rb_n, "ks_u1_vs_exact", ks, 3 * noise, ks < 3 * noise);
        run.info(rb_n, "exact_u_n", law.total());
      }
      return run.finish();
    }

    if (*mr) {
      Run run(common, "map-returns", app);
      const MapModel m = load_map(mr_map);
      const Partition part = build_partition(m);
      ReturnTableOptions opt;
      opt.horizon = mr_horizon;
      const auto est = estimate_return_table(m, part, mr_samples, par, opt);
      const std::size_t d = part.dim();
      CsvTable t{schema::concat({"n"}, schema::indexed("tail", d)), {}};
      std::vector<SvgSeries> series;
      for (std::size_t j = 0; j < d; ++j) series.push_back({"branch " + std::to_string(j + 1), {}, {}});
      for (std::int64_t n = 1; n <= mr_horizon; n = n < 16 ? n + 1 : n * 2) {
        std::vector<std::string> row{csv_cell(n)};
        for (std::size_t j = 0; j < d; ++j) {
          const double v = est.branch_tail(j, n);
          row.push_back(csv_cell(v));
          series[j].x.push_back(static_cast<double>(n));
          series[j].y.push_back(v);
        }
        t.add_row(row);
      }
      run.csv("returns.csv", t);
      run.svg("returns.svg", series, {"empirical branch tails", "n", "mass of >= n steps", true, true});
      write_table((run.dir() / "table.txt").string(), est.table);
      run.check(static_cast<std::int64_t>(mr_samples), "tail_exponent_fit", est.alpha_fit, 0.05,
                std::abs(est.alpha_fit - map_alpha(m)) <= 0.05);
      run.info(0, "ell_fit", est.ell_fit);
      for (std::size_t j = 0; j < d; ++j) {
        run.info(0, "beta_fit_" + std::to_string(j + 1), est.beta_fit[j]);
        run.info(0, "overflow_count_" + std::to_string(j + 1), static_cast<double>(est.overflow_counts[j]));
      }
      run.info(0, "r00", est.table.r00());
      run.info(0, "capped_chains", static_cast<double>(est.capped));
      return run.finish();
    }

    if (*ma) {
      Run run(common, "map-arcsine", app);
      const MapModel m = load_map(ma_map);
      const Partition part = build_partition(m);
      const auto emp = occupation_experiment(m, part, InitialLaw::uniform(), ma_n, ma_orbits, par);
      const std::size_t d = part.dim();
      CsvTable t{schema::concat(schema::indexed("frac_a", d), {"frac_y"}), {}};
      for (std::size_t i = 0; i < emp.size(); ++i) {
        std::vector<std::string> row;
        for (std::size_t c = 0; c <= d; ++c) row.push_back(csv_cell(emp.value(i, c)));
        t.add_row(row);
      }
      run.csv("occupation.csv", t);
      SvgSeries e{"empirical", {}, {}, true}, a{"(2/pi) arcsin sqrt(t)", {}, {}};
      const auto proj = emp.projection(0);
      for (std::size_t i = 0; i < proj.size(); i += std::max<std::size_t>(1, proj.size() / 400)) {
        e.x.push_back(proj[i].first);
        e.y.push_back(static_cast<double>(i + 1) / static_cast<double>(proj.size()));
      }
      for (int i = 0; i <= 200; ++i) {
        a.x.push_back(i / 200.0);
        a.y.push_back(arcsine_cdf(i / 200.0));
      }
      run.svg("arcsine.svg", {e, a}, {"occupation fraction of A_1", "t", "CDF"});
      const double ks = ks_distance(emp, arcsine_cdf, 0);
      if (std::holds_alternative<BooleMap>(m))
        run.check(ma_n, "ks_vs_arcsine", ks, 0.02, ks < 0.02);
      else
        run.info(ma_n, "ks_vs_arcsine", ks);
      return run.finish();
    }

    if (*mt) {
      Run run(common, "map-tieddown", app);
      const MapModel m = load_map(mt_map);
      const Partition part = build_partition(m);
      Parallelism rp = par;
      rp.seed ^= 0x5eed0010;
      const auto est = estimate_return_table(m, part, mt_returns, rp);
      const RenewalTable scaling = scaling_table(m, est, std::max<std::int64_t>(std::int64_t{1} << 16, 2 * mt_n));
      InitialLaw nu = mt_nu == "mu-y" ? InitialLaw::mu_y(m, part) : InitialLaw::uniform();
      if (mt_nu != "mu-y" && mt_nu != "lebesgue") throw InvalidParameter("--nu must be lebesgue or mu-y");
      std::pair<double, double> A = part.y.front();
      if (!mt_A.empty()) A = {mt_A[0], mt_A[1]};
      const auto res = tied_down_experiment(m, part, nu, mt_n, A, mt_accepted, scaling, par);
      const std::size_t d = part.dim();
      CsvTable t{schema::map_accept(d), {}};
      for (const auto& r : res.records) {
        std::vector<std::string> row{csv_cell(r.x0), csv_cell(mt_n)};
        for (auto v : r.s_a) row.push_back(csv_cell(v));
        row.push_back(csv_cell(r.s_y));
        t.add_row(row);
      }
      run.csv("map_accept.csv", t);
      run.info(mt_n, "acceptance_rate", res.rate());
      run.info(mt_n, "b_n", res.b_n);
      const double ks = ks_distance(res.emp, uniform_cdf, 0);
      SvgSeries e{"conditional ECDF of S_A1(n)/n", {}, {}, true}, u{"uniform", {0, 1}, {0, 1}};
      const auto proj = res.emp.projection(0);
      for (std::size_t i = 0; i < proj.size(); i += std::max<std::size_t>(1, proj.size() / 400)) {
        e.x.push_back(proj[i].first);
        e.y.push_back(static_cast<double>(i + 1) / static_cast<double>(proj.size()));
      }
      run.svg("tieddown.svg", {e, u}, {"tied-down occupation fraction", "t", "CDF"});
      if (std::holds_alternative<BooleMap>(m)) {
        run.check(mt_n, "ks_u1_vs_uniform", ks, 0.05, ks < 0.05);
        if (mt_nu == "lebesgue") {
          const double ratio = res.rate() / res.predicted_rate;
          run.check(mt_n, "rate_over_prediction", ratio, 0.1, std::abs(ratio - 1.0) <= 0.1);
        }
      } else {
        run.info(mt_n, "ks_u1_vs_uniform", ks);
      }
      return run.finish();
    }

    if (*va) {
      if (va_quick && va_full) throw InvalidParameter("--quick and --full are exclusive");
      Run run(common, "validate", app);
      Validator v({par, va_quick});
      std::vector<int> ids = va_only;
      if (ids.empty())
        for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
      bool ok = true;
      for (int id : ids) {
        const auto r = v.run(id);
        std::printf("%-4s %2d  %-36s %8.2fs  %s\n", r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL"), id,
                    r.title.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        ok = ok && r.passed;
        run.add(r.rows);
      }
      const int rc = run.finish();
      return ok ? rc : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == Error::Kind::usage ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
