#pragma once

// Plain-text table files:
//
//   alpha beta_1 ... beta_d r00 N_max
//   j n r            (one line per nonzero r[j][n], 1 <= j <= d, 1 <= n <= N_max)
//   j tail r         (optional: mass of excursions longer than N_max in branch j)
//
// Blank lines and lines starting with '#' are ignored. Numbers are parsed
// with std::from_chars (correctly rounded). A total mass within 1e-9 of one
// is renormalized; anything further off is rejected.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"
#include "table.hpp"

namespace tiedown {

namespace detail {

inline double parse_double(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(where + ": bad number '" + std::string(tok) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view tok, const std::string& where) {
  std::int64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(where + ": bad integer '" + std::string(tok) + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

inline RenewalTable parse_table(std::istream& in, const std::string& name = "<table>",
                                SlowVariation ell = SlowVariation::constant(1.0)) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    header = std::move(toks);
    break;
  }
  if (header.size() < 4) throw ParseError(name + ": header needs alpha, beta_1..beta_d, r00, N_max");
  const std::string where = name + ":" + std::to_string(lineno);
  const std::size_t d = header.size() - 3;
  const double alpha = detail::parse_double(header[0], where);
  std::vector<double> beta(d);
  for (std::size_t j = 0; j < d; ++j) beta[j] = detail::parse_double(header[1 + j], where);
  double r00 = detail::parse_double(header[d + 1], where);
  const std::int64_t n_max = detail::parse_int(header[d + 2], where);
  if (n_max < 1 || n_max > (std::int64_t{1} << 28)) throw ParseError(where + ": N_max out of range");

  std::vector<std::vector<double>> r(d, std::vector<double>(n_max + 1, 0.0));
  std::vector<double> overflow(d, 0.0);
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    const std::string at = name + ":" + std::to_string(lineno);
    if (toks.size() != 3) throw ParseError(at + ": expected 'j n r'");
    const std::int64_t j = detail::parse_int(toks[0], at);
    if (j < 1 || j > static_cast<std::int64_t>(d)) throw ParseError(at + ": branch index out of range");
    const double v = detail::parse_double(toks[2], at);
    if (!(v >= 0.0)) throw ParseError(at + ": negative mass");
    if (toks[1] == "tail") {
      overflow[j - 1] += v;
      continue;
    }
    const std::int64_t n = detail::parse_int(toks[1], at);
    if (n < 1 || n > n_max) throw ParseError(at + ": n outside 1..N_max");
    r[j - 1][n] += v;
  }

  CompensatedSum total;
  total.add(r00);
  for (const auto& row : r)
    for (double x : row) total.add(x);
  for (double x : overflow) total.add(x);
  const double mass = total.value();
  if (std::abs(mass - 1.0) >= 1e-9) throw ParseError(name + ": total mass " + std::to_string(mass) + " is not 1");
  if (mass != 1.0) {
    const double s = 1.0 / mass;
    r00 *= s;
    for (auto& row : r)
      for (double& x : row) x *= s;
    for (double& x : overflow) x *= s;
  }
  return RenewalTable(alpha, std::move(beta), ell, r00, std::move(r), std::move(overflow));
}

inline RenewalTable read_table(const std::string& path, SlowVariation ell = SlowVariation::constant(1.0)) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table file " + path);
  return parse_table(in, path, ell);
}

inline void format_table(std::ostream& out, const RenewalTable& t) {
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << num(t.alpha());
  for (double b : t.beta()) out << ' ' << num(b);
  out << ' ' << num(t.r00()) << ' ' << t.n_max() << '\n';
  for (std::size_t j = 0; j < t.dim(); ++j) {
    for (std::int64_t n = 1; n <= t.n_max(); ++n)
      if (t.r(j, n) != 0.0) out << (j + 1) << ' ' << n << ' ' << num(t.r(j, n)) << '\n';
    if (t.overflow(j) != 0.0) out << (j + 1) << " tail " << num(t.overflow(j)) << '\n';
  }
}

inline void write_table(const std::string& path, const RenewalTable& t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write table file " + path);
  format_table(out, t);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace tiedown
