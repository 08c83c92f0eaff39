#pragma once

// CSV emission and parsing. Numbers are written with %.17g so a parse of the
// emitted text reproduces every double exactly.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "../error.hpp"

namespace tiedown {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw InvalidParameter("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                             std::to_string(header.size()));
    rows.push_back(std::move(row));
  }

  bool operator==(const CsvTable&) const = default;
};

inline std::string csv_cell(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_cell(std::int64_t x) { return std::to_string(x); }
inline std::string csv_cell(int x) { return std::to_string(x); }
inline std::string csv_cell(std::size_t x) { return std::to_string(x); }
inline std::string csv_cell(bool x) { return x ? "true" : "false"; }
inline std::string csv_cell(std::string s) { return s; }
inline std::string csv_cell(const char* s) { return s; }

/// Column headers of the fixed report schemas.
namespace schema {

inline std::vector<std::string> indexed(const std::string& prefix, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t j = 1; j <= d; ++j) out.push_back(prefix + std::to_string(j));
  return out;
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::vector<std::string> bpy_samples(std::size_t d) { return concat(indexed("u", d), {"w", "weight"}); }
inline std::vector<std::string> bridge(std::size_t d) { return concat({"n", "k"}, indexed("n", d)); }
inline std::vector<std::string> map_accept(std::size_t d) {
  return concat(concat({"x0", "n"}, indexed("sa", d)), {"sy"});
}
inline std::vector<std::string> llt(std::size_t d) { return concat(concat({"k"}, indexed("y", d)), {"deviation"}); }
inline std::vector<std::string> lld() { return {"n", "k", "ratio"}; }
inline std::vector<std::string> summary() { return {"experiment", "n", "metric", "value", "tolerance", "pass"}; }

}  // namespace schema

inline void write_csv(std::ostream& os, const CsvTable& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\"\n") != std::string::npos) throw InvalidParameter("CSV cell needs quoting: " + cells[i]);
      os << (i ? "," : "") << cells[i];
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(os, t);
  if (!os) throw IoError("write failed: " + path.string());
}

inline CsvTable parse_csv(std::istream& is, const std::string& name = "<csv>") {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      t.header = split(line);
      continue;
    }
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ParseError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) + " cells");
    t.rows.push_back(std::move(cells));
  }
  if (lineno == 0) throw ParseError(name + ": missing header");
  return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return parse_csv(is, path.string());
}

}  // namespace tiedown
