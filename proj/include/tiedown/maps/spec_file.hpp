#pragma once

// Map description files. Grammar (one directive per line, '#' starts a
// comment, blank lines ignored):
//
//   map boole
//
// or
//
//   map polynomial
//   alpha <real in (0,1)>
//   breaks <e_1> ... <e_{d-1}>      strictly increasing in (0,1)
//
// `breaks` are the interval endpoints between branches, so the branch
// count is one more than the number of breaks.

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "../error.hpp"
#include "model.hpp"

namespace tiedown {

inline MapModel parse_map_spec(std::istream& is, const std::string& name = "<map>") {
  std::string kind;
  double alpha = -1.0;
  std::vector<double> breaks;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    auto where = [&] { return name + ":" + std::to_string(lineno) + ": "; };
    if (key == "map") {
      if (!(ss >> kind)) throw ParseError(where() + "map needs a name");
    } else if (key == "alpha") {
      if (!(ss >> alpha)) throw ParseError(where() + "alpha needs a number");
    } else if (key == "breaks") {
      double b;
      while (ss >> b) breaks.push_back(b);
      if (!ss.eof()) throw ParseError(where() + "breaks must be numbers");
    } else {
      throw ParseError(where() + "unknown directive '" + key + "'");
    }
    std::string extra;
    if (key != "breaks" && ss >> extra) throw ParseError(where() + "trailing text '" + extra + "'");
  }
  if (kind == "boole") {
    if (alpha >= 0.0 || !breaks.empty()) throw ParseError(name + ": the Boole map takes no parameters");
    return BooleMap{};
  }
  if (kind == "polynomial") {
    if (alpha < 0.0) throw ParseError(name + ": polynomial map needs alpha");
    return PolynomialMap(alpha, breaks);
  }
  if (kind.empty()) throw ParseError(name + ": missing 'map' directive");
  throw UnsupportedMap("'" + kind + "'");
}

inline MapModel read_map_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return parse_map_spec(is, path.string());
}

/// Built-in name or path to a description file.
inline MapModel load_map(const std::string& name_or_path) {
  if (name_or_path == "boole") return BooleMap{};
  return read_map_spec(name_or_path);
}

}  // namespace tiedown
