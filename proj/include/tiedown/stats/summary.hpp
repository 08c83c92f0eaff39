#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csv.hpp"

namespace tiedown {

/// One line of a `summary` CSV.
struct SummaryRow {
  std::string experiment;
  std::int64_t n = 0;
  std::string metric;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

inline CsvTable summary_table(const std::vector<SummaryRow>& rows) {
  CsvTable t{schema::summary(), {}};
  for (const auto& r : rows)
    t.add_row({r.experiment, csv_cell(r.n), r.metric, csv_cell(r.value), csv_cell(r.tolerance), csv_cell(r.pass)});
  return t;
}

}  // namespace tiedown
