#pragma once

// failure_curves.csv: `transformer_id,year,mean_F`, one row per transformer
// and year 1..horizon, transformers in a stable order, years ascending.

#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "xfrisk/csv.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/model.hpp"

namespace xfrisk {

inline void write_failure_curves(const FailureCurveSet& curves, std::ostream& out) {
  out << "transformer_id,year,mean_F\n";
  for (std::size_t x = 0; x < curves.size(); ++x) {
    for (int t = 1; t <= curves.horizon(); ++t) {
      out << curves.id(x) << ',' << t << ',' << csv::format_double(curves.at(x, t)) << '\n';
    }
  }
}

/// Reads and validates a curve file: every transformer must list years
/// 1..H contiguously with the same H, values in [0, 1], nondecreasing.
inline FailureCurveSet read_failure_curves(std::istream& in, const std::string& name = "failure_curves.csv") {
  csv::Reader r(in, name, {"transformer_id", "year", "mean_F"});
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    const std::string id(f[0]);
    int year = 0;
    double value = 0.0;
    if (id.empty()) r.error("empty transformer id");
    if (!csv::parse_int(f[1], year)) r.error("year is not an integer");
    if (!csv::parse_double(f[2], value)) r.error("mean_F is not a number");
    auto [it, inserted] = index.try_emplace(id, ids.size());
    if (inserted) {
      ids.push_back(id);
      rows.emplace_back();
    }
    auto& row = rows[it->second];
    if (year != static_cast<int>(row.size()) + 1) {
      r.error("years for '" + id + "' must run 1, 2, ... without gaps (got " + std::to_string(year) + ")");
    }
    row.push_back(value);
  }
  if (ids.empty()) fail(ErrorKind::Data, name + ": no curves");
  const int horizon = static_cast<int>(rows.front().size());
  std::vector<double> values;
  values.reserve(ids.size() * static_cast<std::size_t>(horizon));
  for (std::size_t x = 0; x < ids.size(); ++x) {
    if (static_cast<int>(rows[x].size()) != horizon) {
      fail(ErrorKind::Data, name + ": transformer '" + ids[x] + "' has " + std::to_string(rows[x].size()) +
                                " years, expected " + std::to_string(horizon));
    }
    values.insert(values.end(), rows[x].begin(), rows[x].end());
  }
  FailureCurveSet curves(std::move(ids), horizon, std::move(values));
  curves.validate();
  return curves;
}

}  // namespace xfrisk
