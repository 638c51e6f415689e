#pragma once

#include <algorithm>
#include <atomic>
#include <set>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "xfrisk/xfrisk.hpp"

namespace testing_support {

using namespace xfrisk;

inline FailureCurveSet make_curves(const std::vector<std::vector<double>>& rows) {
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t x = 0; x < rows.size(); ++x) {
    ids.push_back("X" + std::to_string(x));
    values.insert(values.end(), rows[x].begin(), rows[x].end());
  }
  return FailureCurveSet(std::move(ids), rows.empty() ? 1 : static_cast<int>(rows.front().size()), std::move(values));
}

/// Uniform integer in [0, n).
inline std::size_t pick(RandomStream& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

/// Random monotone curves in [0, 1]; some rows stay at zero.
inline FailureCurveSet random_curves(RandomStream& rng, std::size_t n, int horizon, double zero_row_p = 0.15) {
  std::vector<std::vector<double>> rows(n);
  for (auto& row : rows) {
    double f = 0.0;
    const bool zero = rng.bernoulli(zero_row_p);
    for (int t = 0; t < horizon; ++t) {
      if (!zero) f = std::min(1.0, f + rng.uniform() * rng.uniform() * 0.6);
      row.push_back(f);
    }
  }
  return make_curves(rows);
}

inline HourlyTimeSeries constant_series(double v, std::size_t hours = kHoursPerYear, int year = 2023) {
  return HourlyTimeSeries::constant(year_start(year), hours, v);
}

/// One transformer per entry of `meters_per_transformer`, each meter with a
/// constant baseload, a constant ambient temperature, no devices.
inline FeederData small_feeder(const std::vector<std::size_t>& meters_per_transformer, double base_kw,
                               double rating_kva, double ambient_c, int year = 2023) {
  FeederData f;
  f.base_year = year;
  f.ambient_k = constant_series(ambient_c + kZeroCelsiusK, kHoursPerYear, year);
  std::size_t m = 0;
  for (std::size_t x = 0; x < meters_per_transformer.size(); ++x) {
    Transformer t;
    t.id = "T" + std::to_string(x);
    t.rating_kva = rating_kva;
    for (std::size_t k = 0; k < meters_per_transformer[x]; ++k) {
      Meter meter;
      meter.id = "M" + std::to_string(m++);
      meter.transformer_id = t.id;
      meter.baseload = constant_series(base_kw, kHoursPerYear, year);
      t.meters.push_back(meter.id);
      f.topology.meter_to_transformer.emplace(meter.id, t.id);
      f.meters.push_back(std::move(meter));
    }
    f.topology.transformers.push_back(std::move(t));
  }
  std::sort(f.meters.begin(), f.meters.end(), [](const Meter& a, const Meter& b) { return a.id < b.id; });
  return f;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("xfrisk_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

template <typename F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected an xfrisk::Error");
}

}  // namespace testing_support
