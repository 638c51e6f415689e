#pragma once

// Feeder input files: topology, AMI baseloads, device records and daily
// temperature extremes. Formats are documented in docs/formats.md.
//
// All series are folded onto the canonical 365-day year: February 29 is
// dropped, hour 0 is 00:00 on January 1 of the base year.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "xfrisk/csv.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/model.hpp"
#include "xfrisk/time_series.hpp"

namespace xfrisk {

namespace files {
inline constexpr const char* kTransformers = "transformers.csv";
inline constexpr const char* kMeters = "meters.csv";
inline constexpr const char* kAmi = "ami.csv";
inline constexpr const char* kDevices = "devices.csv";
inline constexpr const char* kTemperature = "temperature.csv";
}  // namespace files

// ---------------------------------------------------------------------------
// Dates and timestamps

struct DateHour {
  std::chrono::year_month_day date;
  int hour = 0;
};

inline std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  if (!csv::parse_int(s.substr(0, 4), y) || !csv::parse_int(s.substr(5, 2), m) ||
      !csv::parse_int(s.substr(8, 2), d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok() || s.size() != 10) return std::nullopt;
  return ymd;
}

/// ISO-8601 local timestamp on the hour: YYYY-MM-DDTHH:MM[:SS], optionally
/// followed by Z or a UTC offset (ignored; the feeder has one local zone).
inline std::optional<DateHour> parse_timestamp(std::string_view s) {
  if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  int hour = 0, minute = 0, second = 0;
  if (!csv::parse_int(s.substr(11, 2), hour) || !csv::parse_int(s.substr(14, 2), minute)) return std::nullopt;
  std::string_view rest = s.substr(16);
  if (rest.size() >= 3 && rest[0] == ':') {
    if (!csv::parse_int(rest.substr(1, 2), second)) return std::nullopt;
    rest.remove_prefix(3);
  }
  if (!(rest.empty() || rest == "Z" || ((rest[0] == '+' || rest[0] == '-') && rest.size() == 6))) {
    return std::nullopt;
  }
  if (hour < 0 || hour > 23 || minute != 0 || second != 0) return std::nullopt;
  return DateHour{*date, hour};
}

inline std::string format_date(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

/// Calendar date of a canonical day index within `base_year`.
inline std::chrono::year_month_day canonical_date(int base_year, std::size_t day_of_year) {
  using namespace std::chrono;
  std::size_t d = day_of_year;
  unsigned m = 0;
  while (d >= kCanonicalMonthDays[m]) d -= kCanonicalMonthDays[m++];
  return year{base_year} / month{m + 1} / day{static_cast<unsigned>(d + 1)};
}

// ---------------------------------------------------------------------------
// Topology

inline Topology parse_topology(std::istream& transformers_in, std::istream& meters_in,
                               const std::string& transformers_name = files::kTransformers,
                               const std::string& meters_name = files::kMeters) {
  Topology topo;
  std::vector<std::string_view> f;
  {
    csv::Reader r(transformers_in, transformers_name, {"transformer_id", "rating_kva", "initial_age_years"});
    std::unordered_map<std::string, std::size_t> index;
    while (r.next(f)) {
      Transformer x;
      x.id = std::string(f[0]);
      if (x.id.empty()) r.error("empty transformer id");
      if (!csv::parse_double(f[1], x.rating_kva)) r.error("rating_kva is not a number");
      if (!(x.rating_kva > 0.0)) r.error("transformer '" + x.id + "' has rating <= 0");
      if (f[2].empty()) {
        x.initial_age_years = 0.0;
      } else if (!csv::parse_double(f[2], x.initial_age_years) || x.initial_age_years < 0.0) {
        r.error("initial_age_years must be a non-negative number");
      }
      if (!index.emplace(x.id, topo.transformers.size()).second) {
        fail(ErrorKind::Topology, transformers_name + ":" + std::to_string(r.line_number()) +
                                      ": duplicate transformer id '" + x.id + "'");
      }
      topo.transformers.push_back(std::move(x));
    }
    csv::Reader m(meters_in, meters_name, {"meter_id", "transformer_id"});
    while (m.next(f)) {
      const std::string meter(f[0]);
      const std::string xfmr(f[1]);
      if (meter.empty()) m.error("empty meter id");
      auto it = index.find(xfmr);
      if (it == index.end()) {
        fail(ErrorKind::Topology, meters_name + ":" + std::to_string(m.line_number()) + ": meter '" +
                                      meter + "' references unknown transformer '" + xfmr + "'");
      }
      if (!topo.meter_to_transformer.emplace(meter, xfmr).second) {
        fail(ErrorKind::Topology, meters_name + ":" + std::to_string(m.line_number()) + ": meter '" +
                                      meter + "' is mapped more than once");
      }
      topo.transformers[it->second].meters.push_back(meter);
    }
  }
  topo.validate();
  return topo;
}

inline void write_topology(const Topology& topo, std::ostream& transformers_out, std::ostream& meters_out) {
  transformers_out << "transformer_id,rating_kva,initial_age_years\n";
  meters_out << "meter_id,transformer_id\n";
  for (const auto& x : topo.transformers) {
    transformers_out << x.id << ',' << csv::format_double(x.rating_kva) << ','
                     << csv::format_double(x.initial_age_years) << '\n';
    for (const auto& m : x.meters) meters_out << m << ',' << x.id << '\n';
  }
}

// ---------------------------------------------------------------------------
// AMI loads

inline constexpr double kMaxMissingFraction = 0.05;

struct AmiData {
  int base_year = 0;
  std::map<std::string, HourlyTimeSeries> loads;  // canonical-year kW series
};

/// Fills NaN gaps with the same hour of the previous day; gaps on the first
/// day take the same hour of the next day that has a reading.
inline void fill_gaps(std::vector<double>& values, const std::string& meter) {
  for (std::size_t h = 0; h < values.size(); ++h) {
    if (!std::isnan(values[h])) continue;
    if (h >= kHoursPerDay) {
      values[h] = values[h - kHoursPerDay];
      continue;
    }
    for (std::size_t k = h + kHoursPerDay; k < values.size(); k += kHoursPerDay) {
      if (!std::isnan(values[k])) {
        values[h] = values[k];
        break;
      }
    }
    if (std::isnan(values[h])) {
      fail(ErrorKind::Data, "meter '" + meter + "' has no reading at hour " + std::to_string(h) +
                                " of any day; cannot fill");
    }
  }
}

/// Long-format `meter_id,timestamp,kw`, one base year per meter.
inline AmiData parse_ami(std::istream& in, const std::string& name = files::kAmi) {
  csv::Reader r(in, name, {"meter_id", "timestamp", "kw"});
  std::map<std::string, std::vector<double>> raw;
  std::optional<int> base_year;
  std::vector<std::string_view> f;
  std::string last_meter;
  std::vector<double>* current = nullptr;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  while (r.next(f)) {
    if (current == nullptr || f[0] != last_meter) {
      last_meter = std::string(f[0]);
      if (last_meter.empty()) r.error("empty meter id");
      auto [it, inserted] = raw.try_emplace(last_meter);
      if (inserted) it->second.assign(kHoursPerYear, nan);
      current = &it->second;
    }
    auto ts = parse_timestamp(f[1]);
    if (!ts) r.error("malformed timestamp '" + std::string(f[1]) + "'");
    const int y = static_cast<int>(ts->date.year());
    if (!base_year) base_year = y;
    if (y != *base_year) {
      r.error("timestamp " + std::string(f[1]) + " is outside base year " + std::to_string(*base_year));
    }
    double kw = 0.0;
    if (!csv::parse_double(f[2], kw)) r.error("kw is not a number");
    if (kw < 0.0) {
      r.error("negative reading " + std::string(f[2]) + " kW for meter '" + last_meter + "' at " +
              std::string(f[1]));
    }
    const int day = canonical_day_of_year(ts->date);
    if (day < 0) continue;  // February 29
    const std::size_t h = static_cast<std::size_t>(day) * kHoursPerDay + static_cast<std::size_t>(ts->hour);
    if (!std::isnan((*current)[h])) {
      r.error("duplicate reading for meter '" + last_meter + "' at " + std::string(f[1]));
    }
    (*current)[h] = kw;
  }
  AmiData out;
  if (!base_year) fail(ErrorKind::Data, name + ": no readings");
  out.base_year = *base_year;
  const auto epoch = year_start(out.base_year);
  const auto max_missing = static_cast<std::size_t>(kMaxMissingFraction * static_cast<double>(kHoursPerYear));
  for (auto& [meter, values] : raw) {
    const auto missing = static_cast<std::size_t>(std::count_if(values.begin(), values.end(),
                                                                [](double v) { return std::isnan(v); }));
    if (missing > max_missing) {
      fail(ErrorKind::Data, name + ": meter '" + meter + "' is missing " + std::to_string(missing) +
                                " of " + std::to_string(kHoursPerYear) + " hours (more than 5%)");
    }
    fill_gaps(values, meter);
    out.loads.emplace(meter, HourlyTimeSeries(epoch, std::move(values)));
  }
  return out;
}

inline void write_ami(const AmiData& ami, std::ostream& out) {
  out << "meter_id,timestamp,kw\n";
  char ts[32];
  for (const auto& [meter, series] : ami.loads) {
    for (std::size_t h = 0; h < series.size(); ++h) {
      const auto d = canonical_date(ami.base_year, (h / kHoursPerDay) % kDaysPerYear);
      std::snprintf(ts, sizeof(ts), "%sT%02zu:00:00", format_date(d).c_str(), h % kHoursPerDay);
      out << meter << ',' << ts << ',' << csv::format_double(series[h]) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Device records

struct DeviceRecord {
  bool has_hp = false;
  bool has_ev = false;
};

inline std::map<std::string, DeviceRecord> parse_devices(std::istream& in, const std::string& name = files::kDevices) {
  csv::Reader r(in, name, {"meter_id", "has_hp", "has_ev"});
  std::map<std::string, DeviceRecord> out;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    DeviceRecord rec;
    if (!csv::parse_bool(f[1], rec.has_hp) || !csv::parse_bool(f[2], rec.has_ev)) {
      r.error("has_hp and has_ev must be booleans (true/false/1/0)");
    }
    if (!out.emplace(std::string(f[0]), rec).second) r.error("duplicate meter '" + std::string(f[0]) + "'");
  }
  return out;
}

inline void write_devices(const std::map<std::string, DeviceRecord>& devices, std::ostream& out) {
  out << "meter_id,has_hp,has_ev\n";
  for (const auto& [meter, rec] : devices) {
    out << meter << ',' << (rec.has_hp ? "true" : "false") << ',' << (rec.has_ev ? "true" : "false") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Temperature

struct DailyTemperatureRecord {
  std::chrono::year_month_day date;
  double t_min_c = 0.0;
  double t_max_c = 0.0;

  bool operator==(const DailyTemperatureRecord&) const = default;
};

inline void require_contiguous(const std::vector<DailyTemperatureRecord>& records) {
  using namespace std::chrono;
  if (records.empty()) fail(ErrorKind::Data, "temperature: no daily records");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (sys_days{records[i].date} != sys_days{records[i - 1].date} + days{1}) {
      fail(ErrorKind::Data, "temperature: dates are not contiguous at " + format_date(records[i].date));
    }
  }
}

inline std::vector<DailyTemperatureRecord> parse_temperature(std::istream& in,
                                                             const std::string& name = files::kTemperature) {
  csv::Reader r(in, name, {"date", "tmin_c", "tmax_c"});
  std::vector<DailyTemperatureRecord> out;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    DailyTemperatureRecord rec;
    auto d = parse_date(f[0]);
    if (!d) r.error("malformed date '" + std::string(f[0]) + "'");
    rec.date = *d;
    if (!csv::parse_double(f[1], rec.t_min_c) || !csv::parse_double(f[2], rec.t_max_c)) {
      r.error("tmin_c and tmax_c must be numbers");
    }
    if (rec.t_min_c > rec.t_max_c) r.error("tmin_c exceeds tmax_c");
    out.push_back(rec);
  }
  require_contiguous(out);
  return out;
}

inline void write_temperature(const std::vector<DailyTemperatureRecord>& records, std::ostream& out) {
  out << "date,tmin_c,tmax_c\n";
  for (const auto& r : records) {
    out << format_date(r.date) << ',' << csv::format_double(r.t_min_c) << ',' << csv::format_double(r.t_max_c) << '\n';
  }
}

inline constexpr double kDailyMinHour = 6.0;
inline constexpr double kDailyMaxHour = 15.0;

/// Diurnal temperature (°C) at `hours` after 00:00 of the first record:
/// half-cosine segments between the daily minimum at 06:00 and maximum at
/// 15:00. Before the first minimum the curve falls from the first day's
/// maximum; after the last maximum it falls toward the last day's minimum.
inline double diurnal_temperature_c(const std::vector<DailyTemperatureRecord>& records, double hours) {
  const auto n = static_cast<long>(records.size());
  const long day = static_cast<long>(std::floor(hours / 24.0));
  const double clock = hours - 24.0 * static_cast<double>(day);
  auto rec = [&](long d) -> const DailyTemperatureRecord& { return records[static_cast<std::size_t>(std::clamp(d, 0L, n - 1))]; };
  double t0, t1, v0, v1;
  if (clock < kDailyMinHour) {  // previous max -> today's min
    t0 = kDailyMaxHour - 24.0;
    t1 = kDailyMinHour;
    v0 = rec(day - 1).t_max_c;
    v1 = rec(day).t_min_c;
    if (day == 0) v0 = rec(0).t_max_c;
  } else if (clock < kDailyMaxHour) {  // today's min -> today's max
    t0 = kDailyMinHour;
    t1 = kDailyMaxHour;
    v0 = rec(day).t_min_c;
    v1 = rec(day).t_max_c;
  } else {  // today's max -> tomorrow's min
    t0 = kDailyMaxHour;
    t1 = kDailyMinHour + 24.0;
    v0 = rec(day).t_max_c;
    v1 = rec(day + 1).t_min_c;
    if (day >= n - 1) v1 = rec(n - 1).t_min_c;
  }
  const double s = (clock - t0) / (t1 - t0);
  return v0 + (v1 - v0) * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

/// Hourly kelvin series over all record days (value at hh:00).
inline HourlyTimeSeries interpolate_hourly_temperature(const std::vector<DailyTemperatureRecord>& records) {
  require_contiguous(records);
  std::vector<double> values(records.size() * kHoursPerDay);
  for (std::size_t h = 0; h < values.size(); ++h) {
    values[h] = diurnal_temperature_c(records, static_cast<double>(h)) + kZeroCelsiusK;
  }
  return HourlyTimeSeries(std::chrono::sys_days{records.front().date}, std::move(values));
}

/// Canonical-year ambient (kelvin) for `base_year`; records must cover that
/// calendar year exactly.
inline HourlyTimeSeries canonical_ambient(const std::vector<DailyTemperatureRecord>& records, int base_year) {
  using namespace std::chrono;
  require_contiguous(records);
  const year_month_day first{year{base_year} / January / 1};
  const year_month_day last{year{base_year} / December / 31};
  if (records.front().date != first || records.back().date != last) {
    fail(ErrorKind::Data, "temperature records must span " + format_date(first) + " to " + format_date(last));
  }
  const HourlyTimeSeries full = interpolate_hourly_temperature(records);
  std::vector<double> values;
  values.reserve(kHoursPerYear);
  for (std::size_t d = 0; d < records.size(); ++d) {
    if (canonical_day_of_year(records[d].date) < 0) continue;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) values.push_back(full[d * kHoursPerDay + h]);
  }
  return HourlyTimeSeries(year_start(base_year), std::move(values));
}

// ---------------------------------------------------------------------------
// Eligibility

struct Eligibility {
  bool hp = false;
  bool ev = false;
  bool operator==(const Eligibility&) const = default;
};

/// Winter is December, January and February of the canonical base year.
inline double winter_mean_kw(const HourlyTimeSeries& baseload) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t h = 0; h < baseload.size(); ++h) {
    const unsigned m = canonical_month_of_hour(h);
    if (m == 12 || m == 1 || m == 2) {
      sum += baseload[h];
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline Eligibility check_eligibility(const Meter& meter, const ScenarioConfig& config) {
  Eligibility e;
  e.hp = !meter.has_hp && winter_mean_kw(meter.baseload) >= config.hp_winter_threshold_kw;
  e.ev = !meter.has_ev && meter.baseload.mean() >= config.ev_mean_threshold_kw;
  return e;
}

// ---------------------------------------------------------------------------
// Whole-feeder loading

struct FeederData {
  Topology topology;
  std::vector<Meter> meters;  // sorted by id
  HourlyTimeSeries ambient_k;
  int base_year = 0;
};

/// Joins the five parsed tables into one validated feeder. Eligibility is
/// left unset; the simulation computes it against its scenario.
inline FeederData assemble_feeder(Topology topology, AmiData ami, const std::map<std::string, DeviceRecord>& devices,
                                  const std::vector<DailyTemperatureRecord>& temperature) {
  FeederData feeder;
  feeder.base_year = ami.base_year;
  feeder.ambient_k = canonical_ambient(temperature, ami.base_year);
  for (const auto& [meter, _] : ami.loads) {
    if (!topology.meter_to_transformer.contains(meter)) {
      fail(ErrorKind::Topology, "AMI data for meter '" + meter + "' which is not in the meter map");
    }
  }
  for (const auto& [meter, _] : devices) {
    if (!topology.meter_to_transformer.contains(meter)) {
      fail(ErrorKind::Topology, "device record for unknown meter '" + meter + "'");
    }
  }
  std::vector<std::string> ids;
  ids.reserve(topology.meter_to_transformer.size());
  for (const auto& [meter, _] : topology.meter_to_transformer) ids.push_back(meter);
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    auto it = ami.loads.find(id);
    if (it == ami.loads.end()) fail(ErrorKind::Data, "no AMI data for meter '" + id + "'");
    Meter m;
    m.id = id;
    m.transformer_id = topology.meter_to_transformer.at(id);
    m.baseload = std::move(it->second);
    if (auto d = devices.find(id); d != devices.end()) {
      m.has_hp = d->second.has_hp;
      m.has_ev = d->second.has_ev;
    }
    feeder.meters.push_back(std::move(m));
  }
  feeder.topology = std::move(topology);
  return feeder;
}

inline FeederData load_feeder(const std::filesystem::path& dir) {
  auto path = [&](const char* name) { return (dir / name).string(); };
  auto xin = csv::open_input(path(files::kTransformers));
  auto min = csv::open_input(path(files::kMeters));
  Topology topo = parse_topology(xin, min, path(files::kTransformers), path(files::kMeters));
  auto ain = csv::open_input(path(files::kAmi));
  AmiData ami = parse_ami(ain, path(files::kAmi));
  auto din = csv::open_input(path(files::kDevices));
  auto devices = parse_devices(din, path(files::kDevices));
  auto tin = csv::open_input(path(files::kTemperature));
  auto temps = parse_temperature(tin, path(files::kTemperature));
  return assemble_feeder(std::move(topo), std::move(ami), devices, temps);
}

}  // namespace xfrisk
