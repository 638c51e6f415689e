#pragma once

// Deterministic synthetic feeders in the ingestion file formats.
//
// Weather is a seasonal cosine with day-to-day noise, one cold snap on
// November 24 (the only day with t_min <= -20 °C) and a five-day heat wave
// from July 18. Baseloads combine a daily shape with heating and cooling
// terms driven by that weather. Transformer ratings come from a palette of
// standard sizes chosen relative to each unit's peak baseload, so some
// units start out tight and others oversized.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "xfrisk/csv.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/ingestion.hpp"
#include "xfrisk/model.hpp"
#include "xfrisk/random.hpp"
#include "xfrisk/time_series.hpp"

namespace xfrisk {

struct BaseloadArchetype {
  std::string name;
  double weight = 1.0;        // relative frequency
  double mean_kw = 1.0;       // level of the daily shape
  double heating_kw_per_k = 0.0;  // per kelvin below 15 °C
  double cooling_kw_per_k = 0.0;  // per kelvin above 22 °C
};

inline std::vector<BaseloadArchetype> default_archetypes() {
  return {
      {"vacant", 0.12, 0.08, 0.0, 0.0},
      {"small", 0.30, 0.55, 0.015, 0.04},
      {"typical", 0.38, 0.95, 0.03, 0.08},
      {"electric_heat", 0.20, 1.2, 0.12, 0.10},
  };
}

struct FeederSpec {
  std::size_t transformers = 50;
  std::size_t min_meters = 1;
  std::size_t max_meters = 8;
  std::vector<double> rating_palette{10.0, 15.0, 25.0, 37.5, 50.0, 75.0};
  std::vector<BaseloadArchetype> archetypes = default_archetypes();
  double min_headroom = 0.5;  // rating / peak baseload, drawn uniformly
  double max_headroom = 1.6;
  double existing_hp_fraction = 0.08;
  double existing_ev_fraction = 0.05;
  int base_year = 2024;
  std::uint64_t seed = 7;

  void validate() const {
    auto bad = [](const std::string& m) { fail(ErrorKind::Configuration, "feeder spec: " + m); };
    if (transformers == 0) bad("need at least one transformer");
    if (min_meters == 0 || max_meters < min_meters) bad("meters per transformer must be a positive range");
    if (rating_palette.empty()) bad("empty rating palette");
    for (double r : rating_palette) {
      if (!(r > 0.0)) bad("palette ratings must be positive");
    }
    if (archetypes.empty()) bad("no baseload archetypes");
    for (const auto& a : archetypes) {
      if (!(a.weight > 0.0) || !(a.mean_kw >= 0.0)) bad("archetype weights must be positive and levels non-negative");
    }
    if (!(min_headroom > 0.0) || max_headroom < min_headroom) bad("headroom range must be positive");
  }
};

inline constexpr unsigned kColdSnapMonth = 11;
inline constexpr unsigned kColdSnapDay = 24;
inline constexpr unsigned kHeatWaveMonth = 7;
inline constexpr unsigned kHeatWaveFirstDay = 18;
inline constexpr unsigned kHeatWaveDays = 5;

struct SyntheticFeeder {
  Topology topology;
  int base_year = 0;
  std::map<std::string, std::vector<double>> ami_kw;  // calendar hours, including February 29
  std::map<std::string, DeviceRecord> devices;
  std::vector<DailyTemperatureRecord> temperature;
};

namespace detail {

inline double round_to(double v, double step) { return std::round(v / step) * step; }

inline std::vector<DailyTemperatureRecord> synthetic_weather(int base_year, RandomStream& rng) {
  using namespace std::chrono;
  const sys_days first{year{base_year} / January / 1};
  const sys_days end{year{base_year + 1} / January / 1};
  const auto n = static_cast<std::size_t>((end - first).count());
  std::vector<DailyTemperatureRecord> out;
  out.reserve(n);
  for (std::size_t d = 0; d < n; ++d) {
    const year_month_day date{first + days{static_cast<int>(d)}};
    const double mean = 7.0 - 15.0 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(d) - 15.0) / 365.25);
    const double swing = rng.uniform(3.0, 6.0);
    const double shift = rng.uniform(-4.0, 4.0);
    double tmin = std::max(mean + shift - swing, -19.0);
    double tmax = std::max(mean + shift + swing, tmin + 2.0);
    const unsigned m = static_cast<unsigned>(date.month());
    const unsigned dd = static_cast<unsigned>(date.day());
    if (m == kColdSnapMonth && dd == kColdSnapDay) {
      tmin = -24.0;
      tmax = -15.0;
    }
    if (m == kHeatWaveMonth && dd >= kHeatWaveFirstDay && dd < kHeatWaveFirstDay + kHeatWaveDays) {
      tmin = rng.uniform(22.0, 25.0);
      tmax = rng.uniform(34.0, 37.0);
    }
    out.push_back({date, round_to(tmin, 0.1), round_to(tmax, 0.1)});
  }
  return out;
}

/// Relative daily consumption shape; mean over the day is 1.
inline double daily_shape(std::size_t hour) {
  static constexpr std::array<double, 24> shape{0.55, 0.5, 0.48, 0.47, 0.5, 0.65, 0.95, 1.2, 1.1, 0.9, 0.85, 0.85,
                                                0.9,  0.9, 0.85, 0.9,  1.0, 1.35, 1.7,  1.75, 1.6, 1.35, 1.05, 0.75};
  static const double mean = [] {
    double s = 0.0;
    for (double v : shape) s += v;
    return s / 24.0;
  }();
  return shape[hour] / mean;
}

}  // namespace detail

inline SyntheticFeeder make_synthetic_feeder(const FeederSpec& spec) {
  spec.validate();
  SyntheticFeeder out;
  out.base_year = spec.base_year;

  RandomStream weather_rng(hash64({spec.seed, static_cast<std::uint64_t>(StreamTag::Synthetic), 1}));
  out.temperature = detail::synthetic_weather(spec.base_year, weather_rng);
  const HourlyTimeSeries ambient = interpolate_hourly_temperature(out.temperature);

  RandomStream rng(hash64({spec.seed, static_cast<std::uint64_t>(StreamTag::Synthetic), 2}));
  double total_weight = 0.0;
  for (const auto& a : spec.archetypes) total_weight += a.weight;

  std::size_t meter_no = 0;
  char id[32];
  for (std::size_t x = 0; x < spec.transformers; ++x) {
    Transformer xfmr;
    std::snprintf(id, sizeof(id), "T%04zu", x + 1);
    xfmr.id = id;
    const std::size_t span = spec.max_meters - spec.min_meters + 1;
    const std::size_t count = spec.min_meters + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(span)));
    std::vector<double> transformer_peak(ambient.size(), 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      std::snprintf(id, sizeof(id), "M%06zu", ++meter_no);
      const std::string meter = id;
      double pick = rng.uniform() * total_weight;
      const BaseloadArchetype* arch = &spec.archetypes.back();
      for (const auto& a : spec.archetypes) {
        if (pick < a.weight) {
          arch = &a;
          break;
        }
        pick -= a.weight;
      }
      const double level = arch->mean_kw * rng.uniform(0.7, 1.3);
      std::vector<double> kw(ambient.size());
      for (std::size_t h = 0; h < kw.size(); ++h) {
        const double t_c = ambient[h] - kZeroCelsiusK;
        const double heating = arch->heating_kw_per_k * std::max(0.0, 15.0 - t_c);
        const double cooling = arch->cooling_kw_per_k * std::max(0.0, t_c - 22.0);
        const double v = (level * detail::daily_shape(h % kHoursPerDay) + heating + cooling) * rng.uniform(0.8, 1.2);
        kw[h] = detail::round_to(std::max(v, 0.0), 0.001);
        transformer_peak[h] += kw[h];
      }
      DeviceRecord dev;
      if (arch->mean_kw >= 0.2) {
        dev.has_hp = rng.bernoulli(spec.existing_hp_fraction);
        dev.has_ev = rng.bernoulli(spec.existing_ev_fraction);
      }
      out.devices.emplace(meter, dev);
      out.ami_kw.emplace(meter, std::move(kw));
      out.topology.meter_to_transformer.emplace(meter, xfmr.id);
      xfmr.meters.push_back(meter);
    }
    const double peak = *std::max_element(transformer_peak.begin(), transformer_peak.end());
    const double wanted = peak * rng.uniform(spec.min_headroom, spec.max_headroom);
    auto palette = spec.rating_palette;
    std::sort(palette.begin(), palette.end());
    xfmr.rating_kva = palette.back();
    for (double r : palette) {
      if (r >= wanted) {
        xfmr.rating_kva = r;
        break;
      }
    }
    out.topology.transformers.push_back(std::move(xfmr));
  }
  out.topology.validate();
  return out;
}

/// The same feeder the ingestion path would produce from the written files.
inline FeederData to_feeder_data(const SyntheticFeeder& s) {
  AmiData ami;
  ami.base_year = s.base_year;
  const auto epoch = year_start(s.base_year);
  for (const auto& [meter, kw] : s.ami_kw) {
    std::vector<double> canonical;
    canonical.reserve(kHoursPerYear);
    for (std::size_t d = 0; d < s.temperature.size(); ++d) {
      if (canonical_day_of_year(s.temperature[d].date) < 0) continue;
      canonical.insert(canonical.end(), kw.begin() + static_cast<std::ptrdiff_t>(d * kHoursPerDay),
                       kw.begin() + static_cast<std::ptrdiff_t>((d + 1) * kHoursPerDay));
    }
    ami.loads.emplace(meter, HourlyTimeSeries(epoch, std::move(canonical)));
  }
  return assemble_feeder(s.topology, std::move(ami), s.devices, s.temperature);
}

inline void write_feeder(const SyntheticFeeder& s, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
  {
    auto xout = csv::open_output((dir / files::kTransformers).string());
    auto mout = csv::open_output((dir / files::kMeters).string());
    write_topology(s.topology, xout, mout);
  }
  {
    auto out = csv::open_output((dir / files::kAmi).string());
    out << "meter_id,timestamp,kw\n";
    char ts[32];
    for (const auto& [meter, kw] : s.ami_kw) {
      for (std::size_t h = 0; h < kw.size(); ++h) {
        const auto& date = s.temperature[h / kHoursPerDay].date;
        std::snprintf(ts, sizeof(ts), "%sT%02zu:00:00", format_date(date).c_str(), h % kHoursPerDay);
        out << meter << ',' << ts << ',' << csv::format_double(kw[h]) << '\n';
      }
    }
    if (!out) fail(ErrorKind::Io, "failed writing AMI file");
  }
  {
    auto out = csv::open_output((dir / files::kDevices).string());
    write_devices(s.devices, out);
  }
  {
    auto out = csv::open_output((dir / files::kTemperature).string());
    write_temperature(s.temperature, out);
  }
}

inline SyntheticFeeder generate_feeder(const FeederSpec& spec, const std::filesystem::path& dir) {
  SyntheticFeeder s = make_synthetic_feeder(spec);
  write_feeder(s, dir);
  return s;
}

}  // namespace xfrisk
