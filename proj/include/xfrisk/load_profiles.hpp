#pragma once

// Stochastic device models. Heat pump draw is a clamped linear function of
// the distance from a reference temperature; EV draw comes from a daily
// driving / battery / plug-in model with a fixed-rate level 2 charger.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "xfrisk/error.hpp"
#include "xfrisk/model.hpp"
#include "xfrisk/random.hpp"
#include "xfrisk/time_series.hpp"

namespace xfrisk {

inline constexpr double kKwPerBtuHr = 2.9307e-4;

struct HpModel {
  double weibull_shape = 1.73;
  double weibull_scale_btu_hr = 23700.0;
  double size_shift_btu_hr = 7000.0;
  double cop_cold = 2.0;  // BTU/hr thermal capacity -> electric kW
  double t_ref_c = 22.0;
  double alpha_c = 25.0;
};

inline double hp_peak_electric_kw(double size_btu_hr, double cop_cold) noexcept {
  return size_btu_hr * kKwPerBtuHr / cop_cold;
}

inline HpDevice sample_hp_device(RandomStream& rng, const HpModel& model = {}) {
  HpDevice d;
  d.size_btu_hr = model.size_shift_btu_hr + rng.weibull(model.weibull_shape, model.weibull_scale_btu_hr);
  d.peak_electric_kw = hp_peak_electric_kw(d.size_btu_hr, model.cop_cold);
  d.t_ref_c = model.t_ref_c;
  d.alpha_c = model.alpha_c;
  return d;
}

/// min(|T - T_ref| / alpha, 1)
inline double hp_load_fraction(double temperature_c, double t_ref_c = 22.0, double alpha_c = 25.0) noexcept {
  return std::min(std::abs(temperature_c - t_ref_c) / alpha_c, 1.0);
}

inline HourlyTimeSeries hp_profile(const HpDevice& device, const HourlyTimeSeries& temperature_c) {
  HourlyTimeSeries out = temperature_c;
  for (double& v : out.values()) v = device.peak_electric_kw * hp_load_fraction(v, device.t_ref_c, device.alpha_c);
  return out;
}

struct EvModel {
  double tau_min_miles = 25.0;
  double tau_max_miles = 37.0;
  double weibull_beta = 1.53;
  double efficiency_min = 2.0;
  double efficiency_max = 5.0;
  double battery_min_kwh = 50.0;
  double battery_max_kwh = 120.0;
  double threshold_min = 0.4;
  double threshold_max = 0.6;
  double plug_in_mean_h = 6.5;
  double plug_in_sd_h = 1.5;
  double charge_eff = 0.85;
  double charge_rate_kw = 7.2;
  double initial_battery = 0.7;
};

inline EvDevice sample_ev_device(RandomStream& rng, const EvModel& model = {}) {
  EvDevice d;
  d.tau_miles = rng.uniform(model.tau_min_miles, model.tau_max_miles);
  d.efficiency_mi_per_kwh = rng.uniform(model.efficiency_min, model.efficiency_max);
  d.battery_kwh = rng.uniform(model.battery_min_kwh, model.battery_max_kwh);
  d.charge_threshold = rng.uniform(model.threshold_min, model.threshold_max);
  d.weibull_beta = model.weibull_beta;
  d.plug_in_mean_h = model.plug_in_mean_h;
  d.plug_in_sd_h = model.plug_in_sd_h;
  d.charge_eff = model.charge_eff;
  d.charge_rate_kw = model.charge_rate_kw;
  d.battery_level = model.initial_battery;
  return d;
}

/// Grid energy needed to fill the battery from `battery_level`.
inline double charging_energy_kwh(const EvDevice& d, double battery_level) noexcept {
  return d.battery_kwh * (1.0 - battery_level) / d.charge_eff;
}

inline double charging_duration_h(const EvDevice& d, double battery_level) noexcept {
  return charging_energy_kwh(d, battery_level) / d.charge_rate_kw;
}

/// Plug-in clock hour for a sampled offset: hours after noon, clamped to
/// [12:00, 23:59].
inline double plug_in_hour(double offset_after_noon_h) noexcept {
  return std::clamp(12.0 + offset_after_noon_h, 12.0, 23.0 + 59.0 / 60.0);
}

struct EvProfile {
  HourlyTimeSeries load;            // kW over the requested days
  std::vector<double> spill_kw;     // session hours past the end of the window
  double battery_level_end = 0.0;
  double busy_until_h = 0.0;        // charger busy time past the window end, hours
  double delivered_kwh = 0.0;       // grid energy of all sessions started in the window
  double replenished_kwh = 0.0;     // battery energy added by those sessions
  int sessions = 0;
};

/// Daily driving and charging for `n_days`. `busy_until_h` is how long a
/// session carried over from a previous window keeps the charger occupied;
/// a new session never starts before the previous one ends.
inline EvProfile ev_profile(RandomStream& rng, const EvDevice& device, std::size_t n_days,
                            std::chrono::sys_days epoch = {}, double busy_until_h = 0.0) {
  if (n_days == 0) fail(ErrorKind::Structural, "EV profile needs at least one day");
  const std::size_t hours = n_days * kHoursPerDay;
  std::vector<double> load(hours, 0.0);
  std::vector<double> spill;
  const double rate = device.charge_rate_kw;

  EvProfile out;
  double battery = device.battery_level;
  double busy = busy_until_h;

  auto deposit = [&](double start, double end) {
    const auto first = static_cast<std::size_t>(std::floor(start));
    for (std::size_t k = first; static_cast<double>(k) < end; ++k) {
      const double overlap = std::min(static_cast<double>(k + 1), end) - std::max(static_cast<double>(k), start);
      if (overlap <= 0.0) continue;
      if (k < hours) {
        load[k] += rate * overlap;
      } else {
        const std::size_t j = k - hours;
        if (spill.size() <= j) spill.resize(j + 1, 0.0);
        spill[j] += rate * overlap;
      }
    }
  };

  for (std::size_t d = 0; d < n_days; ++d) {
    const double miles = rng.weibull(device.weibull_beta, device.tau_miles);
    battery = std::max(0.0, battery - miles / (device.efficiency_mi_per_kwh * device.battery_kwh));
    if (battery < device.charge_threshold) {
      const double offset = rng.normal(device.plug_in_mean_h, device.plug_in_sd_h);
      const double start = std::max(static_cast<double>(d * kHoursPerDay) + plug_in_hour(offset), busy);
      const double energy = charging_energy_kwh(device, battery);
      const double end = start + energy / rate;
      deposit(start, end);
      out.delivered_kwh += energy;
      out.replenished_kwh += device.battery_kwh * (1.0 - battery);
      ++out.sessions;
      busy = end;
      battery = 1.0;
    }
  }
  // Back-to-back sessions can share an hour; keep the charger limit exact.
  for (double& v : load) v = std::min(v, rate);
  for (double& v : spill) v = std::min(v, rate);

  out.load = HourlyTimeSeries(epoch, std::move(load));
  out.spill_kw = std::move(spill);
  out.battery_level_end = battery;
  out.busy_until_h = std::max(0.0, busy - static_cast<double>(hours));
  return out;
}

/// Baseload plus whichever device profiles are present.
inline HourlyTimeSeries total_meter_load(const HourlyTimeSeries& baseload, const HourlyTimeSeries* hp_load,
                                         const HourlyTimeSeries* ev_load) {
  HourlyTimeSeries total = baseload;
  if (hp_load != nullptr) {
    total.require_aligned(*hp_load, "heat pump profile");
    total += *hp_load;
  }
  if (ev_load != nullptr) {
    total.require_aligned(*ev_load, "EV profile");
    total += *ev_load;
  }
  return total;
}

}  // namespace xfrisk
