#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xfrisk/error.hpp"
#include "xfrisk/model.hpp"
#include "xfrisk/random.hpp"

namespace xfrisk {

/// Logistic S-curve f(t) = f_max / (1 + exp(-(t - t50)/timescale)).
struct GrowthCurve {
  double f_max = 1.0;
  double t50 = 2040.0;
  double timescale = 1.0;

  void validate() const {
    if (!(timescale > 0.0)) fail(ErrorKind::Domain, "growth timescale must be positive");
    if (!(f_max > 0.0 && f_max <= 1.0)) fail(ErrorKind::Domain, "f_max must be in (0, 1]");
  }
};

inline double logistic_fraction(const GrowthCurve& curve, double year) noexcept {
  return curve.f_max / (1.0 + std::exp(-(year - curve.t50) / curve.timescale));
}

/// Timescale that puts the curve through (t0, f0).
inline double fit_timescale(double f0, double t0, double t50, double f_max = 1.0) {
  if (!(f0 > 0.0 && f0 < f_max)) {
    fail(ErrorKind::Domain, "current adoption fraction must lie strictly between 0 and f_max");
  }
  const double log_odds = std::log(f_max / f0 - 1.0);
  if (log_odds == 0.0) {
    fail(ErrorKind::Domain,
         "current adoption equals f_max/2, so the timescale is undetermined; set it explicitly");
  }
  const double a = (t50 - t0) / log_odds;
  if (!(a > 0.0) || !std::isfinite(a)) {
    fail(ErrorKind::Domain, "current adoption level is inconsistent with t50 (timescale would be " +
                                std::to_string(a) + ")");
  }
  return a;
}

/// Per-meter probability of adopting during calendar year `year`:
/// p = min(1, (f(year+1) - f(year)) * total / eligible).
inline double annual_adoption_probability(const GrowthCurve& curve, double year,
                                          std::size_t eligible_count, std::size_t total_meters) {
  if (total_meters == 0) fail(ErrorKind::Domain, "adoption needs at least one meter");
  if (eligible_count == 0) return 0.0;
  const double delta = logistic_fraction(curve, year + 1.0) - logistic_fraction(curve, year);
  const double p = delta * static_cast<double>(total_meters) / static_cast<double>(eligible_count);
  return std::clamp(p, 0.0, 1.0);
}

enum class DeviceKind { HeatPump, ElectricVehicle };

struct Adoption {
  std::size_t meter_index = 0;
  DeviceKind kind = DeviceKind::HeatPump;
};

struct AdoptionDraw {
  std::vector<Adoption> adopted;  // heat pumps first, each group in meter order
  double p_hp = 0.0;
  double p_ev = 0.0;
  std::size_t eligible_hp = 0;
  std::size_t eligible_ev = 0;
};

/// Anything carrying per-meter device ownership and eligibility flags.
template <typename T>
concept AdoptionState = requires(T& m) {
  { m.has_hp } -> std::convertible_to<bool>;
  { m.has_ev } -> std::convertible_to<bool>;
  { m.hp_eligible } -> std::convertible_to<bool>;
  { m.ev_eligible } -> std::convertible_to<bool>;
};

/// One Bernoulli(p) draw for every meter eligible for `kind`, appended to
/// `out` in meter order. Each (meter, year, kind) decision uses its own
/// sub-stream of `realization` keyed by the meter id hash in `meter_keys`.
template <AdoptionState M>
void draw_device_adoptions(std::uint64_t realization, std::span<const M> meters,
                           std::span<const std::uint64_t> meter_keys, DeviceKind kind, double p, int sim_year,
                           std::vector<Adoption>& out) {
  if (meter_keys.size() != meters.size()) {
    fail(ErrorKind::Structural, "meter key table does not match the meter list");
  }
  if (p <= 0.0) return;
  const StreamTag tag = kind == DeviceKind::HeatPump ? StreamTag::AdoptHeatPump : StreamTag::AdoptElectricVehicle;
  for (std::size_t i = 0; i < meters.size(); ++i) {
    const bool eligible = kind == DeviceKind::HeatPump ? meters[i].hp_eligible : meters[i].ev_eligible;
    if (!eligible) continue;
    RandomStream rng(substream_seed(realization, meter_keys[i], sim_year, tag));
    if (rng.bernoulli(p)) out.push_back({i, kind});
  }
}

/// Independent Bernoulli adoption for every eligible meter in simulation
/// year `sim_year` (1-based). Calendar year of the draw is
/// base_year + sim_year - 1.
template <AdoptionState M>
AdoptionDraw draw_adoptions(std::uint64_t realization, std::span<const M> meters,
                            std::span<const std::uint64_t> meter_keys, const GrowthCurve& hp_curve,
                            const GrowthCurve& ev_curve, int sim_year, int base_year) {
  if (meter_keys.size() != meters.size()) {
    fail(ErrorKind::Structural, "meter key table does not match the meter list");
  }
  AdoptionDraw draw;
  for (const auto& m : meters) {
    draw.eligible_hp += m.hp_eligible ? 1 : 0;
    draw.eligible_ev += m.ev_eligible ? 1 : 0;
  }
  if (meters.empty()) return draw;
  const double calendar = static_cast<double>(base_year + sim_year - 1);
  draw.p_hp = annual_adoption_probability(hp_curve, calendar, draw.eligible_hp, meters.size());
  draw.p_ev = annual_adoption_probability(ev_curve, calendar, draw.eligible_ev, meters.size());
  draw_device_adoptions(realization, meters, meter_keys, DeviceKind::HeatPump, draw.p_hp, sim_year, draw.adopted);
  draw_device_adoptions(realization, meters, meter_keys, DeviceKind::ElectricVehicle, draw.p_ev, sim_year,
                        draw.adopted);
  return draw;
}

/// Marks adopters as owning the device and no longer eligible for it.
/// Device parameters are attached separately by the caller.
template <AdoptionState M>
void apply_adoptions(std::span<M> meters, std::span<const Adoption> adopted) {
  for (const auto& a : adopted) {
    M& m = meters[a.meter_index];
    if (a.kind == DeviceKind::HeatPump) {
      m.has_hp = true;
      m.hp_eligible = false;
    } else {
      m.has_ev = true;
      m.ev_eligible = false;
    }
  }
}

/// Fraction of meters that already own a device of `kind`.
template <AdoptionState M>
double owned_fraction(std::span<const M> meters, DeviceKind kind) noexcept {
  if (meters.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& m : meters) n += (kind == DeviceKind::HeatPump ? m.has_hp : m.has_ev) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(meters.size());
}

/// Growth curve for a scenario: explicit timescale if given, otherwise fit
/// through the current owned fraction at the base year.
inline GrowthCurve make_growth_curve(double t50, double f_max, double explicit_timescale,
                                     double current_fraction, int base_year) {
  GrowthCurve curve{f_max, t50, explicit_timescale};
  if (explicit_timescale <= 0.0) {
    curve.timescale = fit_timescale(current_fraction, static_cast<double>(base_year), t50, f_max);
  }
  curve.validate();
  return curve;
}

}  // namespace xfrisk
