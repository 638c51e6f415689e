#pragma once

// Hot-spot temperature, insulation aging and age -> failure probability.
//
// Temperature follows  dT/dt = a*L^2 - b*(T - Ta) + c  (minutes, kelvin),
// with per-unit load L and ambient Ta held constant over each hour. Each
// hour is advanced with the exact solution of that linear ODE; explicit
// Euler at one hour would be unstable since b*dt = 2.94 > 2.
//
// Aging accumulates the Arrhenius-type rate exp(-C*(1/T - 1/T0)) integrated
// along the exact hourly trajectory with Gauss-Legendre quadrature.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "xfrisk/error.hpp"
#include "xfrisk/time_series.hpp"

namespace xfrisk {

/// Raw loading coefficient fitted to a 25 kVA unit, K/min/kVA^2. Kept for
/// reference; the model uses the per-unit coefficient.
inline constexpr double kRawLoadCoefficient = 9.39e-4;

struct ThermalParams {
  double load_coefficient = 0.587;  // K/min per (p.u.)^2
  double cooling_rate = 0.049;      // 1/min
  double heating_offset = 0.178;    // K/min
  double step_minutes = 60.0;
};

struct AgingParams {
  double activation_k = 15000.0;
  double reference_k = 383.0;
};

struct FailureParams {
  double eta_years = 112.0;
  double beta = 3.5;
};

inline constexpr double kHoursPerAgingYear = static_cast<double>(kHoursPerYear);

/// Temperature the hot spot relaxes to under constant load and ambient.
inline double steady_state_temperature(double per_unit_load, double ambient_k,
                                       const ThermalParams& p = {}) noexcept {
  return ambient_k + (p.load_coefficient * per_unit_load * per_unit_load + p.heating_offset) / p.cooling_rate;
}

/// One exact step of the hot-spot ODE.
inline double step_temperature(double temperature_k, double per_unit_load, double ambient_k,
                               const ThermalParams& p = {}) noexcept {
  const double t_ss = steady_state_temperature(per_unit_load, ambient_k, p);
  return t_ss + (temperature_k - t_ss) * std::exp(-p.cooling_rate * p.step_minutes);
}

inline double aging_rate(double temperature_k, const AgingParams& p = {}) noexcept {
  return std::exp(-p.activation_k * (1.0 / temperature_k - 1.0 / p.reference_k));
}

/// Weibull CDF of effective age.
inline double failure_probability(double age_years, const FailureParams& p = {}) {
  if (!(age_years >= 0.0)) fail(ErrorKind::Domain, "effective age must be non-negative");
  return -std::expm1(-std::pow(age_years / p.eta_years, p.beta));
}

struct ThermalState {
  double temperature_k = 0.0;
  double age_years = 0.0;
};

struct ThermalYear {
  ThermalState end;
  std::vector<double> trace;  // hot-spot temperature at the end of each hour, if requested
};

/// Hourly stepper with precomputed decay factors.
class ThermalModel {
 public:
  static constexpr int kQuadratureNodes = 5;
  // Hours whose mean aging rate is below this, and whose two node rates
  // differ by at most kCoarseSpread of their sum, use the 2-node rule only.
  static constexpr double kDefaultCoarseRateLimit = 1e-4;
  static constexpr double kCoarseSpread = 0.2;

  explicit ThermalModel(ThermalParams thermal = {}, AgingParams aging = {},
                        double coarse_rate_limit = kDefaultCoarseRateLimit)
      : thermal_(thermal), aging_(aging), coarse_rate_limit_(coarse_rate_limit) {
    if (!(thermal_.cooling_rate > 0.0) || !(thermal_.step_minutes > 0.0)) {
      fail(ErrorKind::Configuration, "thermal cooling rate and step must be positive");
    }
    if (!(aging_.activation_k > 0.0) || !(aging_.reference_k > 0.0)) {
      fail(ErrorKind::Configuration, "aging parameters must be positive");
    }
    // Gauss-Legendre on [-1, 1], 5 points.
    constexpr std::array<double, kQuadratureNodes> x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                      0.5384693101056831, 0.9061798459386640};
    constexpr std::array<double, kQuadratureNodes> w{0.2369268850561891, 0.4786286704993665,
                                                      0.5688888888888889, 0.4786286704993665,
                                                      0.2369268850561891};
    step_hours_ = thermal_.step_minutes / 60.0;
    end_decay_ = std::exp(-thermal_.cooling_rate * thermal_.step_minutes);
    for (int i = 0; i < kQuadratureNodes; ++i) {
      const double s = 0.5 * (x[i] + 1.0) * thermal_.step_minutes;
      node_decay_[i] = std::exp(-thermal_.cooling_rate * s);
      node_weight_[i] = 0.5 * w[i];
    }
    constexpr double x2 = 0.5773502691896258;
    coarse_decay_[0] = std::exp(-thermal_.cooling_rate * 0.5 * (1.0 - x2) * thermal_.step_minutes);
    coarse_decay_[1] = std::exp(-thermal_.cooling_rate * 0.5 * (1.0 + x2) * thermal_.step_minutes);
    inv_reference_ = 1.0 / aging_.reference_k;
  }

  const ThermalParams& thermal() const noexcept { return thermal_; }
  const AgingParams& aging() const noexcept { return aging_; }

  double step(double temperature_k, double per_unit_load, double ambient_k) const noexcept {
    const double t_ss = steady_state_temperature(per_unit_load, ambient_k, thermal_);
    return t_ss + (temperature_k - t_ss) * end_decay_;
  }

  /// Aging, in hours at the nominal rate, accumulated over one step that
  /// starts at `temperature_k` and relaxes toward `steady_state_k`.
  double step_aging_hours(double temperature_k, double steady_state_k) const noexcept {
    const double gap = temperature_k - steady_state_k;
    if (coarse_rate_limit_ > 0.0) {
      const double r0 = rate(steady_state_k + gap * coarse_decay_[0]);
      const double r1 = rate(steady_state_k + gap * coarse_decay_[1]);
      const double coarse = 0.5 * (r0 + r1);
      if (coarse < coarse_rate_limit_ && std::abs(r0 - r1) <= kCoarseSpread * (r0 + r1)) {
        return coarse * step_hours_;
      }
    }
    double sum = 0.0;
    for (int i = 0; i < kQuadratureNodes; ++i) {
      const double t = steady_state_k + gap * node_decay_[i];
      sum += node_weight_[i] * rate(t);
    }
    return sum * step_hours_;
  }

  double coarse_rate_limit() const noexcept { return coarse_rate_limit_; }

  /// Advance one series of hourly per-unit loads and ambient temperatures.
  /// Thermal state carries in and out so consecutive years form one trace.
  ThermalYear simulate(std::span<const double> per_unit_load, std::span<const double> ambient_k,
                       ThermalState start, bool keep_trace = false) const {
    if (per_unit_load.size() != ambient_k.size()) {
      fail(ErrorKind::Structural, "load and ambient series are misaligned (" +
                                      std::to_string(per_unit_load.size()) + " vs " +
                                      std::to_string(ambient_k.size()) + " hours)");
    }
    ThermalYear out;
    if (keep_trace) out.trace.reserve(per_unit_load.size());
    double temperature = start.temperature_k;
    double aged_hours = 0.0;
    for (std::size_t n = 0; n < per_unit_load.size(); ++n) {
      const double t_ss = steady_state_temperature(per_unit_load[n], ambient_k[n], thermal_);
      aged_hours += step_aging_hours(temperature, t_ss);
      temperature = t_ss + (temperature - t_ss) * end_decay_;
      if (keep_trace) out.trace.push_back(temperature);
    }
    out.end.temperature_k = temperature;
    out.end.age_years = start.age_years + aged_hours / kHoursPerAgingYear;
    return out;
  }

 private:
  double rate(double t) const noexcept { return std::exp(-aging_.activation_k * (1.0 / t - inv_reference_)); }

  ThermalParams thermal_;
  AgingParams aging_;
  double coarse_rate_limit_ = kDefaultCoarseRateLimit;
  std::array<double, 2> coarse_decay_{};
  double step_hours_ = 1.0;
  double end_decay_ = 0.0;
  double inv_reference_ = 0.0;
  std::array<double, kQuadratureNodes> node_decay_{};
  std::array<double, kQuadratureNodes> node_weight_{};
};

inline ThermalYear simulate_transformer_year(const HourlyTimeSeries& per_unit_load,
                                             const HourlyTimeSeries& ambient_k, ThermalState start,
                                             const ThermalModel& model = ThermalModel{},
                                             bool keep_trace = false) {
  per_unit_load.require_aligned(ambient_k, "thermal simulation");
  return model.simulate(per_unit_load.values(), ambient_k.values(), start, keep_trace);
}

}  // namespace xfrisk
