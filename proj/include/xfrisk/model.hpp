#pragma once

// Domain types shared by every stage of the pipeline, plus the two
// topology-level load operations (aggregation and per-unit conversion).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "xfrisk/error.hpp"
#include "xfrisk/time_series.hpp"

namespace xfrisk {

/// Sampled cold-climate heat pump.
struct HpDevice {
  double size_btu_hr = 0.0;
  double peak_electric_kw = 0.0;
  double t_ref_c = 22.0;
  double alpha_c = 25.0;
};

/// Sampled EV with its driver's habits. `battery_level` is the only state.
struct EvDevice {
  double tau_miles = 31.0;
  double weibull_beta = 1.53;
  double efficiency_mi_per_kwh = 3.5;
  double battery_kwh = 85.0;
  double charge_threshold = 0.5;
  double plug_in_mean_h = 6.5;
  double plug_in_sd_h = 1.5;
  double charge_eff = 0.85;
  double charge_rate_kw = 7.2;
  double battery_level = 0.7;
};

struct Meter {
  std::string id;
  std::string transformer_id;
  HourlyTimeSeries baseload;  // kW
  bool has_hp = false;
  bool has_ev = false;
  bool hp_eligible = false;
  bool ev_eligible = false;
  std::optional<HpDevice> hp;
  std::optional<EvDevice> ev;

  /// has_hp => hp present, has_ev => ev present.
  bool devices_consistent() const noexcept {
    return (!has_hp || hp.has_value()) && (!has_ev || ev.has_value());
  }
};

struct Transformer {
  std::string id;
  double rating_kva = 0.0;
  std::vector<std::string> meters;
  double initial_age_years = 0.0;
  double capacity_scale = 1.0;
};

/// Radial feeder: transformers plus the meter -> transformer function.
struct Topology {
  std::vector<Transformer> transformers;
  std::unordered_map<std::string, std::string> meter_to_transformer;

  std::optional<std::size_t> find_transformer(const std::string& id) const {
    for (std::size_t i = 0; i < transformers.size(); ++i) {
      if (transformers[i].id == id) return i;
    }
    return std::nullopt;
  }

  std::size_t meter_count() const noexcept { return meter_to_transformer.size(); }

  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& x : transformers) {
      if (!seen.insert(x.id).second) fail(ErrorKind::Topology, "duplicate transformer id '" + x.id + "'");
      if (!(x.rating_kva > 0.0)) {
        fail(ErrorKind::Topology, "transformer '" + x.id + "' has non-positive rating");
      }
      if (!(x.initial_age_years >= 0.0)) {
        fail(ErrorKind::Topology, "transformer '" + x.id + "' has negative initial age");
      }
      for (const auto& m : x.meters) {
        auto it = meter_to_transformer.find(m);
        if (it == meter_to_transformer.end() || it->second != x.id) {
          fail(ErrorKind::Topology, "meter '" + m + "' is not mapped to transformer '" + x.id + "'");
        }
      }
    }
    for (const auto& [meter, xfmr] : meter_to_transformer) {
      if (!seen.contains(xfmr)) {
        fail(ErrorKind::Topology, "meter '" + meter + "' references unknown transformer '" + xfmr + "'");
      }
    }
  }
};

struct ScenarioConfig {
  int horizon_years = 20;
  int realizations = 100;
  std::uint64_t master_seed = 1;
  double t50_hp = 2040.0;
  double t50_ev = 2045.0;
  int base_year = 0;  // 0: take from the AMI data
  double f_max = 1.0;
  double hp_winter_threshold_kw = 0.2;
  double ev_mean_threshold_kw = 0.2;
  double capacity_scale = 1.0;
  double cost_upgrade = 5.0;
  double cost_failure = 50.0;
  double return_rate = 0.02;
  int n_max = 10;
  // Logistic timescales in years; 0 means fit to the current adoption level.
  double timescale_hp = 0.0;
  double timescale_ev = 0.0;
  double hp_cop = 2.0;

  void validate() const {
    auto bad = [](const std::string& msg) { fail(ErrorKind::Configuration, msg); };
    if (horizon_years < 1) bad("horizon_years must be >= 1");
    if (realizations < 1) bad("realizations must be >= 1");
    if (!(f_max > 0.0 && f_max <= 1.0)) bad("f_max must be in (0, 1]");
    if (!(cost_upgrade > 0.0)) bad("cost_upgrade must be positive");
    if (!(cost_failure > cost_upgrade)) bad("cost_failure must exceed cost_upgrade");
    if (!(return_rate >= 0.0 && return_rate < 1.0)) bad("return_rate must be in [0, 1)");
    if (!(capacity_scale > 0.0)) bad("capacity_scale must be positive");
    if (n_max < 1) bad("n_max must be >= 1");
    if (!(hp_winter_threshold_kw >= 0.0) || !(ev_mean_threshold_kw >= 0.0)) {
      bad("eligibility thresholds must be non-negative");
    }
    if (!(timescale_hp >= 0.0) || !(timescale_ev >= 0.0)) bad("timescales must be non-negative");
    if (!(hp_cop > 0.0)) bad("hp_cop must be positive");
    if (!std::isfinite(t50_hp) || !std::isfinite(t50_ev)) bad("t50 values must be finite");
  }
};

/// Per-transformer, per-year cumulative failure probability. Year index t
/// runs 1..horizon; t = 0 is the implicit all-zero column.
class FailureCurveSet {
 public:
  FailureCurveSet() = default;

  FailureCurveSet(std::vector<std::string> ids, int horizon)
      : ids_(std::move(ids)), horizon_(horizon),
        values_(ids_.size() * static_cast<std::size_t>(std::max(horizon, 0)), 0.0) {
    if (horizon < 1) fail(ErrorKind::Structural, "failure curves need a horizon >= 1");
  }

  FailureCurveSet(std::vector<std::string> ids, int horizon, std::vector<double> values)
      : FailureCurveSet(std::move(ids), horizon) {
    if (values.size() != values_.size()) {
      fail(ErrorKind::Structural, "failure curve matrix has the wrong size");
    }
    values_ = std::move(values);
  }

  std::size_t size() const noexcept { return ids_.size(); }
  int horizon() const noexcept { return horizon_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t x) const { return ids_.at(x); }

  double at(std::size_t x, int t) const noexcept {
    return t <= 0 ? 0.0 : values_[x * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t - 1)];
  }
  void set(std::size_t x, int t, double v) noexcept {
    values_[x * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t - 1)] = v;
  }

  /// Increment F[x][t] - F[x][t-1].
  double increment(std::size_t x, int t) const noexcept { return at(x, t) - at(x, t - 1); }

  const std::vector<double>& raw() const noexcept { return values_; }

  bool same_shape(const FailureCurveSet& other) const noexcept {
    return horizon_ == other.horizon_ && ids_ == other.ids_;
  }

  /// Bounds and monotonicity; throws a data error naming the offending cell.
  void validate() const {
    for (std::size_t x = 0; x < ids_.size(); ++x) {
      for (int t = 1; t <= horizon_; ++t) {
        const double v = at(x, t);
        if (!(v >= 0.0 && v <= 1.0)) {
          fail(ErrorKind::Data, "failure probability of '" + ids_[x] + "' in year " +
                                    std::to_string(t) + " is outside [0, 1]");
        }
        if (v < at(x, t - 1)) {
          fail(ErrorKind::Data, "failure curve of '" + ids_[x] + "' decreases in year " +
                                    std::to_string(t));
        }
      }
    }
  }

  bool operator==(const FailureCurveSet&) const = default;

 private:
  std::vector<std::string> ids_;
  int horizon_ = 0;
  std::vector<double> values_;
};

/// Elementwise sum of the downstream meters' total loads.
inline HourlyTimeSeries aggregate_transformer_load(
    const Transformer& transformer,
    const std::unordered_map<std::string, HourlyTimeSeries>& meter_loads,
    std::chrono::sys_days epoch, std::size_t hours) {
  HourlyTimeSeries total = HourlyTimeSeries::zeros(epoch, hours);
  for (const auto& meter_id : transformer.meters) {
    auto it = meter_loads.find(meter_id);
    if (it == meter_loads.end()) {
      fail(ErrorKind::Topology, "transformer '" + transformer.id + "' references unknown meter '" +
                                    meter_id + "'");
    }
    total.require_aligned(it->second, "load of meter '" + meter_id + "'");
    total += it->second;
  }
  return total;
}

/// Load as a fraction of rated capacity. Unity power factor: kW ~ kVA.
inline HourlyTimeSeries per_unit_load(const HourlyTimeSeries& load_kw, const Transformer& transformer) {
  const double capacity = transformer.rating_kva * transformer.capacity_scale;
  if (!(capacity > 0.0)) {
    fail(ErrorKind::Configuration, "transformer '" + transformer.id + "' has non-positive capacity");
  }
  HourlyTimeSeries out = load_kw;
  for (double& v : out.values()) v /= capacity;
  return out;
}

}  // namespace xfrisk
