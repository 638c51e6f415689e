#pragma once

// Monte Carlo engine. One realization runs the yearly pipeline
//
//   adoption -> device sampling -> meter loads -> transformer loads
//            -> hot-spot temperature -> effective age -> failure probability
//
// over the horizon, reusing the base-year AMI loads and ambient temperature
// every year. Realizations are independent and may run on any number of
// threads; results are reduced in realization order.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "xfrisk/adoption.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/ingestion.hpp"
#include "xfrisk/load_profiles.hpp"
#include "xfrisk/model.hpp"
#include "xfrisk/random.hpp"
#include "xfrisk/thermal.hpp"

namespace xfrisk {

/// A transformer whose mean failure probability grows by less than this over
/// the horizon counts as not aging.
inline constexpr double kZeroAgingTolerance = 1e-6;

struct RealizationResult {
  std::size_t index = 0;
  int horizon = 0;
  std::vector<std::string> transformer_ids;
  std::vector<double> failure;     // [x * horizon + (t - 1)]
  std::vector<double> aging_gain;  // effective years gained over the horizon, per transformer
  // Per simulation year, after that year's adoptions.
  std::vector<int> hp_owners, ev_owners;
  std::vector<int> hp_adopted, ev_adopted;
  std::vector<int> hp_eligible, ev_eligible;  // remaining eligible meters
  std::vector<double> p_hp, p_ev;

  double failure_at(std::size_t x, int t) const noexcept {
    return failure[x * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(t - 1)];
  }
};

/// Mutable per-meter state owned by one realization.
struct MeterDeviceState {
  bool has_hp = false;
  bool has_ev = false;
  bool hp_eligible = false;
  bool ev_eligible = false;
  std::optional<HpDevice> hp;
  std::optional<EvDevice> ev;
  double ev_busy_h = 0.0;
  std::vector<double> ev_spill_kw;
};

/// Validated, precomputed inputs shared read-only by all realizations.
class SimulationContext {
 public:
  SimulationContext(const FeederData& feeder, const ScenarioConfig& config, HpModel hp_model = {},
                    EvModel ev_model = {}, ThermalModel thermal = ThermalModel{}, FailureParams failure = {})
      : config_(config), hp_model_(hp_model), ev_model_(ev_model), thermal_(thermal), failure_(failure) {
    config_.validate();
    hp_model_.cop_cold = config_.hp_cop;
    feeder.topology.validate();
    if (feeder.meters.empty()) fail(ErrorKind::Data, "feeder has no meters");
    if (feeder.ambient_k.size() != kHoursPerYear) {
      fail(ErrorKind::Structural, "ambient temperature must cover one canonical year (8760 hours)");
    }
    require_finite(feeder.ambient_k, "ambient temperature");
    if (config_.base_year != 0 && config_.base_year != feeder.base_year) {
      fail(ErrorKind::Configuration, "configured base_year " + std::to_string(config_.base_year) +
                                         " does not match the data year " + std::to_string(feeder.base_year));
    }
    base_year_ = feeder.base_year;
    epoch_ = feeder.ambient_k.epoch();
    ambient_k_.assign(feeder.ambient_k.begin(), feeder.ambient_k.end());
    hp_shape_.resize(kHoursPerYear);
    for (std::size_t h = 0; h < kHoursPerYear; ++h) {
      hp_shape_[h] = hp_load_fraction(ambient_k_[h] - kZeroCelsiusK, hp_model_.t_ref_c, hp_model_.alpha_c);
    }

    const auto& xfmrs = feeder.topology.transformers;
    std::unordered_map<std::string, std::size_t> xindex;
    for (std::size_t x = 0; x < xfmrs.size(); ++x) {
      xindex.emplace(xfmrs[x].id, x);
      transformer_ids_.push_back(xfmrs[x].id);
      initial_age_.push_back(xfmrs[x].initial_age_years);
      const double capacity = xfmrs[x].rating_kva * xfmrs[x].capacity_scale * config_.capacity_scale;
      if (!(capacity > 0.0)) fail(ErrorKind::Configuration, "transformer '" + xfmrs[x].id + "' has no capacity");
      capacity_kva_.push_back(capacity);
    }
    base_load_kw_.assign(xfmrs.size(), std::vector<double>(kHoursPerYear, 0.0));
    meters_of_.assign(xfmrs.size(), {});

    for (std::size_t i = 0; i < feeder.meters.size(); ++i) {
      const Meter& m = feeder.meters[i];
      if (m.baseload.size() != kHoursPerYear) {
        fail(ErrorKind::Structural, "baseload of meter '" + m.id + "' is not one canonical year");
      }
      require_nonnegative(m.baseload, "baseload of meter '" + m.id + "'");
      auto it = xindex.find(m.transformer_id);
      if (it == xindex.end()) {
        fail(ErrorKind::Topology, "meter '" + m.id + "' references unknown transformer '" + m.transformer_id + "'");
      }
      meter_keys_.push_back(hash_string(m.id));
      meter_transformer_.push_back(it->second);
      meters_of_[it->second].push_back(i);
      auto& base = base_load_kw_[it->second];
      for (std::size_t h = 0; h < kHoursPerYear; ++h) base[h] += m.baseload[h];

      const Eligibility e = check_eligibility(m, config_);
      MeterDeviceState s;
      s.has_hp = m.has_hp;
      s.has_ev = m.has_ev;
      s.hp_eligible = e.hp;
      s.ev_eligible = e.ev;
      initial_state_.push_back(s);
    }
    hp_curve_ = make_growth_curve(config_.t50_hp, config_.f_max, config_.timescale_hp,
                                  owned_fraction(std::span<const Meter>(feeder.meters), DeviceKind::HeatPump),
                                  base_year_);
    ev_curve_ = make_growth_curve(config_.t50_ev, config_.f_max, config_.timescale_ev,
                                  owned_fraction(std::span<const Meter>(feeder.meters), DeviceKind::ElectricVehicle),
                                  base_year_);
  }

  const ScenarioConfig& config() const noexcept { return config_; }
  const GrowthCurve& hp_curve() const noexcept { return hp_curve_; }
  const GrowthCurve& ev_curve() const noexcept { return ev_curve_; }
  const std::vector<std::string>& transformer_ids() const noexcept { return transformer_ids_; }
  const std::vector<double>& initial_age() const noexcept { return initial_age_; }
  std::size_t meter_count() const noexcept { return meter_keys_.size(); }
  int base_year() const noexcept { return base_year_; }
  const FailureParams& failure_params() const noexcept { return failure_; }

  /// One full realization. Identical (master seed, index) gives bit-identical output.
  RealizationResult run(std::size_t index) const {
    const int horizon = config_.horizon_years;
    const std::uint64_t seed = realization_seed(config_.master_seed, index);
    const std::size_t n_x = transformer_ids_.size();

    RealizationResult r;
    r.index = index;
    r.horizon = horizon;
    r.transformer_ids = transformer_ids_;
    r.failure.assign(n_x * static_cast<std::size_t>(horizon), 0.0);
    r.aging_gain.assign(n_x, 0.0);

    std::vector<MeterDeviceState> meters = initial_state_;
    for (std::size_t i = 0; i < meters.size(); ++i) attach_devices(meters[i], i, seed, 0);

    std::vector<ThermalState> thermal(n_x);
    for (std::size_t x = 0; x < n_x; ++x) thermal[x] = {ambient_k_.front(), initial_age_[x]};

    std::vector<double> load(kHoursPerYear);
    for (int year = 1; year <= horizon; ++year) {
      const AdoptionDraw draw = draw_adoptions(seed, std::span<const MeterDeviceState>(meters),
                                               std::span<const std::uint64_t>(meter_keys_), hp_curve_,
                                               ev_curve_, year, base_year_);
      apply_adoptions(std::span<MeterDeviceState>(meters), std::span<const Adoption>(draw.adopted));
      int new_hp = 0, new_ev = 0;
      for (const auto& a : draw.adopted) {
        attach_devices(meters[a.meter_index], a.meter_index, seed, year);
        (a.kind == DeviceKind::HeatPump ? new_hp : new_ev) += 1;
      }
      record_adoption(r, meters, draw, new_hp, new_ev);

      for (std::size_t x = 0; x < n_x; ++x) {
        build_transformer_load(x, meters, seed, year, load);
        const double inv_capacity = 1.0 / capacity_kva_[x];
        for (double& v : load) v *= inv_capacity;
        thermal[x] = thermal_.simulate(load, ambient_k_, thermal[x]).end;
        r.failure[x * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(year - 1)] =
            failure_probability(thermal[x].age_years, failure_);
      }
    }
    for (std::size_t x = 0; x < n_x; ++x) r.aging_gain[x] = thermal[x].age_years - initial_age_[x];
    return r;
  }

  /// The adoption sequence of realization `index` alone: same draws as
  /// run(), no device loads or thermal simulation. `failure` stays empty.
  RealizationResult run_adoption(std::size_t index) const {
    const std::uint64_t seed = realization_seed(config_.master_seed, index);
    RealizationResult r;
    r.index = index;
    r.horizon = config_.horizon_years;
    r.transformer_ids = transformer_ids_;
    std::vector<MeterDeviceState> meters = initial_state_;
    for (int year = 1; year <= config_.horizon_years; ++year) {
      const AdoptionDraw draw = draw_adoptions(seed, std::span<const MeterDeviceState>(meters),
                                               std::span<const std::uint64_t>(meter_keys_), hp_curve_,
                                               ev_curve_, year, base_year_);
      apply_adoptions(std::span<MeterDeviceState>(meters), std::span<const Adoption>(draw.adopted));
      int new_hp = 0, new_ev = 0;
      for (const auto& a : draw.adopted) (a.kind == DeviceKind::HeatPump ? new_hp : new_ev) += 1;
      record_adoption(r, meters, draw, new_hp, new_ev);
    }
    return r;
  }

 private:
  void attach_devices(MeterDeviceState& m, std::size_t i, std::uint64_t seed, int year) const {
    if (m.has_hp && !m.hp) {
      RandomStream rng(substream_seed(seed, meter_keys_[i], year, StreamTag::HeatPumpDevice));
      m.hp = sample_hp_device(rng, hp_model_);
    }
    if (m.has_ev && !m.ev) {
      RandomStream rng(substream_seed(seed, meter_keys_[i], year, StreamTag::ElectricVehicleDevice));
      m.ev = sample_ev_device(rng, ev_model_);
    }
  }

  static void record_adoption(RealizationResult& r, const std::vector<MeterDeviceState>& meters,
                              const AdoptionDraw& draw, int new_hp, int new_ev) {
    int hp = 0, ev = 0, hp_el = 0, ev_el = 0;
    for (const auto& m : meters) {
      hp += m.has_hp;
      ev += m.has_ev;
      hp_el += m.hp_eligible;
      ev_el += m.ev_eligible;
    }
    r.hp_owners.push_back(hp);
    r.ev_owners.push_back(ev);
    r.hp_adopted.push_back(new_hp);
    r.ev_adopted.push_back(new_ev);
    r.hp_eligible.push_back(hp_el);
    r.ev_eligible.push_back(ev_el);
    r.p_hp.push_back(draw.p_hp);
    r.p_ev.push_back(draw.p_ev);
  }

  /// kW load of transformer `x` for one year; advances its meters' EV state.
  void build_transformer_load(std::size_t x, std::vector<MeterDeviceState>& meters, std::uint64_t seed, int year,
                              std::vector<double>& load) const {
    const auto& base = base_load_kw_[x];
    double hp_peak = 0.0;
    for (std::size_t i : meters_of_[x]) {
      if (meters[i].hp) hp_peak += meters[i].hp->peak_electric_kw;
    }
    for (std::size_t h = 0; h < kHoursPerYear; ++h) load[h] = base[h] + hp_peak * hp_shape_[h];

    for (std::size_t i : meters_of_[x]) {
      MeterDeviceState& m = meters[i];
      if (!m.ev) continue;
      for (std::size_t h = 0; h < m.ev_spill_kw.size() && h < kHoursPerYear; ++h) load[h] += m.ev_spill_kw[h];
      RandomStream rng(substream_seed(seed, meter_keys_[i], year, StreamTag::Driving));
      EvProfile p = ev_profile(rng, *m.ev, kDaysPerYear, epoch_, m.ev_busy_h);
      const auto values = p.load.values();
      for (std::size_t h = 0; h < kHoursPerYear; ++h) load[h] += values[h];
      m.ev->battery_level = p.battery_level_end;
      m.ev_busy_h = p.busy_until_h;
      m.ev_spill_kw = std::move(p.spill_kw);
    }
  }

  ScenarioConfig config_;
  HpModel hp_model_;
  EvModel ev_model_;
  ThermalModel thermal_;
  FailureParams failure_;
  GrowthCurve hp_curve_, ev_curve_;
  int base_year_ = 0;
  std::chrono::sys_days epoch_{};
  std::vector<double> ambient_k_;
  std::vector<double> hp_shape_;
  std::vector<std::string> transformer_ids_;
  std::vector<double> initial_age_;
  std::vector<double> capacity_kva_;
  std::vector<std::vector<double>> base_load_kw_;
  std::vector<std::vector<std::size_t>> meters_of_;
  std::vector<std::uint64_t> meter_keys_;
  std::vector<std::size_t> meter_transformer_;
  std::vector<MeterDeviceState> initial_state_;
};

inline RealizationResult run_realization(std::uint64_t master_seed, std::size_t index, ScenarioConfig scenario,
                                         const FeederData& feeder) {
  scenario.master_seed = master_seed;
  return SimulationContext(feeder, scenario).run(index);
}

/// Runs realizations [0, count) on `threads` workers. The returned vector
/// is ordered by realization index regardless of scheduling.
inline std::vector<RealizationResult> run_realizations(const SimulationContext& ctx, std::size_t count,
                                                       unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<RealizationResult> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = ctx.run(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

/// Recursive pairwise sum in index order.
inline double pairwise_sum(std::span<const double> v) noexcept {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Elementwise mean of F over realizations, reduced in the given order.
inline FailureCurveSet aggregate_curves(std::span<const RealizationResult> results) {
  if (results.empty()) fail(ErrorKind::Structural, "cannot aggregate zero realizations");
  const auto& first = results.front();
  for (const auto& r : results) {
    if (r.horizon != first.horizon || r.transformer_ids != first.transformer_ids ||
        r.failure.size() != first.failure.size()) {
      fail(ErrorKind::Structural, "realization results have mismatched shapes");
    }
  }
  FailureCurveSet curves(first.transformer_ids, first.horizon);
  std::vector<double> column(results.size());
  const double n = static_cast<double>(results.size());
  for (std::size_t x = 0; x < curves.size(); ++x) {
    for (int t = 1; t <= first.horizon; ++t) {
      for (std::size_t k = 0; k < results.size(); ++k) column[k] = results[k].failure_at(x, t);
      curves.set(x, t, std::clamp(pairwise_sum(column) / n, 0.0, 1.0));
    }
  }
  return curves;
}

struct ConvergenceReport {
  double max_abs_difference = 0.0;
  std::vector<double> per_transformer;  // sup over years
};

inline ConvergenceReport convergence_diagnostic(const FailureCurveSet& a, const FailureCurveSet& b) {
  if (!a.same_shape(b)) fail(ErrorKind::Structural, "curve sets have different transformers or horizons");
  ConvergenceReport rep;
  rep.per_transformer.assign(a.size(), 0.0);
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (int t = 1; t <= a.horizon(); ++t) {
      rep.per_transformer[x] = std::max(rep.per_transformer[x], std::abs(a.at(x, t) - b.at(x, t)));
    }
    rep.max_abs_difference = std::max(rep.max_abs_difference, rep.per_transformer[x]);
  }
  return rep;
}

/// Fraction of transformers whose mean failure probability rises by less
/// than kZeroAgingTolerance above what their initial age already implies.
inline double zero_aging_fraction(const FailureCurveSet& curves, std::span<const double> initial_age,
                                  const FailureParams& params = {}) {
  if (curves.size() == 0) return 0.0;
  std::size_t n = 0;
  for (std::size_t x = 0; x < curves.size(); ++x) {
    const double base = failure_probability(initial_age[x], params);
    if (curves.at(x, curves.horizon()) - base < kZeroAgingTolerance) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(curves.size());
}

/// Contents of summary.json.
inline nlohmann::ordered_json simulation_summary(const SimulationContext& ctx,
                                                 std::span<const RealizationResult> results,
                                                 const FailureCurveSet& curves) {
  const auto& c = ctx.config();
  nlohmann::ordered_json scenario = {
      {"horizon_years", c.horizon_years},
      {"realizations", c.realizations},
      {"master_seed", c.master_seed},
      {"t50_hp", c.t50_hp},
      {"t50_ev", c.t50_ev},
      {"base_year", ctx.base_year()},
      {"f_max", c.f_max},
      {"hp_winter_threshold_kw", c.hp_winter_threshold_kw},
      {"ev_mean_threshold_kw", c.ev_mean_threshold_kw},
      {"capacity_scale", c.capacity_scale},
      {"cost_upgrade", c.cost_upgrade},
      {"cost_failure", c.cost_failure},
      {"return_rate", c.return_rate},
      {"n_max", c.n_max},
      {"hp_cop", c.hp_cop},
      {"timescale_hp", ctx.hp_curve().timescale},
      {"timescale_ev", ctx.ev_curve().timescale},
  };
  nlohmann::ordered_json years = nlohmann::ordered_json::array();
  const double n = static_cast<double>(results.size());
  const double meters = static_cast<double>(ctx.meter_count());
  for (int t = 1; t <= c.horizon_years; ++t) {
    std::vector<double> hp, ev, hp_new, ev_new;
    for (const auto& r : results) {
      hp.push_back(r.hp_owners[static_cast<std::size_t>(t - 1)]);
      ev.push_back(r.ev_owners[static_cast<std::size_t>(t - 1)]);
      hp_new.push_back(r.hp_adopted[static_cast<std::size_t>(t - 1)]);
      ev_new.push_back(r.ev_adopted[static_cast<std::size_t>(t - 1)]);
    }
    const double calendar = ctx.base_year() + t;
    years.push_back({
        {"year", t},
        {"calendar_year", static_cast<int>(calendar)},
        {"mean_hp_owners", pairwise_sum(hp) / n},
        {"mean_ev_owners", pairwise_sum(ev) / n},
        {"mean_hp_adopted", pairwise_sum(hp_new) / n},
        {"mean_ev_adopted", pairwise_sum(ev_new) / n},
        {"mean_hp_fraction", pairwise_sum(hp) / n / meters},
        {"mean_ev_fraction", pairwise_sum(ev) / n / meters},
        {"logistic_hp_fraction", logistic_fraction(ctx.hp_curve(), calendar)},
        {"logistic_ev_fraction", logistic_fraction(ctx.ev_curve(), calendar)},
    });
  }
  return {
      {"scenario", scenario},
      {"realization_count", results.size()},
      {"transformer_count", curves.size()},
      {"meter_count", ctx.meter_count()},
      {"zero_aging_fraction", zero_aging_fraction(curves, ctx.initial_age(), ctx.failure_params())},
      {"adoption", years},
  };
}

}  // namespace xfrisk
