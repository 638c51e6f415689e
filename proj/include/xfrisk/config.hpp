#pragma once

// Scenario configuration files: one `key = value` per line, `#` starts a
// comment, blank lines ignored. Keys are the ScenarioConfig field names plus
// `scenario`, which applies a (t50_hp, t50_ev) preset. Keys are applied in
// file order, so an explicit t50 after `scenario` wins.

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "xfrisk/csv.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/model.hpp"

namespace xfrisk {

struct ScenarioPreset {
  double t50_hp;
  double t50_ev;
};

inline std::optional<ScenarioPreset> scenario_preset(std::string_view name) {
  if (name == "low") return ScenarioPreset{2050.0, 2060.0};
  if (name == "medium") return ScenarioPreset{2040.0, 2045.0};
  if (name == "high") return ScenarioPreset{2035.0, 2035.0};
  return std::nullopt;
}

inline void apply_scenario(ScenarioConfig& config, std::string_view name) {
  const auto preset = scenario_preset(name);
  if (!preset) fail(ErrorKind::Usage, "unknown scenario '" + std::string(name) + "' (expected low, medium or high)");
  config.t50_hp = preset->t50_hp;
  config.t50_ev = preset->t50_ev;
}

namespace detail {

template <typename T>
void set_number(T& field, std::string_view key, std::string_view value, const std::string& where) {
  bool ok = false;
  if constexpr (std::is_same_v<T, double>) {
    ok = csv::parse_double(value, field);
  } else {
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, field);
    ok = ec == std::errc{} && ptr == end;
  }
  if (!ok) fail(ErrorKind::Configuration, where + ": value for '" + std::string(key) + "' is not a valid number");
}

}  // namespace detail

/// Applies one key to `config`. Throws a configuration error for unknown keys.
inline void set_config_value(ScenarioConfig& config, std::string_view key, std::string_view value,
                             const std::string& where = "config") {
  using detail::set_number;
  if (key == "scenario") {
    if (!scenario_preset(value)) {
      fail(ErrorKind::Configuration, where + ": unknown scenario '" + std::string(value) + "'");
    }
    apply_scenario(config, value);
  } else if (key == "horizon_years") {
    set_number(config.horizon_years, key, value, where);
  } else if (key == "realizations") {
    set_number(config.realizations, key, value, where);
  } else if (key == "master_seed") {
    set_number(config.master_seed, key, value, where);
  } else if (key == "t50_hp") {
    set_number(config.t50_hp, key, value, where);
  } else if (key == "t50_ev") {
    set_number(config.t50_ev, key, value, where);
  } else if (key == "base_year") {
    set_number(config.base_year, key, value, where);
  } else if (key == "f_max") {
    set_number(config.f_max, key, value, where);
  } else if (key == "hp_winter_threshold_kw") {
    set_number(config.hp_winter_threshold_kw, key, value, where);
  } else if (key == "ev_mean_threshold_kw") {
    set_number(config.ev_mean_threshold_kw, key, value, where);
  } else if (key == "capacity_scale") {
    set_number(config.capacity_scale, key, value, where);
  } else if (key == "cost_upgrade") {
    set_number(config.cost_upgrade, key, value, where);
  } else if (key == "cost_failure") {
    set_number(config.cost_failure, key, value, where);
  } else if (key == "return_rate") {
    set_number(config.return_rate, key, value, where);
  } else if (key == "n_max") {
    set_number(config.n_max, key, value, where);
  } else if (key == "timescale_hp") {
    set_number(config.timescale_hp, key, value, where);
  } else if (key == "timescale_ev") {
    set_number(config.timescale_ev, key, value, where);
  } else if (key == "hp_cop") {
    set_number(config.hp_cop, key, value, where);
  } else {
    fail(ErrorKind::Configuration, where + ": unknown key '" + std::string(key) + "'");
  }
}

/// Parses a config stream on top of `base`. Does not validate; callers
/// validate after applying command-line overrides.
inline ScenarioConfig parse_config(std::istream& in, const std::string& name = "config",
                                   ScenarioConfig base = {}) {
  std::string line;
  std::size_t number = 0;
  std::map<std::string, std::size_t, std::less<>> seen;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = csv::trim(s);
    if (s.empty()) continue;
    const std::string where = name + ":" + std::to_string(number);
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Configuration, where + ": expected 'key = value'");
    const auto key = csv::trim(s.substr(0, eq));
    const auto value = csv::trim(s.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::Configuration, where + ": empty key");
    if (value.empty()) fail(ErrorKind::Configuration, where + ": empty value for '" + std::string(key) + "'");
    if (auto [it, inserted] = seen.emplace(std::string(key), number); !inserted) {
      fail(ErrorKind::Configuration, where + ": duplicate key '" + std::string(key) + "' (first set on line " +
                                         std::to_string(it->second) + ")");
    }
    set_config_value(base, key, value, where);
  }
  return base;
}

inline ScenarioConfig load_config(const std::string& path) {
  auto in = csv::open_input(path);
  return parse_config(in, path);
}

}  // namespace xfrisk
