#pragma once

// Upgrade scheduling against mean failure curves.
//
// With effective costs
//   Cu[x][t] = Cu[x] * (2 - (1+r)^(t-1))
//   Cf[x][t] = sum_{t'<=t} Cf[x] * (F[x][t'] - F[x][t'-1]) * (2 - (1+r)^(t'-1))
// the objective
//   sum U[x][t] Cu[x][t] + sum U[x][t] (Cf[x][t] - F[x][t] Cu[x][t])
//   + sum_x (1 - sum_t U[x][t]) Cf[x][T]
// equals  sum_x Cf[x][T] + sum_{U[x][t]=1} w[x][t]  with
//   w[x][t] = Cu[x][t] + Cf[x][t] - F[x][t] Cu[x][t] - Cf[x][T].
//
// Each transformer takes at most one year and each year at most n_max
// transformers: a transportation problem with an opt-out. Its constraint
// matrix is totally unimodular, so an exact assignment solve is optimal
// for the binary program.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "xfrisk/csv.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/model.hpp"

namespace xfrisk {

struct CostModel {
  std::vector<double> upgrade_cost;  // thousands, per transformer
  std::vector<double> failure_cost;  // thousands, per transformer
  double return_rate = 0.02;
  int horizon = 20;

  static CostModel uniform(std::size_t transformers, double upgrade, double failure, double return_rate,
                           int horizon) {
    return CostModel{std::vector<double>(transformers, upgrade), std::vector<double>(transformers, failure),
                     return_rate, horizon};
  }

  void validate(std::size_t transformers) const {
    if (upgrade_cost.size() != transformers || failure_cost.size() != transformers) {
      fail(ErrorKind::Configuration, "cost model does not cover every transformer");
    }
    if (!(return_rate >= 0.0 && return_rate < 1.0)) fail(ErrorKind::Configuration, "return rate must be in [0, 1)");
    if (horizon < 1) fail(ErrorKind::Configuration, "cost horizon must be >= 1");
    for (std::size_t x = 0; x < transformers; ++x) {
      if (!(upgrade_cost[x] > 0.0)) fail(ErrorKind::Configuration, "upgrade cost must be positive");
      if (!(failure_cost[x] > upgrade_cost[x])) {
        fail(ErrorKind::Configuration, "failure cost must exceed upgrade cost");
      }
    }
  }
};

/// Deferral discount factor 2 - (1+r)^(t-1).
inline double deferral_factor(double return_rate, int year) noexcept {
  return 2.0 - std::pow(1.0 + return_rate, year - 1);
}

class EffectiveCosts {
 public:
  EffectiveCosts(std::size_t transformers, int horizon)
      : n_(transformers), horizon_(horizon),
        upgrade_(transformers * static_cast<std::size_t>(horizon), 0.0),
        failure_(transformers * static_cast<std::size_t>(horizon), 0.0) {}

  std::size_t size() const noexcept { return n_; }
  int horizon() const noexcept { return horizon_; }

  double upgrade(std::size_t x, int t) const noexcept { return upgrade_[idx(x, t)]; }
  double failure(std::size_t x, int t) const noexcept { return t <= 0 ? 0.0 : failure_[idx(x, t)]; }
  double& upgrade(std::size_t x, int t) noexcept { return upgrade_[idx(x, t)]; }
  double& failure(std::size_t x, int t) noexcept { return failure_[idx(x, t)]; }

 private:
  std::size_t idx(std::size_t x, int t) const noexcept {
    return x * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t - 1);
  }
  std::size_t n_;
  int horizon_;
  std::vector<double> upgrade_;
  std::vector<double> failure_;
};

inline EffectiveCosts effective_costs(const CostModel& model, const FailureCurveSet& curves) {
  curves.validate();
  model.validate(curves.size());
  if (model.horizon != curves.horizon()) {
    fail(ErrorKind::Configuration, "cost horizon differs from the curve horizon");
  }
  EffectiveCosts c(curves.size(), curves.horizon());
  for (std::size_t x = 0; x < curves.size(); ++x) {
    double cumulative = 0.0;
    for (int t = 1; t <= curves.horizon(); ++t) {
      const double factor = deferral_factor(model.return_rate, t);
      c.upgrade(x, t) = model.upgrade_cost[x] * factor;
      cumulative += model.failure_cost[x] * curves.increment(x, t) * factor;
      c.failure(x, t) = cumulative;
    }
  }
  return c;
}

/// Net cost of upgrading x in year t relative to never upgrading it.
inline double upgrade_weight(const EffectiveCosts& c, const FailureCurveSet& curves, std::size_t x, int t) noexcept {
  const int T = c.horizon();
  return c.upgrade(x, t) + c.failure(x, t) - curves.at(x, t) * c.upgrade(x, t) - c.failure(x, T);
}

/// Planned upgrade year per transformer (curve order); 0 means none.
struct Schedule {
  std::vector<int> upgrade_year;
  int n_max = 1;

  std::size_t upgrades() const noexcept {
    return static_cast<std::size_t>(std::count_if(upgrade_year.begin(), upgrade_year.end(), [](int y) { return y > 0; }));
  }

  std::vector<int> upgrades_per_year(int horizon) const {
    std::vector<int> out(static_cast<std::size_t>(horizon), 0);
    for (int y : upgrade_year) {
      if (y >= 1 && y <= horizon) ++out[static_cast<std::size_t>(y - 1)];
    }
    return out;
  }

  /// At most one year per transformer holds by construction; checks year
  /// range and per-year capacity.
  void validate(std::size_t transformers, int horizon) const {
    if (upgrade_year.size() != transformers) fail(ErrorKind::Structural, "schedule does not cover every transformer");
    for (int y : upgrade_year) {
      if (y < 0 || y > horizon) fail(ErrorKind::Data, "upgrade year " + std::to_string(y) + " is outside the horizon");
    }
    for (int count : upgrades_per_year(horizon)) {
      if (count > n_max) fail(ErrorKind::Data, "schedule exceeds the per-year upgrade limit");
    }
  }
};

struct ScheduleResult {
  Schedule schedule;
  double objective = 0.0;
};

/// Objective of an arbitrary schedule, summed in transformer order.
inline double schedule_objective(const EffectiveCosts& c, const FailureCurveSet& curves, const Schedule& s) {
  double total = 0.0;
  for (std::size_t x = 0; x < curves.size(); ++x) {
    total += c.failure(x, c.horizon());
    if (s.upgrade_year[x] > 0) total += upgrade_weight(c, curves, x, s.upgrade_year[x]);
  }
  return total;
}

/// Transformers worth considering: nonzero failure probability by the horizon.
inline std::vector<std::size_t> schedule_candidates(const FailureCurveSet& curves) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < curves.size(); ++x) {
    if (curves.at(x, curves.horizon()) > 0.0) out.push_back(x);
  }
  return out;
}

namespace detail {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// Hungarian method with potentials, O(rows^2 * cols). Returns the column of
/// each row.
template <typename CostFn>
std::vector<std::size_t> min_cost_assignment(std::size_t rows, std::size_t cols, CostFn cost) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> minv(cols + 1);
  std::vector<char> used(cols + 1);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> column(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] != 0) column[p[j] - 1] = j - 1;
  }
  return column;
}

/// Drops upgrades that do not strictly pay off, then moves each upgrade to
/// the earliest year with exactly the same weight and spare capacity.
inline void normalize_ties(const EffectiveCosts& c, const FailureCurveSet& curves, Schedule& s) {
  const int T = c.horizon();
  for (std::size_t x = 0; x < s.upgrade_year.size(); ++x) {
    if (s.upgrade_year[x] > 0 && !(upgrade_weight(c, curves, x, s.upgrade_year[x]) < 0.0)) s.upgrade_year[x] = 0;
  }
  std::vector<int> load = s.upgrades_per_year(T);
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t x = 0; x < s.upgrade_year.size(); ++x) {
      const int t = s.upgrade_year[x];
      if (t <= 1) continue;
      const double w = upgrade_weight(c, curves, x, t);
      for (int e = 1; e < t; ++e) {
        if (load[static_cast<std::size_t>(e - 1)] < s.n_max && upgrade_weight(c, curves, x, e) == w) {
          --load[static_cast<std::size_t>(t - 1)];
          ++load[static_cast<std::size_t>(e - 1)];
          s.upgrade_year[x] = e;
          moved = true;
          break;
        }
      }
    }
  }
}

}  // namespace detail

/// Exact minimum-cost schedule with at most `n_max` upgrades per year.
inline ScheduleResult solve_schedule(const CostModel& model, const FailureCurveSet& curves, int n_max) {
  if (n_max <= 0) fail(ErrorKind::Configuration, "n_max must be a positive number of upgrades per year");
  const EffectiveCosts c = effective_costs(model, curves);
  const int T = curves.horizon();
  ScheduleResult out;
  out.schedule.n_max = n_max;
  out.schedule.upgrade_year.assign(curves.size(), 0);

  const std::vector<std::size_t> cand = schedule_candidates(curves);
  if (!cand.empty()) {
    // Columns: T year blocks of `slots` identical seats, then one opt-out
    // seat per candidate.
    const std::size_t n = cand.size();
    const std::size_t slots = std::min<std::size_t>(static_cast<std::size_t>(n_max), n);
    const std::size_t year_cols = static_cast<std::size_t>(T) * slots;
    std::vector<double> w(n * static_cast<std::size_t>(T));
    for (std::size_t i = 0; i < n; ++i) {
      for (int t = 1; t <= T; ++t) w[i * static_cast<std::size_t>(T) + static_cast<std::size_t>(t - 1)] = upgrade_weight(c, curves, cand[i], t);
    }
    auto cost = [&](std::size_t row, std::size_t col) {
      if (col >= year_cols) return 0.0;
      return w[row * static_cast<std::size_t>(T) + col / slots];
    };
    const auto column = detail::min_cost_assignment(n, year_cols + n, cost);
    for (std::size_t i = 0; i < n; ++i) {
      if (column[i] < year_cols) out.schedule.upgrade_year[cand[i]] = static_cast<int>(column[i] / slots) + 1;
    }
    detail::normalize_ties(c, curves, out.schedule);
  }
  out.schedule.validate(curves.size(), T);
  out.objective = schedule_objective(c, curves, out.schedule);
  return out;
}

inline constexpr std::size_t kBruteForceMaxCells = 12;

/// Exhaustive enumeration over all feasible assignments of the candidates.
/// Test oracle; refuses instances with more than `max_cells`
/// candidate-years.
inline ScheduleResult brute_force_schedule(const CostModel& model, const FailureCurveSet& curves, int n_max,
                                           std::size_t max_cells = kBruteForceMaxCells) {
  if (n_max <= 0) fail(ErrorKind::Configuration, "n_max must be a positive number of upgrades per year");
  const EffectiveCosts c = effective_costs(model, curves);
  const int T = curves.horizon();
  const std::vector<std::size_t> cand = schedule_candidates(curves);
  if (cand.size() * static_cast<std::size_t>(T) > max_cells) {
    fail(ErrorKind::Domain, "instance too large for exhaustive enumeration (" + std::to_string(cand.size()) +
                                " candidates x " + std::to_string(T) + " years)");
  }
  ScheduleResult best;
  best.schedule.n_max = n_max;
  best.schedule.upgrade_year.assign(curves.size(), 0);
  best.objective = schedule_objective(c, curves, best.schedule);

  Schedule trial = best.schedule;
  std::vector<int> digits(cand.size(), 0);  // mixed radix, base T + 1
  std::vector<int> per_year(static_cast<std::size_t>(T), 0);
  while (true) {
    std::size_t k = 0;
    while (k < digits.size() && digits[k] == T) digits[k++] = 0;
    if (k == digits.size()) break;
    ++digits[k];

    std::fill(per_year.begin(), per_year.end(), 0);
    bool feasible = true;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      trial.upgrade_year[cand[i]] = digits[i];
      if (digits[i] > 0 && ++per_year[static_cast<std::size_t>(digits[i] - 1)] > n_max) feasible = false;
    }
    if (!feasible) continue;
    const double value = schedule_objective(c, curves, trial);
    if (value < best.objective) {
      best.objective = value;
      best.schedule = trial;
    }
  }
  return best;
}

/// Expected failures per year (index t-1) when upgraded transformers stop
/// failing from the start of their upgrade year.
inline std::vector<double> expected_failures(const FailureCurveSet& curves, const Schedule& schedule) {
  schedule.validate(curves.size(), curves.horizon());
  std::vector<double> e(static_cast<std::size_t>(curves.horizon()), 0.0);
  for (int t = 1; t <= curves.horizon(); ++t) {
    double sum = 0.0;
    for (std::size_t x = 0; x < curves.size(); ++x) {
      const int u = schedule.upgrade_year[x];
      if (u > 0 && u <= t) continue;
      sum += curves.increment(x, t);
    }
    e[static_cast<std::size_t>(t - 1)] = sum;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Files

inline void write_schedule(const FailureCurveSet& curves, const Schedule& s, std::ostream& out) {
  out << "transformer_id,upgrade_year\n";
  for (std::size_t x = 0; x < curves.size(); ++x) {
    if (s.upgrade_year[x] > 0) out << curves.id(x) << ',' << s.upgrade_year[x] << '\n';
  }
}

/// Reads schedule.csv against the curve set it was solved for. The per-year
/// limit is not stored in the file; it is reported as the observed maximum.
inline Schedule read_schedule(std::istream& in, const FailureCurveSet& curves, const std::string& name = "schedule.csv") {
  csv::Reader r(in, name, {"transformer_id", "upgrade_year"});
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t x = 0; x < curves.size(); ++x) index.emplace(curves.id(x), x);
  Schedule s;
  s.upgrade_year.assign(curves.size(), 0);
  std::vector<std::string_view> f;
  while (r.next(f)) {
    auto it = index.find(std::string(f[0]));
    if (it == index.end()) {
      fail(ErrorKind::Topology, name + ":" + std::to_string(r.line_number()) + ": schedule references unknown transformer '" +
                                    std::string(f[0]) + "'");
    }
    int year = 0;
    if (!csv::parse_int(f[1], year) || year < 1 || year > curves.horizon()) {
      r.error("upgrade_year must be an integer in 1.." + std::to_string(curves.horizon()));
    }
    if (s.upgrade_year[it->second] != 0) r.error("transformer '" + std::string(f[0]) + "' is scheduled twice");
    s.upgrade_year[it->second] = year;
  }
  const auto per_year = s.upgrades_per_year(curves.horizon());
  s.n_max = std::max(1, *std::max_element(per_year.begin(), per_year.end()));
  return s;
}

inline void write_expected_failures(const std::vector<double>& expected, const std::vector<int>& planned,
                                    std::ostream& out) {
  out << "year,expected_count,planned_upgrades\n";
  for (std::size_t t = 0; t < expected.size(); ++t) {
    out << (t + 1) << ',' << csv::format_double(expected[t]) << ',' << planned[t] << '\n';
  }
}

}  // namespace xfrisk
