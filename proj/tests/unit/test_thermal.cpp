#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace xfrisk;
using namespace testing_support;

namespace {

struct EulerResult {
  std::vector<double> hourly_t;
  double aging_hours = 0.0;
};

// Explicit Euler on the hot-spot ODE with `substeps` per hour; aging uses
// the rate at the end of each substep.
EulerResult euler_oracle(const std::vector<double>& load, const std::vector<double>& ambient, double t0, int substeps) {
  const ThermalParams p;
  const AgingParams a;
  const double h = 60.0 / substeps;
  EulerResult r;
  double t = t0;
  for (std::size_t n = 0; n < load.size(); ++n) {
    for (int k = 0; k < substeps; ++k) {
      t += h * (p.load_coefficient * load[n] * load[n] - p.cooling_rate * (t - ambient[n]) + p.heating_offset);
      r.aging_hours += aging_rate(t, a) * h / 60.0;
    }
    r.hourly_t.push_back(t);
  }
  return r;
}

void pulse_week(std::vector<double>& load, std::vector<double>& ambient) {
  for (std::size_t n = 0; n < 168; ++n) {
    const double hour = static_cast<double>(n % 24);
    ambient.push_back(293.15 + 10.0 * std::sin(2.0 * std::acos(-1.0) * (hour - 9.0) / 24.0));
    load.push_back((n % 24 >= 17 && n % 24 < 21) ? 1.5 : (n % 24 >= 7 ? 0.6 : 0.0));
  }
}

}  // namespace

TEST(Thermal, PinnedAnalytics) {
  EXPECT_NEAR(aging_rate(383.0), 1.0, 1e-12);
  EXPECT_NEAR(failure_probability(112.0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(steady_state_temperature(1.0, 0.0), 15.612244897959183, 1e-9);
}

TEST(Thermal, StepExamples) {
  const double t_ss = steady_state_temperature(0.7, 280.0);
  EXPECT_DOUBLE_EQ(step_temperature(t_ss, 0.7, 280.0), t_ss);
  EXPECT_NEAR(steady_state_temperature(0.0, 300.0) - 300.0, 0.178 / 0.049, 1e-12);
  const double expect = 293.15 + (0.765 / 0.049) * (1.0 - std::exp(-2.94));
  EXPECT_NEAR(step_temperature(293.15, 1.0, 293.15), expect, 1e-9);
  EXPECT_NEAR(step_temperature(293.15, 1.0, 293.15), 307.94, 0.01);
  ThermalModel m;
  EXPECT_DOUBLE_EQ(m.step(293.15, 1.0, 293.15), step_temperature(293.15, 1.0, 293.15));
}

TEST(Thermal, AgingRateExamples) {
  EXPECT_NEAR(aging_rate(393.0), std::exp(15000.0 * (1.0 / 383.0 - 1.0 / 393.0)), 1e-12);
  EXPECT_NEAR(aging_rate(393.0), 2.7089, 1e-4);
  EXPECT_NEAR(aging_rate(373.0), 0.3499, 1e-4);
  EXPECT_GT(aging_rate(383.0001), 1.0);
  EXPECT_LT(aging_rate(382.9999), 1.0);
}

TEST(Thermal, FailureProbabilityExamples) {
  EXPECT_EQ(failure_probability(0.0), 0.0);
  EXPECT_NEAR(failure_probability(56.0), 1.0 - std::exp(-std::pow(0.5, 3.5)), 1e-15);
  EXPECT_NEAR(failure_probability(56.0), 0.08459, 1e-5);
  EXPECT_EQ(error_kind_of([] { failure_probability(-1.0); }), ErrorKind::Domain);
  double prev = failure_probability(0.5);
  for (double a = 1.0; a < 400.0; a *= 1.3) {
    const double f = failure_probability(a);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(Thermal, NominalTemperatureYearAgesExactlyOneYear) {
  // Load and ambient chosen so the steady state is 383 K; start there.
  const double ambient = 383.0 - steady_state_temperature(1.0, 0.0);
  std::vector<double> load(kHoursPerYear, 1.0);
  std::vector<double> amb(kHoursPerYear, ambient);
  const auto y = ThermalModel{}.simulate(load, amb, {383.0, 0.0});
  EXPECT_NEAR(y.end.age_years, 1.0, 1e-12);
  EXPECT_NEAR(y.end.temperature_k, 383.0, 1e-9);
}

TEST(Thermal, NoLoadAtFreezingBarelyAges) {
  std::vector<double> load(kHoursPerYear, 0.0);
  std::vector<double> amb(kHoursPerYear, 273.15);
  const auto y = ThermalModel{}.simulate(load, amb, {273.15, 2.0}, true);
  EXPECT_NEAR(y.end.temperature_k, 273.15 + 0.178 / 0.049, 1e-9);
  EXPECT_GT(y.end.age_years, 2.0);
  EXPECT_LT(y.end.age_years - 2.0, 1e-6);
  ASSERT_EQ(y.trace.size(), kHoursPerYear);
}

TEST(Thermal, RatedLoadAtRoomTemperatureAgesSlowly) {
  const double t = steady_state_temperature(1.0, 293.15);
  EXPECT_NEAR(t, 308.76, 0.01);
  EXPECT_LT(aging_rate(t), 1e-3);
}

TEST(Thermal, TraceIsBoundedBySteadyStatesAndStart) {
  RandomStream rng(11);
  std::vector<double> load(500), amb(500);
  for (std::size_t n = 0; n < load.size(); ++n) {
    load[n] = rng.uniform(0.0, 3.0);
    amb[n] = rng.uniform(250.0, 310.0);
  }
  const double start = 400.0;
  const auto y = ThermalModel{}.simulate(load, amb, {start, 0.0}, true);
  double lo = start, hi = start;
  for (std::size_t n = 0; n < load.size(); ++n) {
    const double ss = steady_state_temperature(load[n], amb[n]);
    lo = std::min(lo, ss);
    hi = std::max(hi, ss);
  }
  for (double t : y.trace) {
    EXPECT_GE(t, lo - 1e-9);
    EXPECT_LE(t, hi + 1e-9);
  }
  EXPECT_GE(y.end.age_years, 0.0);
}

TEST(Thermal, MisalignedSeriesIsStructuralError) {
  std::vector<double> load(24, 1.0), amb(23, 290.0);
  EXPECT_EQ(error_kind_of([&] { ThermalModel{}.simulate(load, amb, {290.0, 0.0}); }), ErrorKind::Structural);
  const auto pu = constant_series(1.0, 24);
  const auto ambient = constant_series(290.0, 48);
  EXPECT_EQ(error_kind_of([&] { simulate_transformer_year(pu, ambient, {290.0, 0.0}); }), ErrorKind::Structural);
}

TEST(Thermal, ExactStepperConvergesToFineEulerOracle) {
  std::vector<double> load, amb;
  pulse_week(load, amb);
  const auto exact = ThermalModel{{}, {}, 0.0}.simulate(load, amb, {amb[0], 0.0}, true);
  const double exact_hours = exact.end.age_years * kHoursPerAgingYear;
  // Euler error is first order: refining the substep tenfold shrinks it about
  // tenfold until the aging difference meets the quadrature floor (~4e-5).
  double prev_dt = 0.0, prev_da = 0.0;
  for (int substeps : {60, 600, 6000}) {
    const auto e = euler_oracle(load, amb, amb[0], substeps);
    double max_dt = 0.0;
    for (std::size_t n = 0; n < load.size(); ++n) max_dt = std::max(max_dt, std::abs(e.hourly_t[n] - exact.trace[n]));
    const double rel = std::abs(e.aging_hours - exact_hours) / exact_hours;
    if (prev_dt > 0.0) {
      EXPECT_LT(max_dt, prev_dt / 5.0);
      if (substeps == 600) {
        EXPECT_LT(rel, prev_da / 5.0);
      }
    }
    prev_dt = max_dt;
    prev_da = rel;
  }
  EXPECT_LT(prev_dt, 2e-3);
  EXPECT_LT(prev_da, 1e-4);
}

TEST(Thermal, CoarseQuadratureTierMatchesFullRule) {
  RandomStream rng(5);
  std::vector<double> load(kHoursPerYear), amb(kHoursPerYear);
  for (std::size_t n = 0; n < load.size(); ++n) {
    const double season = std::cos(2.0 * std::acos(-1.0) * static_cast<double>(n) / kHoursPerYear);
    amb[n] = 283.0 - 15.0 * season + rng.uniform(-5.0, 5.0);
    load[n] = rng.uniform(0.0, 1.0) * rng.uniform(0.5, 3.2);
  }
  const auto full = ThermalModel{{}, {}, 0.0}.simulate(load, amb, {amb[0], 0.0});
  const auto tiered = ThermalModel{}.simulate(load, amb, {amb[0], 0.0});
  EXPECT_GT(full.end.age_years, 0.0);
  EXPECT_LT(std::abs(tiered.end.age_years - full.end.age_years) / full.end.age_years, 1e-3);
  EXPECT_LT(std::abs(tiered.end.age_years - full.end.age_years), 1e-5);
  EXPECT_EQ(tiered.end.temperature_k, full.end.temperature_k);
}

TEST(Thermal, HigherLoadNeverLowersAging) {
  std::vector<double> load, amb;
  pulse_week(load, amb);
  const auto base = ThermalModel{}.simulate(load, amb, {amb[0], 0.0}, true);
  for (double& l : load) l *= 1.2;
  const auto more = ThermalModel{}.simulate(load, amb, {amb[0], 0.0}, true);
  EXPECT_GT(more.end.age_years, base.end.age_years);
  for (std::size_t n = 0; n < base.trace.size(); ++n) EXPECT_GE(more.trace[n], base.trace[n]);
}
