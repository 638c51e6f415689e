#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace xfrisk;
using namespace testing_support;

TEST(HourlyTimeSeries, RejectsLengthsThatAreNotWholeDays) {
  EXPECT_EQ(error_kind_of([] { HourlyTimeSeries(year_start(2023), std::vector<double>(25, 0.0)); }),
            ErrorKind::Structural);
  EXPECT_EQ(error_kind_of([] { HourlyTimeSeries(year_start(2023), {}); }), ErrorKind::Structural);
  EXPECT_NO_THROW(HourlyTimeSeries(year_start(2023), std::vector<double>(48, 0.0)));
}

TEST(HourlyTimeSeries, AdditionRequiresAlignment) {
  auto a = constant_series(1.0, 24);
  auto b = constant_series(2.0, 48);
  EXPECT_EQ(error_kind_of([&] { a += b; }), ErrorKind::Structural);
  auto c = HourlyTimeSeries::constant(year_start(2022), 24, 1.0);
  EXPECT_EQ(error_kind_of([&] { a += c; }), ErrorKind::Structural);
}

TEST(HourlyTimeSeries, NonNegativeCheckNamesTheSeries) {
  auto s = constant_series(1.0, 24);
  s[5] = -0.1;
  try {
    require_nonnegative(s, "meter 'M9'");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("M9"), std::string::npos);
  }
}

TEST(CanonicalCalendar, DropsLeapDayAndMapsMonths) {
  using namespace std::chrono;
  EXPECT_EQ(canonical_day_of_year(year{2024} / February / 29), -1);
  EXPECT_EQ(canonical_day_of_year(year{2024} / March / 1), 59);
  EXPECT_EQ(canonical_day_of_year(year{2023} / December / 31), 364);
  EXPECT_EQ(canonical_month_of_day(0), 1u);
  EXPECT_EQ(canonical_month_of_day(58), 2u);
  EXPECT_EQ(canonical_month_of_day(59), 3u);
  EXPECT_EQ(canonical_month_of_hour(kHoursPerYear - 1), 12u);
}

TEST(AggregateTransformerLoad, ConstantMetersAdd) {
  Transformer t{"T1", 25.0, {"A", "B"}, 0.0, 1.0};
  std::unordered_map<std::string, HourlyTimeSeries> loads{{"A", constant_series(1.0, 24)},
                                                          {"B", constant_series(2.5, 24)}};
  const auto sum = aggregate_transformer_load(t, loads, year_start(2023), 24);
  for (double v : sum) EXPECT_DOUBLE_EQ(v, 3.5);
}

TEST(AggregateTransformerLoad, EmptyMeterSetIsZero) {
  Transformer t{"T1", 25.0, {}, 0.0, 1.0};
  const auto sum = aggregate_transformer_load(t, {}, year_start(2023), 48);
  EXPECT_EQ(sum.size(), 48u);
  for (double v : sum) EXPECT_EQ(v, 0.0);
}

TEST(AggregateTransformerLoad, MatchesIndependentSumAndIgnoresOrder) {
  RandomStream rng(42);
  std::unordered_map<std::string, HourlyTimeSeries> loads;
  Transformer t{"T1", 25.0, {"A", "B", "C"}, 0.0, 1.0};
  for (const auto& id : t.meters) {
    std::vector<double> v(kHoursPerYear);
    for (double& x : v) x = rng.uniform(0.0, 5.0);
    loads.emplace(id, HourlyTimeSeries(year_start(2023), v));
  }
  const auto sum = aggregate_transformer_load(t, loads, year_start(2023), kHoursPerYear);
  for (std::size_t h = 0; h < kHoursPerYear; ++h) {
    const double expect = (loads.at("A")[h] + loads.at("B")[h]) + loads.at("C")[h];
    EXPECT_EQ(sum[h], expect);
  }
  // Reordered meters: same values up to floating-point association.
  Transformer r = t;
  std::reverse(r.meters.begin(), r.meters.end());
  const auto rsum = aggregate_transformer_load(r, loads, year_start(2023), kHoursPerYear);
  for (std::size_t h = 0; h < kHoursPerYear; ++h) EXPECT_NEAR(rsum[h], sum[h], 1e-12);
}

TEST(AggregateTransformerLoad, ErrorsOnUnknownMeterOrMisalignment) {
  Transformer t{"T1", 25.0, {"A", "Z"}, 0.0, 1.0};
  std::unordered_map<std::string, HourlyTimeSeries> loads{{"A", constant_series(1.0, 24)}};
  EXPECT_EQ(error_kind_of([&] { aggregate_transformer_load(t, loads, year_start(2023), 24); }), ErrorKind::Topology);
  Transformer u{"T1", 25.0, {"A"}, 0.0, 1.0};
  EXPECT_EQ(error_kind_of([&] { aggregate_transformer_load(u, loads, year_start(2023), 48); }),
            ErrorKind::Structural);
}

TEST(PerUnitLoad, RatingExamples) {
  Transformer t{"T1", 25.0, {}, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(per_unit_load(constant_series(25.0, 24), t)[0], 1.0);
  t.capacity_scale = 1.5;
  EXPECT_NEAR(per_unit_load(constant_series(25.0, 24), t)[0], 25.0 / 37.5, 1e-15);
  EXPECT_EQ(per_unit_load(constant_series(0.0, 24), t)[0], 0.0);
}

TEST(PerUnitLoad, DoublingCapacityHalvesExactly) {
  RandomStream rng(3);
  std::vector<double> v(24);
  for (double& x : v) x = rng.uniform(0.0, 40.0);
  const HourlyTimeSeries load(year_start(2023), v);
  Transformer t{"T1", 15.0, {}, 0.0, 1.25};
  const auto a = per_unit_load(load, t);
  t.capacity_scale = 2.5;
  const auto b = per_unit_load(load, t);
  for (std::size_t h = 0; h < 24; ++h) EXPECT_EQ(b[h], a[h] / 2.0);
}

TEST(PerUnitLoad, NonPositiveCapacityIsConfigurationError) {
  Transformer t{"T1", 0.0, {}, 0.0, 1.0};
  EXPECT_EQ(error_kind_of([&] { per_unit_load(constant_series(1.0, 24), t); }), ErrorKind::Configuration);
}

TEST(Topology, ValidateCatchesInconsistentMaps) {
  Topology topo;
  topo.transformers.push_back({"T1", 10.0, {"M1"}, 0.0, 1.0});
  topo.meter_to_transformer = {{"M1", "T1"}};
  EXPECT_NO_THROW(topo.validate());
  topo.meter_to_transformer["M2"] = "T9";
  EXPECT_ANY_THROW(topo.validate());
}

TEST(FailureCurveSet, ValidateRejectsDecreasingOrOutOfRange) {
  EXPECT_NO_THROW(make_curves({{0.0, 0.1, 0.1}}).validate());
  EXPECT_EQ(error_kind_of([] { make_curves({{0.2, 0.1, 0.3}}).validate(); }), ErrorKind::Data);
  EXPECT_EQ(error_kind_of([] { make_curves({{0.2, 1.1, 1.1}}).validate(); }), ErrorKind::Data);
  EXPECT_EQ(error_kind_of([] { make_curves({{-0.1, 0.0, 0.0}}).validate(); }), ErrorKind::Data);
}

TEST(FailureCurveSet, ReadWriteRoundTrip) {
  RandomStream rng(8);
  const auto curves = random_curves(rng, 7, 5);
  std::stringstream s;
  write_failure_curves(curves, s);
  const auto back = read_failure_curves(s);
  EXPECT_EQ(back, curves);
}

TEST(FailureCurveSet, ReaderRejectsGapsAndUnequalHorizons) {
  std::stringstream gap("transformer_id,year,mean_F\nA,1,0\nA,3,0\n");
  EXPECT_EQ(error_kind_of([&] { read_failure_curves(gap); }), ErrorKind::Data);
  std::stringstream ragged("transformer_id,year,mean_F\nA,1,0\nA,2,0\nB,1,0\n");
  EXPECT_EQ(error_kind_of([&] { read_failure_curves(ragged); }), ErrorKind::Data);
  std::stringstream decreasing("transformer_id,year,mean_F\nA,1,0.5\nA,2,0.4\n");
  EXPECT_EQ(error_kind_of([&] { read_failure_curves(decreasing); }), ErrorKind::Data);
  std::stringstream header("id,year,F\nA,1,0\n");
  EXPECT_EQ(error_kind_of([&] { read_failure_curves(header); }), ErrorKind::Data);
}

TEST(ScenarioConfig, DefaultsAreValidAndInvariantsEnforced) {
  ScenarioConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.horizon_years, 20);
  EXPECT_EQ(c.realizations, 100);
  c.cost_failure = c.cost_upgrade;
  EXPECT_EQ(error_kind_of([&] { c.validate(); }), ErrorKind::Configuration);
  c = {};
  c.return_rate = 1.0;
  EXPECT_EQ(error_kind_of([&] { c.validate(); }), ErrorKind::Configuration);
  c = {};
  c.f_max = 0.0;
  EXPECT_EQ(error_kind_of([&] { c.validate(); }), ErrorKind::Configuration);
  c = {};
  c.horizon_years = 0;
  EXPECT_EQ(error_kind_of([&] { c.validate(); }), ErrorKind::Configuration);
}

TEST(ConfigFile, ParsesKeysCommentsAndPresets) {
  std::stringstream in(
      "# study\n"
      "scenario = high\n"
      "realizations = 12   # quick\n"
      "master_seed=99\n"
      "\n"
      "t50_ev = 2050\n"
      "capacity_scale = 1.5\n");
  const ScenarioConfig c = parse_config(in);
  EXPECT_EQ(c.t50_hp, 2035.0);
  EXPECT_EQ(c.t50_ev, 2050.0);
  EXPECT_EQ(c.realizations, 12);
  EXPECT_EQ(c.master_seed, 99u);
  EXPECT_EQ(c.capacity_scale, 1.5);
}

TEST(ConfigFile, RejectsUnknownKeysBadValuesAndDuplicates) {
  std::stringstream unknown("horizon = 5\n");
  EXPECT_EQ(error_kind_of([&] { parse_config(unknown); }), ErrorKind::Configuration);
  std::stringstream bad("realizations = many\n");
  EXPECT_EQ(error_kind_of([&] { parse_config(bad); }), ErrorKind::Configuration);
  std::stringstream dup("n_max = 3\nn_max = 4\n");
  EXPECT_EQ(error_kind_of([&] { parse_config(dup); }), ErrorKind::Configuration);
  std::stringstream noeq("n_max 3\n");
  EXPECT_EQ(error_kind_of([&] { parse_config(noeq); }), ErrorKind::Configuration);
  std::stringstream scenario("scenario = extreme\n");
  EXPECT_EQ(error_kind_of([&] { parse_config(scenario); }), ErrorKind::Configuration);
}

TEST(ConfigFile, PresetValues) {
  ScenarioConfig c;
  apply_scenario(c, "low");
  EXPECT_EQ(c.t50_hp, 2050.0);
  EXPECT_EQ(c.t50_ev, 2060.0);
  apply_scenario(c, "medium");
  EXPECT_EQ(c.t50_hp, 2040.0);
  EXPECT_EQ(c.t50_ev, 2045.0);
  apply_scenario(c, "high");
  EXPECT_EQ(c.t50_hp, 2035.0);
  EXPECT_EQ(c.t50_ev, 2035.0);
  EXPECT_EQ(error_kind_of([&] { apply_scenario(c, "none"); }), ErrorKind::Usage);
}
