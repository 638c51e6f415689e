// Library walk-through: build a synthetic feeder in memory, simulate the
// three growth presets, then schedule upgrades for the high-growth curves
// under several yearly upgrade limits.

#include <cstdio>
#include <cstdlib>

#include "xfrisk/xfrisk.hpp"

int main(int argc, char** argv) {
  using namespace xfrisk;
  const int realizations = argc > 1 ? std::atoi(argv[1]) : 20;

  FeederSpec spec;
  spec.transformers = 30;
  const FeederData feeder = to_feeder_data(make_synthetic_feeder(spec));

  FailureCurveSet high;
  for (const char* name : {"low", "medium", "high"}) {
    ScenarioConfig config;
    config.realizations = realizations;
    apply_scenario(config, name);
    const SimulationContext ctx(feeder, config);
    const auto results = run_realizations(ctx, static_cast<std::size_t>(realizations));
    const FailureCurveSet curves = aggregate_curves(results);
    int at_risk = 0;
    for (std::size_t x = 0; x < curves.size(); ++x) at_risk += curves.at(x, curves.horizon()) > 0.05 ? 1 : 0;
    std::printf("%-6s  transformers with F(20) > 5%%: %d of %zu, zero aging: %.2f\n", name, at_risk, curves.size(),
                zero_aging_fraction(curves, ctx.initial_age(), ctx.failure_params()));
    high = curves;
  }

  const CostModel costs = CostModel::uniform(high.size(), 5.0, 50.0, 0.02, high.horizon());
  for (int n_max : {1, 2, 5}) {
    const ScheduleResult r = solve_schedule(costs, high, n_max);
    double failures = 0.0;
    for (double e : expected_failures(high, r.schedule)) failures += e;
    std::printf("n_max %d: %zu upgrades, objective %.3f, expected failures %.3f\n", n_max, r.schedule.upgrades(),
                r.objective, failures);
  }
}
