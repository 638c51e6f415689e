#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xfrisk/xfrisk.hpp"

namespace xfrisk::cli {
namespace {

namespace fs = std::filesystem;

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
  }
}

FailureCurveSet load_curves(const std::string& path) {
  auto in = csv::open_input(path);
  return read_failure_curves(in, path);
}

struct SimulateArgs {
  std::string config;
  std::string input;
  std::string output;
  std::optional<int> realizations;
  std::optional<std::uint64_t> seed;
  std::optional<int> years;
  std::optional<std::string> scenario;
  std::optional<double> capacity_scale;
  unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ScenarioConfig cfg = a.config.empty() ? ScenarioConfig{} : load_config(a.config);
  if (a.scenario) apply_scenario(cfg, *a.scenario);
  if (a.realizations) cfg.realizations = *a.realizations;
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.years) cfg.horizon_years = *a.years;
  if (a.capacity_scale) cfg.capacity_scale = *a.capacity_scale;
  cfg.validate();

  const FeederData feeder = load_feeder(a.input);
  const SimulationContext ctx(feeder, cfg);
  const auto results = run_realizations(ctx, static_cast<std::size_t>(cfg.realizations), a.threads);
  const FailureCurveSet curves = aggregate_curves(results);
  curves.validate();

  const fs::path dir(a.output);
  ensure_directory(dir);
  {
    auto f = csv::open_output((dir / "failure_curves.csv").string());
    write_failure_curves(curves, f);
    if (!f) fail(ErrorKind::Io, "failed writing failure_curves.csv");
  }
  {
    auto f = csv::open_output((dir / "summary.json").string());
    f << simulation_summary(ctx, results, curves).dump(2) << '\n';
    if (!f) fail(ErrorKind::Io, "failed writing summary.json");
  }
  out << "simulated " << results.size() << " realizations x " << cfg.horizon_years << " years for "
      << curves.size() << " transformers\n";
  return kExitOk;
}

struct ScheduleArgs {
  std::string curves;
  std::string output;
  double cost_upgrade = 5.0;
  double cost_failure = 50.0;
  double return_rate = 0.02;
  int n_max = 10;
};

int cmd_schedule(const ScheduleArgs& a, std::ostream& out) {
  if (a.n_max <= 0) fail(ErrorKind::Configuration, "--nmax must be a positive integer");
  const FailureCurveSet curves = load_curves(a.curves);
  const CostModel model = CostModel::uniform(curves.size(), a.cost_upgrade, a.cost_failure, a.return_rate,
                                             curves.horizon());
  const ScheduleResult result = solve_schedule(model, curves, a.n_max);
  const fs::path dir(a.output);
  ensure_directory(dir);
  {
    auto f = csv::open_output((dir / "schedule.csv").string());
    write_schedule(curves, result.schedule, f);
    if (!f) fail(ErrorKind::Io, "failed writing schedule.csv");
  }
  {
    auto f = csv::open_output((dir / "expected_failures.csv").string());
    write_expected_failures(expected_failures(curves, result.schedule),
                            result.schedule.upgrades_per_year(curves.horizon()), f);
    if (!f) fail(ErrorKind::Io, "failed writing expected_failures.csv");
  }
  out << "objective " << csv::format_double(result.objective) << '\n';
  out << "upgrades " << result.schedule.upgrades() << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::string curves;
  std::string schedule;
  std::string output;
  std::size_t top_k = 25;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const FailureCurveSet curves = load_curves(a.curves);
  Schedule schedule;
  {
    auto in = csv::open_input(a.schedule);
    schedule = read_schedule(in, curves, a.schedule);
  }
  const int T = curves.horizon();
  const fs::path dir(a.output);
  ensure_directory(dir);

  std::vector<std::size_t> order(curves.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return curves.at(l, T) > curves.at(r, T); });
  const std::size_t k = std::min(a.top_k, order.size());
  {
    auto f = csv::open_output((dir / "top_risk_curves.csv").string());
    f << "rank,transformer_id,year,mean_F\n";
    for (std::size_t i = 0; i < k; ++i) {
      for (int t = 1; t <= T; ++t) {
        f << (i + 1) << ',' << curves.id(order[i]) << ',' << t << ',' << csv::format_double(curves.at(order[i], t))
          << '\n';
      }
    }
    if (!f) fail(ErrorKind::Io, "failed writing top_risk_curves.csv");
  }

  Schedule none;
  none.upgrade_year.assign(curves.size(), 0);
  none.n_max = 1;
  const auto baseline = expected_failures(curves, none);
  const auto planned = expected_failures(curves, schedule);
  {
    auto f = csv::open_output((dir / "failures_by_year.csv").string());
    f << "year,baseline_expected,scheduled_expected,baseline_cumulative,scheduled_cumulative\n";
    double cb = 0.0;
    double cs = 0.0;
    for (int t = 1; t <= T; ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      cb += baseline[i];
      cs += planned[i];
      f << t << ',' << csv::format_double(baseline[i]) << ',' << csv::format_double(planned[i]) << ','
        << csv::format_double(cb) << ',' << csv::format_double(cs) << '\n';
    }
    if (!f) fail(ErrorKind::Io, "failed writing failures_by_year.csv");
  }
  {
    auto f = csv::open_output((dir / "planned_upgrades.csv").string());
    f << "year,planned_upgrades\n";
    const auto per_year = schedule.upgrades_per_year(T);
    for (int t = 1; t <= T; ++t) f << t << ',' << per_year[static_cast<std::size_t>(t - 1)] << '\n';
    if (!f) fail(ErrorKind::Io, "failed writing planned_upgrades.csv");
  }
  out << "report: top " << k << " of " << curves.size() << " transformers, " << schedule.upgrades()
      << " planned upgrades\n";
  return kExitOk;
}

struct GenfeederArgs {
  std::string output;
  FeederSpec spec;
};

int cmd_genfeeder(const GenfeederArgs& a, std::ostream& out) {
  const SyntheticFeeder s = generate_feeder(a.spec, a.output);
  out << "wrote feeder with " << s.topology.transformers.size() << " transformers and "
      << s.topology.meter_to_transformer.size() << " meters to " << a.output << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformer failure-risk simulation and upgrade scheduling"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo failure curves for every transformer");
  simulate->add_option("--config", sim.config, "scenario config file (key = value)")->check(CLI::ExistingFile);
  simulate->add_option("--input", sim.input, "feeder input directory")->required();
  simulate->add_option("--output", sim.output, "output directory")->required();
  simulate->add_option("--realizations", sim.realizations, "number of Monte Carlo realizations");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--years", sim.years, "simulation horizon in years");
  simulate->add_option("--scenario", sim.scenario, "growth preset")->check(CLI::IsMember({"low", "medium", "high"}));
  simulate->add_option("--capacity-scale", sim.capacity_scale, "multiplier on every transformer rating");
  simulate->add_option("--threads", sim.threads, "worker threads (0 = all cores)");

  ScheduleArgs sch;
  auto* schedule = app.add_subcommand("schedule", "Cost-minimal upgrade schedule from failure curves");
  schedule->add_option("--curves", sch.curves, "failure_curves.csv")->required();
  schedule->add_option("--output", sch.output, "output directory")->required();
  schedule->add_option("--cost-upgrade", sch.cost_upgrade, "upgrade cost")->capture_default_str();
  schedule->add_option("--cost-failure", sch.cost_failure, "failure cost")->capture_default_str();
  schedule->add_option("--return-rate", sch.return_rate, "annual return rate")->capture_default_str();
  schedule->add_option("--nmax", sch.n_max, "maximum upgrades per year")->capture_default_str();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Plot-ready CSVs from curves and a schedule");
  report->add_option("--curves", rep.curves, "failure_curves.csv")->required();
  report->add_option("--schedule", rep.schedule, "schedule.csv")->required();
  report->add_option("--output", rep.output, "output directory")->required();
  report->add_option("--top-k", rep.top_k, "number of highest-risk transformers")->capture_default_str();

  GenfeederArgs gen;
  auto* genfeeder = app.add_subcommand("genfeeder", "Write a synthetic feeder in the input formats");
  genfeeder->add_option("--output", gen.output, "output directory")->required();
  genfeeder->add_option("--transformers", gen.spec.transformers, "number of transformers")->capture_default_str();
  genfeeder->add_option("--min-meters", gen.spec.min_meters, "fewest meters per transformer")->capture_default_str();
  genfeeder->add_option("--max-meters", gen.spec.max_meters, "most meters per transformer")->capture_default_str();
  genfeeder->add_option("--year", gen.spec.base_year, "calendar year of the data")->capture_default_str();
  genfeeder->add_option("--seed", gen.spec.seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*schedule) return cmd_schedule(sch, out);
    if (*report) return cmd_report(rep, out);
    if (*genfeeder) return cmd_genfeeder(gen, out);
    err << "error: no command\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace xfrisk::cli
