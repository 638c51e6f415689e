#include <gtest/gtest.h>

#include <initializer_list>

#include "cli.hpp"
#include "helpers.hpp"

using namespace xfrisk;
using namespace testing_support;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"xfrisk"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : storage) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// One small feeder plus simulated curves, shared by the tests below.
struct Fixture {
  TempDir feeder, sim;
  Fixture() {
    auto g = run_cli({"genfeeder", "--output", feeder.path().string(), "--transformers", "30", "--seed", "3"});
    if (g.code != 0) throw std::runtime_error("genfeeder failed: " + g.err);
    auto s = run_cli({"simulate", "--input", feeder.path().string(), "--output", sim.path().string(),
                      "--realizations", "4", "--years", "6", "--scenario", "high", "--threads", "2"});
    if (s.code != 0) throw std::runtime_error("simulate failed: " + s.err);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Cli, SimulateIsDeterministic) {
  const auto& f = fixture();
  TempDir again;
  const auto r = run_cli({"simulate", "--input", f.feeder.path().string(), "--output", again.path().string(),
                          "--realizations", "4", "--years", "6", "--scenario", "high", "--threads", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(again / "failure_curves.csv"), read_file(f.sim / "failure_curves.csv"));
  EXPECT_EQ(read_file(again / "summary.json"), read_file(f.sim / "summary.json"));
  EXPECT_EQ(line_count(read_file(again / "failure_curves.csv")), 1u + 30u * 6u);
  const auto summary = nlohmann::json::parse(read_file(again / "summary.json"));
  EXPECT_EQ(summary["realization_count"], 4);
  EXPECT_EQ(summary["scenario"]["t50_hp"], 2035.0);
}

TEST(Cli, ConfigFileAndFlagsCompose) {
  const auto& f = fixture();
  TempDir out;
  write_file(out / "study.cfg", "scenario = low\nrealizations = 2\nhorizon_years = 3\n");
  const auto r = run_cli({"simulate", "--config", (out / "study.cfg").string(), "--input", f.feeder.path().string(),
                          "--output", out.path().string(), "--years", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  EXPECT_EQ(summary["scenario"]["horizon_years"], 2);
  EXPECT_EQ(summary["scenario"]["t50_ev"], 2060.0);
  EXPECT_EQ(summary["realization_count"], 2);
}

TEST(Cli, UsageAndDataErrorsMapToExitCodes) {
  const auto& f = fixture();
  TempDir out;
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"simulate", "--input", f.feeder.path().string(), "--output", out.path().string(), "--scenario",
                     "extreme"})
                .code,
            cli::kExitUsage);
  const auto missing = run_cli({"simulate", "--input", (out / "nowhere").string(), "--output", out.path().string()});
  EXPECT_EQ(missing.code, cli::kExitData);
  EXPECT_NE(missing.err.find("error"), std::string::npos);
  write_file(out / "bad.cfg", "realizations = lots\n");
  EXPECT_EQ(run_cli({"simulate", "--config", (out / "bad.cfg").string(), "--input", f.feeder.path().string(),
                     "--output", out.path().string()})
                .code,
            cli::kExitUsage);
}

TEST(Cli, ScheduleOnZeroCurves) {
  TempDir dir;
  write_file(dir / "curves.csv", "transformer_id,year,mean_F\nA,1,0\nA,2,0\nB,1,0\nB,2,0\n");
  const auto r = run_cli({"schedule", "--curves", (dir / "curves.csv").string(), "--output", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("objective 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("upgrades 0\n"), std::string::npos);
  EXPECT_EQ(read_file(dir / "schedule.csv"), "transformer_id,upgrade_year\n");
  EXPECT_EQ(read_file(dir / "expected_failures.csv"), "year,expected_count,planned_upgrades\n1,0,0\n2,0,0\n");
  EXPECT_EQ(run_cli({"schedule", "--curves", (dir / "curves.csv").string(), "--output", dir.path().string(),
                     "--nmax", "0"})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run_cli({"schedule", "--curves", (dir / "curves.csv").string(), "--output", dir.path().string(),
                     "--cost-failure", "1"})
                .code,
            cli::kExitUsage);
}

TEST(Cli, ReportTopKAndClamp) {
  const auto& f = fixture();
  TempDir dir;
  const std::string curves = (f.sim / "failure_curves.csv").string();
  ASSERT_EQ(run_cli({"schedule", "--curves", curves, "--output", dir.path().string(), "--nmax", "2"}).code, 0);
  const std::string schedule = (dir / "schedule.csv").string();
  auto r = run_cli({"report", "--curves", curves, "--schedule", schedule, "--output", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(read_file(dir / "top_risk_curves.csv")), 1u + 25u * 6u);
  EXPECT_EQ(line_count(read_file(dir / "failures_by_year.csv")), 1u + 6u);
  EXPECT_EQ(line_count(read_file(dir / "planned_upgrades.csv")), 1u + 6u);
  r = run_cli({"report", "--curves", curves, "--schedule", schedule, "--output", dir.path().string(), "--top-k",
               "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(read_file(dir / "top_risk_curves.csv")), 1u + 30u * 6u);

  // Ranks follow final-year risk, highest first.
  const auto top = read_file(dir / "top_risk_curves.csv");
  std::istringstream in(top);
  std::string line;
  std::getline(in, line);
  double prev = 2.0;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    const auto year_pos = line.rfind(',', last - 1);
    if (std::stoi(line.substr(year_pos + 1, last - year_pos - 1)) != 6) continue;
    const double v = std::stod(line.substr(last + 1));
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Cli, ReportRejectsUnknownTransformerAndHandlesEmptySchedule) {
  const auto& f = fixture();
  TempDir dir;
  const std::string curves = (f.sim / "failure_curves.csv").string();
  write_file(dir / "bad.csv", "transformer_id,upgrade_year\nT9999,1\n");
  EXPECT_EQ(run_cli({"report", "--curves", curves, "--schedule", (dir / "bad.csv").string(), "--output",
                     dir.path().string()})
                .code,
            cli::kExitData);
  write_file(dir / "empty.csv", "transformer_id,upgrade_year\n");
  ASSERT_EQ(run_cli({"report", "--curves", curves, "--schedule", (dir / "empty.csv").string(), "--output",
                     dir.path().string()})
                .code,
            0);
  std::istringstream in(read_file(dir / "failures_by_year.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_EQ(cells[1], cells[2]);
    EXPECT_EQ(cells[3], cells[4]);
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST(Cli, GenfeederRejectsBadSpec) {
  TempDir dir;
  EXPECT_EQ(run_cli({"genfeeder", "--output", dir.path().string(), "--min-meters", "5", "--max-meters", "2"}).code,
            cli::kExitUsage);
}
