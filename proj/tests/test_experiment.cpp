#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "skyway/error.hpp"
#include "skyway/experiment.hpp"

using namespace skyway;

namespace {

const std::string kHeader =
    "algorithm,node_count,failure_rate,avg_delivery_time_h,avg_computation_time_s,avg_distance_km,runs";

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

ExperimentConfig quick(std::vector<std::string> algos, std::vector<double> rates,
                       std::vector<std::size_t> nodes = {10}) {
  ExperimentConfig c;
  c.scenario.seed = 5;
  c.node_counts = std::move(nodes);
  c.failure_rates = std::move(rates);
  c.algorithms = std::move(algos);
  c.runs_per_point = 3;
  c.timing = TimingMode::off;
  return c;
}

}  // namespace

TEST(MetricsCsv, EmptyIsHeaderOnly) {
  EXPECT_EQ(format_metrics_csv({}), kHeader + "\n");
}

TEST(MetricsCsv, OneRecordTwoLines) {
  auto text = format_metrics_csv({{"lookahead", 20, 0.3, 1.25, 0.0015, 33.5, 2}});
  EXPECT_EQ(lines(text), 2u);
  EXPECT_EQ(text, kHeader + "\nlookahead,20,0.3,1.25,0.0015,33.5,2\n");
}

TEST(MetricsCsv, SortedAndRoundTrips) {
  std::vector<MetricsRecord> recs{{"replication", 12, 0.1, 2.0, 0.0, 30.0, 1},
                                  {"greedy", 12, 0.5, 1.234567891, 0.25, 31.0, 1},
                                  {"greedy", 10, 0.5, 1.0, 0.5, 29.0, 1},
                                  {"greedy", 10, 0.1, 1.5, 0.125, 28.0, 1}};
  auto text = format_metrics_csv(recs);
  auto back = parse_metrics_csv(text);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back[0].algorithm, "greedy");
  EXPECT_EQ(back[0].node_count, 10u);
  EXPECT_DOUBLE_EQ(back[0].failure_rate, 0.1);
  EXPECT_EQ(back[3].algorithm, "replication");
  EXPECT_NEAR(back[2].avg_delivery_time, 1.23457, 1e-12);  // six significant digits
  EXPECT_EQ(format_metrics_csv(back), text);

  auto path = std::filesystem::temp_directory_path() / "skyway_metrics.csv";
  export_metrics(recs, path);
  EXPECT_EQ(read_text(path), text);
  std::filesystem::remove(path);
  EXPECT_THROW(export_metrics(recs, "/nonexistent/dir/out.csv"), Error);
  EXPECT_THROW(parse_metrics_csv("nonsense\n"), Error);
}

TEST(Experiment, ZeroRateMatchesOfflinePlans) {
  auto cfg = quick({"lookahead"}, {0.0});
  auto result = run_experiment(cfg);
  ASSERT_TRUE(result.errors.empty());
  ASSERT_EQ(result.records.size(), 1u);
  const auto& rec = result.records[0];
  EXPECT_EQ(rec.runs, 3u);
  EXPECT_EQ(rec.avg_computation_time, 0.0);

  double time = 0.0, dist = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    ScenarioConfig sc = cfg.scenario;
    sc.node_count = 10;
    sc.seed = run_seed(cfg.scenario.seed, 10, r);
    auto s = generate_scenario(sc);
    auto ctx = make_context(s);
    auto plan = compose_lookahead(ctx, s.request);
    time += plan.arrival_time() - s.request.start_time;
    dist += plan.total_distance;
  }
  EXPECT_NEAR(rec.avg_delivery_time, time / 3, 1e-9);
  EXPECT_NEAR(rec.avg_distance, dist / 3, 1e-9);
}

TEST(Experiment, RepeatRunsGiveIdenticalCsv) {
  auto cfg = quick({"lookahead", "replication", "bruteforce"}, {0.0, 0.3});
  EXPECT_EQ(format_metrics_csv(run_experiment(cfg).records),
            format_metrics_csv(run_experiment(cfg).records));
}

TEST(Experiment, BruteForceCellAboveLimitIsAnnotated) {
  auto cfg = quick({"bruteforce", "lookahead"}, {0.1}, {10, 13});
  cfg.runs_per_point = 1;
  auto result = run_experiment(cfg);
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_EQ(result.errors[0].node_count, 13u);
  EXPECT_NE(result.errors[0].message.find("instance-too-large"), std::string::npos);
  EXPECT_EQ(result.records.size(), 3u);
}

TEST(Experiment, MetricsAreSane) {
  auto cfg = quick({"lookahead", "greedy"}, {0.0, 0.5});
  for (const auto& rec : run_experiment(cfg).records) {
    EXPECT_GT(rec.avg_distance, 20.0);
    EXPECT_GE(rec.avg_delivery_time, rec.avg_distance / 200.0);
    EXPECT_GE(rec.avg_computation_time, 0.0);
  }
}

TEST(ExperimentConfig, ParsesAndRejects) {
  auto c = experiment_from_json(R"({"seed": 3, "node_counts": [10], "failure_rates": [0.2],
                                    "algorithms": ["greedy"], "timing": "off",
                                    "scenario": {"wind": {"max_speed": 10}}})");
  EXPECT_EQ(c.scenario.seed, 3u);
  EXPECT_EQ(c.timing, TimingMode::off);
  EXPECT_DOUBLE_EQ(c.scenario.wind.max_speed, 10.0);

  auto code = [](const std::string& text) {
    try {
      experiment_from_json(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io_error;
  };
  EXPECT_EQ(code(R"({"node_counts": [10], "failure_rates": [0.7], "algorithms": ["greedy"]})"),
            Errc::config_invalid);
  EXPECT_EQ(code(R"({"node_counts": [10], "failure_rates": [0.2], "algorithms": ["teleport"]})"),
            Errc::config_invalid);
  EXPECT_EQ(code(R"({"node_counts": [10], "failure_rates": [0.2], "algorithms": ["greedy"], "timing": "cpu"})"),
            Errc::config_invalid);
  EXPECT_EQ(code(R"({"node_counts": [99], "failure_rates": [0.2], "algorithms": ["greedy"]})"),
            Errc::config_invalid);
  EXPECT_EQ(code("[1, 2"), Errc::config_invalid);
}

TEST(Strategies, KnownNames) {
  EXPECT_EQ(parse_strategy("lookahead")->recovery, RecoveryPolicy::adaptive_local);
  EXPECT_EQ(parse_strategy("bruteforce")->planner, Algorithm::bruteforce);
  EXPECT_EQ(parse_strategy("replication")->recovery, RecoveryPolicy::delay_replication);
  EXPECT_FALSE(parse_strategy("nope").has_value());
}
