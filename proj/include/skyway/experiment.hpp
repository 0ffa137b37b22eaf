#pragma once
// Experiment campaigns: seeded runs per (algorithm, node count, failure
// rate) cell, aggregated into plot-ready CSV.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skyway/planner.hpp"
#include "skyway/resilience.hpp"
#include "skyway/scenario.hpp"

namespace skyway {

enum class TimingMode { wall, off };

// An experiment algorithm is an offline planner paired with the recovery
// policy used when the plan fails at runtime.
struct Strategy {
  std::string name;
  Algorithm planner = Algorithm::lookahead;
  RecoveryPolicy recovery = RecoveryPolicy::adaptive_local;
};

/// lookahead, greedy, bruteforce or replication.
std::optional<Strategy> parse_strategy(std::string_view name);

struct ExperimentConfig {
  ScenarioConfig scenario;  // node_count and failure_rate are set per cell
  std::vector<std::size_t> node_counts{10};
  std::vector<double> failure_rates{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::string> algorithms{"lookahead", "greedy", "bruteforce"};
  int lookahead_depth = 1;
  std::size_t runs_per_point = 0;  // 0: 10 % of the node count
  std::size_t bruteforce_node_limit = 12;
  TimingMode timing = TimingMode::wall;
};

std::vector<std::string> check_experiment(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const std::string& text);
ExperimentConfig load_experiment(const std::filesystem::path& path);

struct MetricsRecord {
  std::string algorithm;
  std::size_t node_count = 0;
  double failure_rate = 0.0;
  double avg_delivery_time = 0.0;     // hours
  double avg_computation_time = 0.0;  // seconds
  double avg_distance = 0.0;          // km
  std::size_t runs = 0;
};

struct CellError {
  std::string algorithm;
  std::size_t node_count = 0;
  double failure_rate = 0.0;
  std::string message;
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<CellError> errors;
};

// One delivery: offline plan, then execution under the drawn perturbations.
struct RunOutcome {
  bool delivered = false;
  double delivery_time = 0.0;    // hours from the request start to arrival
  double plan_seconds = 0.0;
  double recompose_seconds = 0.0;
  double distance = 0.0;
  std::size_t failures = 0;
  std::size_t recompositions = 0;
  double max_episode_seconds = 0.0;
  CompositionPlan plan;
  ExecutionTrace trace;

  double computation_seconds() const { return plan_seconds + recompose_seconds; }
};

/// Seed of run `run` in cells with `node_count` nodes; shared by every
/// algorithm and failure rate so cells are paired.
std::uint64_t run_seed(std::uint64_t base, std::size_t node_count, std::size_t run);

PlanningContext make_context(const Scenario& scenario, PlannerConfig planner = {});

/// Executes `plan` under `scenario`'s perturbation model at `failure_rate`.
RunOutcome simulate_plan(const Scenario& scenario, const PlanningContext& ctx,
                         const CompositionPlan& plan, RecoveryPolicy recovery, double failure_rate);

RunOutcome run_once(const Scenario& scenario, const Strategy& strategy, double failure_rate,
                    PlannerConfig planner = {});

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string format_metrics_csv(std::vector<MetricsRecord> records);
std::vector<MetricsRecord> parse_metrics_csv(const std::string& text);
void export_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path);

}  // namespace skyway
