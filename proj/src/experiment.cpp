#include "skyway/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "skyway/error.hpp"
#include "skyway/skyline.hpp"

namespace skyway {

using nlohmann::json;

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "lookahead") return Strategy{"lookahead", Algorithm::lookahead, RecoveryPolicy::adaptive_local};
  if (name == "greedy") return Strategy{"greedy", Algorithm::greedy, RecoveryPolicy::greedy_replan};
  if (name == "bruteforce") {
    return Strategy{"bruteforce", Algorithm::bruteforce, RecoveryPolicy::global_bruteforce};
  }
  if (name == "replication") {
    return Strategy{"replication", Algorithm::lookahead, RecoveryPolicy::delay_replication};
  }
  return std::nullopt;
}

std::vector<std::string> check_experiment(const ExperimentConfig& c) {
  std::vector<std::string> out;
  ScenarioConfig probe = c.scenario;
  for (std::size_t n : c.node_counts) {
    probe.node_count = n;
    for (const std::string& p : check_config(probe)) out.push_back(p);
  }
  if (c.node_counts.empty()) out.emplace_back("node_counts must not be empty");
  if (c.failure_rates.empty()) out.emplace_back("failure_rates must not be empty");
  for (double r : c.failure_rates) {
    if (!(r == 0.0 || (r >= 0.10 && r <= 0.50))) out.emplace_back("failure rates must be 0 or lie in [0.10, 0.50]");
  }
  if (c.algorithms.empty()) out.emplace_back("algorithms must not be empty");
  for (const std::string& a : c.algorithms) {
    if (!parse_strategy(a)) out.push_back("unknown algorithm " + a);
  }
  if (c.lookahead_depth < 0) out.emplace_back("lookahead_depth must be >= 0");
  if (c.bruteforce_node_limit == 0 || c.bruteforce_node_limit > kMaxSearchNodes) {
    out.emplace_back("bruteforce_node_limit must lie in [1, 64]");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ExperimentConfig experiment_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::config_invalid, std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    ScenarioConfig& s = c.scenario;
    s.seed = doc.value("seed", s.seed);
    const json sc = doc.value("scenario", json::object());
    s.pads_per_node = sc.value("pads_per_node", s.pads_per_node);
    s.drone_count = sc.value("drone_count", s.drone_count);
    s.request_count = sc.value("request_count", s.request_count);
    s.battery_rate = sc.value("battery_rate", s.battery_rate);
    s.area_km = sc.value("area_km", s.area_km);
    s.min_node_gap_km = sc.value("min_node_gap_km", s.min_node_gap_km);
    s.max_segment_km = sc.value("max_segment_km", s.max_segment_km);
    s.min_trip_fraction = sc.value("min_trip_fraction", s.min_trip_fraction);
    s.package_weight_min = sc.value("package_weight_min", s.package_weight_min);
    s.package_weight_max = sc.value("package_weight_max", s.package_weight_max);
    s.start_time_max = sc.value("start_time_max", s.start_time_max);
    s.hotspot_fraction = sc.value("hotspot_fraction", s.hotspot_fraction);
    s.hotspot_utilization = sc.value("hotspot_utilization", s.hotspot_utilization);
    s.base_utilization = sc.value("base_utilization", s.base_utilization);
    s.booking_min_h = sc.value("booking_min_h", s.booking_min_h);
    s.booking_max_h = sc.value("booking_max_h", s.booking_max_h);
    s.calendar_shift_intensity = sc.value("calendar_shift_intensity", s.calendar_shift_intensity);
    const json wind = sc.value("wind", json::object());
    s.wind.epochs = wind.value("epochs", s.wind.epochs);
    s.wind.epoch_hours = wind.value("epoch_hours", s.wind.epoch_hours);
    s.wind.max_speed = wind.value("max_speed", s.wind.max_speed);
    s.wind.bearing_drift = wind.value("bearing_drift", s.wind.bearing_drift);

    c.node_counts = doc.value("node_counts", c.node_counts);
    c.failure_rates = doc.value("failure_rates", c.failure_rates);
    c.algorithms = doc.value("algorithms", c.algorithms);
    c.lookahead_depth = doc.value("lookahead_depth", c.lookahead_depth);
    c.runs_per_point = doc.value("runs_per_point", c.runs_per_point);
    c.bruteforce_node_limit = doc.value("bruteforce_node_limit", c.bruteforce_node_limit);
    std::string timing = doc.value("timing", std::string("wall"));
    if (timing == "wall") {
      c.timing = TimingMode::wall;
    } else if (timing == "off") {
      c.timing = TimingMode::off;
    } else {
      throw Error(Errc::config_invalid, "timing must be \"wall\" or \"off\"");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::config_invalid, std::string("bad field: ") + e.what());
  }
  if (auto problems = check_experiment(c); !problems.empty()) {
    throw Error(Errc::config_invalid, problems.front());
  }
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return experiment_from_json(read_text(path));
}

std::uint64_t run_seed(std::uint64_t base, std::size_t node_count, std::size_t run) {
  return mix_seed(base ^ mix_seed((static_cast<std::uint64_t>(node_count) << 32) | run));
}

PlanningContext make_context(const Scenario& scenario, PlannerConfig planner) {
  DroneSpec drone = select_drone(scenario.drones, scenario.request.package_weight);
  return PlanningContext(scenario.network, drone, scenario.wind, scenario.request.package_weight,
                         scenario.energy, planner);
}

RunOutcome simulate_plan(const Scenario& scenario, const PlanningContext& ctx,
                         const CompositionPlan& plan, RecoveryPolicy recovery, double failure_rate) {
  RunOutcome out;
  out.plan = plan;
  PerturbationModel model = scenario.perturbation;
  model.failure_rate = failure_rate;
  auto perturbations = draw_perturbations(scenario.network, scenario.request.source, plan, model);
  ExecutionConfig exec;
  exec.policy = recovery;
  out.trace = execute_resilient(plan, scenario.network, ctx, perturbations, exec);
  out.delivered = out.trace.delivered;
  out.delivery_time = out.trace.legs.empty()
                          ? 0.0
                          : out.trace.legs.back().arrive_time - scenario.request.start_time;
  out.distance = out.trace.distance;
  out.failures = out.trace.failures.size();
  out.recompositions = out.trace.episodes.size();
  out.recompose_seconds = out.trace.recompose_seconds();
  for (const auto& e : out.trace.episodes) out.max_episode_seconds = std::max(out.max_episode_seconds, e.compute_seconds);
  return out;
}

RunOutcome run_once(const Scenario& scenario, const Strategy& strategy, double failure_rate,
                    PlannerConfig planner) {
  PlanningContext ctx = make_context(scenario, planner);
  const auto started = std::chrono::steady_clock::now();
  CompositionPlan plan = compose(strategy.planner, ctx, make_problem(scenario.request),
                                 LookaheadDepth(planner.lookahead_depth));
  double plan_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  RunOutcome out = simulate_plan(scenario, ctx, plan, strategy.recovery, failure_rate);
  out.plan_seconds = plan_seconds;
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (auto problems = check_experiment(config); !problems.empty()) {
    throw Error(Errc::config_invalid, problems.front());
  }
  ExperimentResult result;
  PlannerConfig planner;
  planner.lookahead_depth = config.lookahead_depth;
  planner.bruteforce_node_limit = config.bruteforce_node_limit;

  for (std::size_t n : config.node_counts) {
    ScenarioConfig sc = config.scenario;
    sc.node_count = n;
    const std::size_t runs = config.runs_per_point > 0 ? config.runs_per_point : sc.runs_per_point();
    std::vector<Scenario> scenarios;
    for (std::size_t r = 0; r < runs; ++r) {
      ScenarioConfig one = sc;
      one.seed = run_seed(config.scenario.seed, n, r);
      scenarios.push_back(generate_scenario(one));
    }
    for (const std::string& name : config.algorithms) {
      const Strategy strategy = *parse_strategy(name);
      for (double rate : config.failure_rates) {
        if (strategy.planner == Algorithm::bruteforce && n > config.bruteforce_node_limit) {
          result.errors.push_back(CellError{name, n, rate,
                                            std::string(to_string(Errc::instance_too_large)) +
                                                ": node count above the brute-force limit"});
          continue;
        }
        MetricsRecord rec{name, n, rate, 0.0, 0.0, 0.0, 0};
        std::string cell_error;
        for (const Scenario& s : scenarios) {
          try {
            RunOutcome o = run_once(s, strategy, rate, planner);
            if (!o.delivered) continue;
            rec.avg_delivery_time += o.delivery_time;
            rec.avg_distance += o.distance;
            if (config.timing == TimingMode::wall) rec.avg_computation_time += o.computation_seconds();
            ++rec.runs;
          } catch (const Error& e) {
            if (cell_error.empty()) cell_error = e.what();
          }
        }
        if (!cell_error.empty()) result.errors.push_back(CellError{name, n, rate, cell_error});
        if (rec.runs > 0) {
          const auto k = static_cast<double>(rec.runs);
          rec.avg_delivery_time /= k;
          rec.avg_distance /= k;
          rec.avg_computation_time /= k;
        }
        result.records.push_back(rec);
      }
    }
  }
  return result;
}

namespace {

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr const char* kHeader =
    "algorithm,node_count,failure_rate,avg_delivery_time_h,avg_computation_time_s,avg_distance_km,runs";

}  // namespace

std::string format_metrics_csv(std::vector<MetricsRecord> records) {
  std::sort(records.begin(), records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
    return std::tie(a.algorithm, a.node_count, a.failure_rate) <
           std::tie(b.algorithm, b.node_count, b.failure_rate);
  });
  std::string out = std::string(kHeader) + "\n";
  for (const MetricsRecord& r : records) {
    out += r.algorithm + "," + std::to_string(r.node_count) + "," + g6(r.failure_rate) + "," +
           g6(r.avg_delivery_time) + "," + g6(r.avg_computation_time) + "," + g6(r.avg_distance) +
           "," + std::to_string(r.runs) + "\n";
  }
  return out;
}

std::vector<MetricsRecord> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw Error(Errc::io_error, "unexpected CSV header");
  std::vector<MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw Error(Errc::io_error, "CSV row needs 7 fields: " + line);
    try {
      out.push_back(MetricsRecord{f[0], std::stoul(f[1]), std::stod(f[2]), std::stod(f[3]),
                                  std::stod(f[4]), std::stod(f[5]), std::stoul(f[6])});
    } catch (const std::exception&) {
      throw Error(Errc::io_error, "bad number in CSV row: " + line);
    }
  }
  return out;
}

void export_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path) {
  write_text(path, format_metrics_csv(records));
}

}  // namespace skyway
