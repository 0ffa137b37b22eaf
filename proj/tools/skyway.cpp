// skyway: command-line front end for planning, simulation and experiments.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "skyway/error.hpp"
#include "skyway/experiment.hpp"
#include "skyway/kernels.hpp"
#include "skyway/planner.hpp"
#include "skyway/resilience.hpp"
#include "skyway/scenario.hpp"
#include "skyway/skyline.hpp"

namespace {

using namespace skyway;

constexpr int kExitConfigInvalid = 2;
constexpr int kExitTooLarge = 3;

int exit_code(Errc code) {
  switch (code) {
    case Errc::config_invalid:
    case Errc::invalid_argument: return kExitConfigInvalid;
    case Errc::instance_too_large: return kExitTooLarge;
    default: return 1;
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SKYWAY_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    return std::stoull(raw);
  } catch (const std::exception&) {
    throw Error(Errc::config_invalid, "SKYWAY_SEED is not an unsigned integer");
  }
}

void print_plan(const CompositionPlan& plan, const SkywayNetwork& network) {
  std::printf("drone %u  start %.4f h  battery %.1f %%\n", plan.drone, plan.start_time, plan.start_battery);
  if (plan.origin_wait > 0.0 || plan.origin_recharge > 0.0) {
    std::printf("  at %u: wait %.4f h, recharge %.4f h\n", plan.origin(), plan.origin_wait, plan.origin_recharge);
  }
  for (const PlanLeg& leg : plan.legs) {
    std::printf("  %u -> %u  depart %.4f  arrive %.4f  battery %.1f %%", leg.from, leg.to, leg.depart_time,
                leg.arrive_time, leg.battery_on_arrival);
    if (leg.wait_duration > 0.0) std::printf("  wait %.4f", leg.wait_duration);
    if (leg.recharge_duration > 0.0) std::printf("  recharge %.4f", leg.recharge_duration);
    std::printf("\n");
  }
  std::printf("arrival %.4f h  delivery time %.4f h  distance %.3f km  recharges %zu\n", plan.arrival_time(),
              plan.total_delivery_time, plan.total_distance, plan.recharge_count());
  (void)network;
}

int cmd_skyline(const std::string& catalog_path, double weight) {
  auto drones = load_catalog(catalog_path);
  if (weight > 0.0) drones = payload_filter(drones, weight);
  SkylineResult result = bnl_skyline(drones);
  for (const DroneSpec& d : drones) {
    bool in = result.skyline.count(d.id) > 0;
    std::printf("%-12s %s", d.name.c_str(), in ? "skyline" : "dominated");
    if (!in) std::printf(" by id %u", result.dominated.at(d.id));
    std::printf("\n");
  }
  return 0;
}

int cmd_plan(const std::string& path, const std::string& algo_name, int depth, std::size_t node_limit) {
  Scenario s = load_scenario(path);
  auto algo = parse_algorithm(algo_name);
  if (!algo) throw Error(Errc::config_invalid, "unknown algorithm " + algo_name);
  PlannerConfig pc;
  pc.lookahead_depth = depth;
  pc.bruteforce_node_limit = node_limit;
  PlanningContext ctx = make_context(s, pc);
  CompositionPlan plan = compose(*algo, ctx, make_problem(s.request), LookaheadDepth(depth));
  print_plan(plan, s.network);
  return 0;
}

int cmd_simulate(const std::string& path, double rate, std::uint64_t seed, const std::string& algo_name) {
  Scenario s = load_scenario(path);
  s.perturbation.seed = seed;
  auto strategy = parse_strategy(algo_name);
  if (!strategy) throw Error(Errc::config_invalid, "unknown algorithm " + algo_name);
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error(Errc::config_invalid, "failure rate must lie in [0, 1]");
  RunOutcome o = run_once(s, *strategy, rate);
  std::printf("planned:\n");
  print_plan(o.plan, s.network);
  std::printf("executed (%s, failure rate %.2f, seed %llu):\n", strategy->name.c_str(), rate,
              static_cast<unsigned long long>(seed));
  print_plan(o.trace.final_plan, s.network);
  for (const FailureEvent& f : o.trace.failures) {
    std::printf("  failure at node %u: expected %.4f actual %.4f (%+.1f min)\n", f.node, f.expected_arrival,
                f.actual_arrival, f.delta * 60.0);
  }
  std::printf("delivered %s  delivery time %.4f h  distance %.3f km  recompositions %zu\n",
              o.delivered ? "yes" : "no", o.delivery_time, o.distance, o.recompositions);
  return o.delivered ? 0 : 1;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  ExperimentConfig config = load_experiment(config_path);
  if (seed) config.scenario.seed = *seed;
  ExperimentResult result = run_experiment(config);
  for (const CellError& e : result.errors) {
    std::fprintf(stderr, "cell %s/%zu/%.2f: %s\n", e.algorithm.c_str(), e.node_count, e.failure_rate,
                 e.message.c_str());
  }
  export_metrics(result.records, out_path);
  return 0;
}

int cmd_generate(std::size_t nodes, std::uint64_t seed, double rate, const std::string& out_path) {
  ScenarioConfig c;
  c.node_count = nodes;
  c.seed = seed;
  c.failure_rate = rate;
  save_scenario(generate_scenario(c), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind- and congestion-aware drone delivery planner"};
  app.require_subcommand(1);

  std::string catalog;
  double weight = 0.0;
  auto* sky = app.add_subcommand("skyline", "Skyline of a drone catalog");
  sky->add_option("--catalog", catalog, "Catalog JSON file")->required();
  sky->add_option("--weight", weight, "Drop drones that cannot lift this package (kg)");

  std::string scenario, algo = "lookahead";
  int depth = 1;
  std::size_t node_limit = 12;
  auto* plan = app.add_subcommand("plan", "Compose an offline delivery plan");
  plan->add_option("--scenario", scenario, "Scenario JSON file")->required();
  plan->add_option("--algo", algo, "lookahead | greedy | bruteforce")->check(CLI::IsMember({"lookahead", "greedy", "bruteforce"}));
  plan->add_option("--depth", depth, "Lookahead depth")->check(CLI::NonNegativeNumber);
  plan->add_option("--node-limit", node_limit, "Brute-force node limit");

  double rate = 0.3;
  std::optional<std::uint64_t> seed;
  std::string strategy = "lookahead";
  auto* sim = app.add_subcommand("simulate", "Execute a plan under injected failures");
  sim->add_option("--scenario", scenario, "Scenario JSON file")->required();
  sim->add_option("--failure-rate", rate, "Fraction of stations perturbed");
  sim->add_option("--seed", seed, "Perturbation seed");
  sim->add_option("--algo", strategy, "lookahead | greedy | bruteforce | replication");

  std::string config, out;
  auto* exp = app.add_subcommand("experiment", "Run an experiment campaign");
  exp->add_option("--config", config, "Experiment JSON file")->required();
  exp->add_option("--out", out, "Output CSV")->required();
  exp->add_option("--seed", seed, "Base seed (overrides the config)");

  std::size_t nodes = 20;
  auto* gen = app.add_subcommand("generate", "Write a random scenario");
  gen->add_option("--nodes", nodes, "Node count");
  gen->add_option("--seed", seed, "Scenario seed");
  gen->add_option("--failure-rate", rate, "Perturbation failure rate");
  gen->add_option("--out", out, "Output JSON")->required();

  auto* isa = app.add_subcommand("isa", "Report the selected kernel variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigInvalid;
  }

  try {
    if (!seed) seed = env_seed();
    if (*sky) return cmd_skyline(catalog, weight);
    if (*plan) return cmd_plan(scenario, algo, depth, node_limit);
    if (*sim) return cmd_simulate(scenario, rate, seed.value_or(1), strategy);
    if (*exp) return cmd_experiment(config, out, seed);
    if (*gen) return cmd_generate(nodes, seed.value_or(1), rate, out);
    if (*isa) {
      std::printf("%s\n", std::string(kernels::to_string(kernels::active_isa())).c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "skyway: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "skyway: %s\n", e.what());
    return 1;
  }
  return 0;
}
