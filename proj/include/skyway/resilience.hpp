#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skyway/legs.hpp"
#include "skyway/model.hpp"
#include "skyway/planner.hpp"

namespace skyway {

struct FailureEvent {
  NodeId node = 0;
  std::size_t position = 0;  // index of `node` in the plan's node sequence
  double expected_arrival = 0.0;
  double actual_arrival = 0.0;
  double delta = 0.0;  // actual - expected
};

/// True iff the arrival deviates from the schedule by more than `tolerance` hours.
bool detect_failure(double expected, double actual, double tolerance);

struct CongestionView {
  std::vector<char> congested;  // per plan position
};

/// A position is congested when the plan queues for a pad there, or when
/// every pad is busy at the planned arrival according to `network`.
CongestionView congestion_view(const CompositionPlan& plan, const SkywayNetwork& network);

/// Projected arrival shift at each later position (cur + 1 ...) when the drone
/// reached position `cur` `delta` hours off schedule. Planned waits absorb the
/// shift; recharges do not.
std::vector<double> project_delays(const CompositionPlan& plan, std::size_t cur, double delta);

/// Adaptive lookahead horizon: min(hops to the first congested station,
/// 1 + number of following stations still delayed), clamped to
/// [1, remaining legs].
int failure_analysis(const CompositionPlan& plan, std::size_t cur,
                     std::span<const double> projected_delays, const CongestionView& congestion);

// The drone's situation when a recomposition is triggered.
struct RuntimeState {
  std::size_t position = 0;  // index in the plan's node sequence
  double time = 0.0;
  double battery = kFullBattery;
};

/// Local recomposition from the current station to the station `horizon`
/// positions ahead (one further when that station is congested, clamped to
/// the destination). Tries the lookahead planner
/// with depth = horizon, widening the window by one station each time the
/// local target is unreachable, and keeps the old sub-route when it finishes
/// no later. Throws Errc::unreachable_destination when every window fails.
CompositionPlan recompose(const CompositionPlan& plan, const RuntimeState& at, int horizon,
                          const PlanningContext& ctx);

/// Optimal re-plan from the current station to the destination.
CompositionPlan recompose_global_bruteforce(const CompositionPlan& plan, const RuntimeState& at,
                                            const PlanningContext& ctx);

/// Splices `fragment` over the plan from position `cur`; downstream stations
/// keep their order and recharge choices and are re-timed from the fragment's
/// arrival. When `bookings` is given, superseded recharges are released from
/// it and the new ones are booked. Throws Errc::splice_mismatch when the
/// fragment does not start at the current station or does not rejoin the plan.
CompositionPlan update_plan(const CompositionPlan& plan, const CompositionPlan& fragment,
                            std::size_t cur, const PlanningContext& ctx,
                            SkywayNetwork* bookings = nullptr);

/// Remaining plan re-timed from the current state without changing the route.
std::optional<CompositionPlan> replicate_delay(const CompositionPlan& plan, const RuntimeState& at,
                                               const PlanningContext& ctx);

// ---------------------------------------------------------------------------
// Runtime execution

struct PerturbationModel {
  double failure_rate = 0.3;        // fraction of stations that perturb arrivals
  double max_early = 10.0 / 60.0;   // hours
  double max_late = 30.0 / 60.0;    // hours
  double calendar_shift_intensity = 0.5;  // chance a perturbed station also gets a pad rush
  std::uint64_t seed = 1;
};

std::vector<std::string> check_perturbation(const PerturbationModel& model);

enum class RecoveryPolicy { adaptive_local, global_bruteforce, delay_replication, greedy_replan };

std::optional<RecoveryPolicy> parse_policy(std::string_view name);
std::string_view to_string(RecoveryPolicy policy);

struct ExecutionConfig {
  RecoveryPolicy policy = RecoveryPolicy::adaptive_local;
  double detection_tolerance = 1.0 / 60.0;
  double abort_factor = 3.0;     // give up after this multiple of the planned time
  double abort_slack = 24.0;     // plus this many hours
  std::size_t max_legs = 256;
};

struct Perturbation {
  NodeId node = 0;
  double arrival_delay = 0.0;       // hours added to every arrival at the node
  std::optional<Interval> pad_rush; // all pads taken over this window
};

/// Seeded perturbation draw for a network. For a fixed seed the perturbed
/// stations at a higher failure rate are a superset of those at a lower rate,
/// and each station's delay does not depend on the rate. `reference` (the
/// initial plan) anchors pad-rush windows near planned arrivals.
std::vector<Perturbation> draw_perturbations(const SkywayNetwork& network, NodeId source,
                                             const CompositionPlan& reference,
                                             const PerturbationModel& model);

struct ExecutedLeg {
  NodeId from = 0;
  NodeId to = 0;
  double depart_time = 0.0;
  double arrive_time = 0.0;
  double injected_delay = 0.0;
  double wait_duration = 0.0;
  double pad_wait = 0.0;
  double recharge_duration = 0.0;
  double recharge_begin = 0.0;
  double battery_on_arrival = 0.0;
};

struct RecompositionEpisode {
  NodeId trigger = 0;
  std::size_t position = 0;
  int horizon = 0;  // adaptive lookahead used (0 for global or replication)
  double compute_seconds = 0.0;
  bool fell_back = false;  // recomposition failed; delay replicated instead
};

struct ExecutionTrace {
  std::vector<ExecutedLeg> legs;
  std::vector<Perturbation> injected;
  std::vector<FailureEvent> failures;
  std::vector<RecompositionEpisode> episodes;
  CompositionPlan final_plan;  // plan as executed
  bool delivered = false;
  double start_time = 0.0;
  double delivery_time = 0.0;  // hours from start to arrival
  double distance = 0.0;
  double origin_wait = 0.0;
  double origin_recharge = 0.0;
  double origin_recharge_begin = 0.0;

  double recompose_seconds() const;
};

/// Runs `plan` against a runtime copy of `network` (background bookings
/// only), injecting `perturbations` and recovering with `config.policy`.
ExecutionTrace execute_resilient(const CompositionPlan& plan, const SkywayNetwork& network,
                                 const PlanningContext& ctx,
                                 std::span<const Perturbation> perturbations,
                                 const ExecutionConfig& config = {});

}  // namespace skyway
