#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "skyway/legs.hpp"
#include "skyway/model.hpp"

namespace skyway {

// Search-tree node: a station and the time the drone is ready there, plus the
// battery and distance carried along the branch.
struct State {
  NodeId node = 0;
  double timestamp = 0.0;
  double battery = kFullBattery;
  double accumulated_distance = 0.0;
  std::uint64_t visited = 0;  // stations already on this branch
};

enum class ActionKind { travel, recharge };

struct Child {
  ActionKind action = ActionKind::travel;
  State state;
  std::optional<TravelStep> travel;
  std::optional<RechargeStep> recharge;
};

/// Lookahead levels beyond the immediate children; 0 is the greedy policy.
class LookaheadDepth {
public:
  constexpr LookaheadDepth() = default;
  explicit LookaheadDepth(int levels);
  constexpr int value() const noexcept { return levels_; }

private:
  int levels_ = 1;
};

// A routing problem over the network: the full delivery, or the residual
// part of one when re-planning mid-flight.
struct RouteProblem {
  NodeId source = 0;
  NodeId destination = 0;
  double start_time = 0.0;
  double start_battery = kFullBattery;
  std::uint64_t forbidden = 0;  // stations the route must not enter
  // Charge the drone should still hold on arrival. Lookahead and brute force
  // value a weaker arrival at the time a full recharge there would end.
  double arrival_battery = 0.0;
};

RouteProblem make_problem(const DeliveryRequest& request);

inline constexpr std::size_t kMaxSearchNodes = 64;

inline std::uint64_t node_bit(NodeId id) { return std::uint64_t{1} << id; }

/// Travel children for every unvisited, flyable neighbour plus a recharge
/// child when the battery is not full. Throws Errc::dead_end when empty.
std::vector<Child> expand(const PlanningContext& ctx, const State& state, std::uint64_t forbidden = 0);

/// Ready time plus the straight-line remainder at air speed; lower is better.
double score_state(const PlanningContext& ctx, const State& state, NodeId destination);

CompositionPlan compose_lookahead(const PlanningContext& ctx, const RouteProblem& problem,
                                  LookaheadDepth depth);
CompositionPlan compose_lookahead(const PlanningContext& ctx, const DeliveryRequest& request,
                                  LookaheadDepth depth = LookaheadDepth{});

CompositionPlan compose_greedy(const PlanningContext& ctx, const RouteProblem& problem);
CompositionPlan compose_greedy(const PlanningContext& ctx, const DeliveryRequest& request);

CompositionPlan compose_bruteforce(const PlanningContext& ctx, const RouteProblem& problem);
CompositionPlan compose_bruteforce(const PlanningContext& ctx, const DeliveryRequest& request);

enum class Algorithm { lookahead, greedy, bruteforce };

std::optional<Algorithm> parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algo);

CompositionPlan compose(Algorithm algo, const PlanningContext& ctx, const RouteProblem& problem,
                        LookaheadDepth depth = LookaheadDepth{});

}  // namespace skyway
