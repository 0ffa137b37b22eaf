#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "oracle.hpp"
#include "skyway/experiment.hpp"
#include "skyway/legs.hpp"
#include "skyway/model.hpp"
#include "skyway/planner.hpp"
#include "skyway/scenario.hpp"

namespace skyway::fixtures {

inline DroneSpec drone(double speed = 60.0, double recharge = 1.0) {
  return DroneSpec{1, "test", 2.0, 60.0, 60.0, speed, recharge};
}

inline SkywayNetwork network(std::initializer_list<Point> points,
                             std::initializer_list<std::pair<NodeId, NodeId>> segments,
                             std::size_t pads = 1) {
  SkywayNetwork net;
  for (Point p : points) net.add_node(p, pads);
  for (auto [a, b] : segments) net.add_segment(a, b);
  return net;
}

inline WindField steady(double speed, double from) {
  return WindField({WindEpoch{0.0, WindSample{speed, from}}});
}

inline DeliveryRequest request(NodeId src, NodeId dst, double weight = 1.0, double start = 0.0) {
  return DeliveryRequest{src, dst, weight, start};
}

inline oracle::Instance instance(const PlanningContext& ctx, const DeliveryRequest& r) {
  return oracle::Instance{&ctx.network(), ctx.wind(), ctx.drone().speed,
                          ctx.drone().recharge_time_full, r.package_weight, ctx.energy(),
                          r.source, r.destination, r.start_time};
}

// Node sequence and per-leg recharge flags, in the oracle's terms.
inline oracle::Outcome outcome_of(const CompositionPlan& plan) {
  oracle::Outcome o;
  o.arrival = plan.arrival_time();
  o.distance = plan.total_distance;
  o.nodes = plan.nodes();
  auto flags = recharge_flags(plan);
  o.recharges.assign(flags.begin(), flags.end() - 1);
  return o;
}

inline Scenario small_scenario(std::size_t nodes, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.node_count = nodes;
  cfg.seed = seed;
  return generate_scenario(cfg);
}

}  // namespace skyway::fixtures
