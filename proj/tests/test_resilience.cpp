#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "skyway/error.hpp"
#include "skyway/resilience.hpp"

using namespace skyway;
namespace fx = skyway::fixtures;

namespace {

// Six stations in a line 0-1-2-3-5 (destination 5) with a dog-leg 1-4-3
// around station 2. The planned route recharges at 2.
struct Detour {
  SkywayNetwork net = fx::network({{0, 0}, {0, 10}, {0, 30}, {0, 50}, {std::sqrt(41.0), 30}, {0, 60}},
                                  {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {1, 4}, {4, 3}});
  PlanningContext ctx() const { return PlanningContext(net, fx::drone(), WindField(), 1.0); }
  CompositionPlan plan() const { return compose_bruteforce(ctx(), fx::request(0, 5)); }
  // Station 2 fully booked for three hours.
  SkywayNetwork rushed() const {
    SkywayNetwork copy = net;
    copy.calendar(2).reserve_on(0, 0.0, 3.0);
    return copy;
  }
};

// Five legs along a line, 0.2 h each, no stays.
CompositionPlan straight_plan(const SkywayNetwork& net) {
  CompositionPlan plan;
  for (NodeId k = 0; k < 5; ++k) {
    plan.legs.push_back(PlanLeg{k, static_cast<NodeId>(k + 1), 0.2 * k, 0.2 * (k + 1), 0, 0, 0, 0, 90});
  }
  finalize_totals(plan, net);
  return plan;
}

SkywayNetwork line6() {
  return fx::network({{0, 0}, {0, 5}, {0, 10}, {0, 15}, {0, 20}, {0, 25}},
                     {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
}

}  // namespace

TEST(DetectFailure, ToleranceBand) {
  const double eps = 1.0 / 60.0;
  EXPECT_FALSE(detect_failure(4.0, 4.0, eps));
  EXPECT_TRUE(detect_failure(4.0, 4.25, eps));
  EXPECT_TRUE(detect_failure(4.0, 3.5, eps));
  EXPECT_FALSE(detect_failure(4.0, 4.0 + 0.5 * eps, eps));
  EXPECT_THROW(detect_failure(4.0, 4.0, -1.0), Error);
}

TEST(FailureAnalysis, AbsorbedDelayGivesOne) {
  auto net = line6();
  CompositionPlan plan = straight_plan(net);
  std::vector<double> projected{-0.1, -0.1, -0.1, -0.1, -0.1};
  CongestionView none{std::vector<char>(6, 0)};
  EXPECT_EQ(failure_analysis(plan, 0, projected, none), 1);

  // The same through the projection: a 30-minute stay after the failure.
  plan.origin_wait = 0.5;
  plan.legs[0].depart_time = 0.5;
  auto p = project_delays(plan, 0, 0.25);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_LT(p[0], 0.0);
  EXPECT_EQ(failure_analysis(plan, 0, p, congestion_view(plan, net)), 1);
}

TEST(FailureAnalysis, CongestionTwoHopsAheadGivesTwo) {
  auto net = line6();
  CompositionPlan plan = straight_plan(net);
  std::vector<double> projected{0.2, 0.2, 0.2, 0.2, -0.1};  // reaches four stations
  CongestionView view{{0, 0, 1, 0, 0, 0}};
  EXPECT_EQ(failure_analysis(plan, 0, projected, view), 2);

  // Congestion seen through the calendars: station 2 fully booked on arrival.
  net.calendar(2).reserve_on(0, 0.3, 0.5);
  auto seen = congestion_view(plan, net);
  EXPECT_EQ(seen.congested, (std::vector<char>{0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(failure_analysis(plan, 0, projected, seen), 2);
}

TEST(FailureAnalysis, GlobalImpactGivesRemainingLegs) {
  auto net = line6();
  CompositionPlan plan = straight_plan(net);
  auto projected = project_delays(plan, 0, 0.25);
  EXPECT_EQ(projected, std::vector<double>(5, 0.25));
  EXPECT_EQ(failure_analysis(plan, 0, projected, congestion_view(plan, net)), 5);
  // From the third station only three legs remain.
  EXPECT_EQ(failure_analysis(plan, 2, project_delays(plan, 2, 0.25), congestion_view(plan, net)), 3);
}

TEST(ProjectDelays, StaysAbsorbButRechargesDoNot) {
  auto net = line6();
  CompositionPlan plan = straight_plan(net);
  plan.legs[1].wait_duration = 0.1;
  plan.legs[2].recharge_duration = 0.5;
  auto p = project_delays(plan, 1, 0.3);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_NEAR(p[0], 0.3, 1e-12);
  EXPECT_NEAR(p[1], 0.2, 1e-12);
  EXPECT_NEAR(p[2], 0.2, 1e-12);
  EXPECT_TRUE(project_delays(plan, 5, 0.3).empty());
}

TEST(Recompose, RoutesAroundNewlyCongestedStation) {
  Detour d;
  auto plan = d.plan();
  ASSERT_EQ(plan.nodes(), (std::vector<NodeId>{0, 1, 2, 3, 5}));
  ASSERT_GT(plan.legs[1].recharge_duration, 0.0);

  SkywayNetwork runtime = d.rushed();
  PlanningContext ctx = d.ctx().rebind(runtime);
  RuntimeState at{1, plan.legs[0].arrive_time + 0.2, plan.legs[0].battery_on_arrival};
  int horizon = failure_analysis(plan, 1, project_delays(plan, 1, 0.2), congestion_view(plan, runtime));
  EXPECT_EQ(horizon, 1);

  auto fragment = recompose(plan, at, horizon, ctx);
  EXPECT_EQ(fragment.nodes(), (std::vector<NodeId>{1, 4, 3}));
  auto spliced = update_plan(plan, fragment, 1, ctx);
  EXPECT_EQ(spliced.nodes(), (std::vector<NodeId>{0, 1, 4, 3, 5}));
  EXPECT_TRUE(validate_plan(spliced, runtime, fx::request(0, 5)).empty());

  auto replicated = replicate_delay(plan, at, ctx);
  ASSERT_TRUE(replicated.has_value());
  EXPECT_LT(spliced.arrival_time(), replicated->arrival_time());

  auto global = recompose_global_bruteforce(plan, at, ctx);
  EXPECT_LE(global.arrival_time(), spliced.arrival_time() + 1e-9);
  EXPECT_EQ(global.nodes(), compose_bruteforce(ctx, RouteProblem{1, 5, at.time, at.battery, 0}).nodes());
}

TEST(Recompose, WindowReachingDestinationReplansFully) {
  Detour d;
  auto plan = d.plan();
  SkywayNetwork runtime = d.rushed();
  PlanningContext ctx = d.ctx().rebind(runtime);
  RuntimeState at{1, plan.legs[0].arrive_time, plan.legs[0].battery_on_arrival};
  auto fragment = recompose(plan, at, 10, ctx);
  EXPECT_EQ(fragment.origin(), 1u);
  EXPECT_EQ(fragment.terminus(), 5u);
}

TEST(Recompose, SingleRouteShiftsOldPlan) {
  auto net = fx::network({{0, 0}, {0, 30}, {0, 60}, {0, 70}}, {{0, 1}, {1, 2}, {2, 3}});
  PlanningContext ctx(net, fx::drone(), WindField(), 1.0);
  auto plan = compose_lookahead(ctx, fx::request(0, 3));
  RuntimeState at{1, plan.legs[0].arrive_time + 0.3, plan.legs[0].battery_on_arrival};
  auto fragment = recompose(plan, at, 2, ctx);
  auto spliced = update_plan(plan, fragment, 1, ctx);
  EXPECT_EQ(spliced.nodes(), plan.nodes());
  auto shifted = replicate_delay(plan, at, ctx);
  ASSERT_TRUE(shifted.has_value());
  EXPECT_NEAR(spliced.arrival_time(), shifted->arrival_time(), 1e-12);
  EXPECT_NEAR(spliced.arrival_time(), plan.arrival_time() + 0.3, 1e-9);
}

TEST(UpdatePlan, IdentityFragmentRetimes) {
  Detour d;
  auto ctx = d.ctx();
  auto plan = d.plan();
  RuntimeState at{1, plan.legs[0].arrive_time + 0.1, plan.legs[0].battery_on_arrival};
  auto rest = replicate_delay(plan, at, ctx);
  ASSERT_TRUE(rest.has_value());
  auto out = update_plan(plan, *rest, 1, ctx);
  EXPECT_EQ(out.nodes(), plan.nodes());
  EXPECT_EQ(out.legs.size(), plan.legs.size());
  EXPECT_NEAR(out.arrival_time(), plan.arrival_time() + 0.1, 1e-9);
  EXPECT_TRUE(validate_plan(out, d.net, fx::request(0, 5)).empty());
}

TEST(UpdatePlan, DifferentIntermediatesChangeLegCount) {
  auto net = fx::network({{0, 0}, {0, 10}, {0, 20}, {5, 5}, {5, 15}, {0, 30}},
                         {{0, 1}, {1, 2}, {2, 5}, {1, 3}, {3, 4}, {4, 2}});
  PlanningContext ctx(net, fx::drone(), WindField(), 1.0);
  auto plan = compose_bruteforce(ctx, fx::request(0, 5));
  ASSERT_EQ(plan.nodes(), (std::vector<NodeId>{0, 1, 2, 5}));
  std::vector<NodeId> around{1, 3, 4, 2};
  auto fragment = replay_route(ctx, around, {}, plan.legs[0].arrive_time, plan.legs[0].battery_on_arrival);
  ASSERT_TRUE(fragment.has_value());
  auto out = update_plan(plan, *fragment, 1, ctx);
  EXPECT_EQ(out.nodes(), (std::vector<NodeId>{0, 1, 3, 4, 2, 5}));
  EXPECT_EQ(out.legs.size(), 5u);
  EXPECT_TRUE(validate_plan(out, net, fx::request(0, 5)).empty());
  EXPECT_NEAR(out.total_distance, 10 + 2 * std::hypot(5.0, 5.0) + 10 + 10, 1e-9);
}

TEST(UpdatePlan, FragmentToDestinationDropsRemainder) {
  Detour d;
  auto ctx = d.ctx();
  auto plan = d.plan();
  std::vector<NodeId> rest{1, 4, 3, 5};
  auto fragment = replay_route(ctx, rest, {}, plan.legs[0].arrive_time, plan.legs[0].battery_on_arrival);
  ASSERT_TRUE(fragment.has_value());
  auto out = update_plan(plan, *fragment, 1, ctx);
  EXPECT_EQ(out.nodes(), (std::vector<NodeId>{0, 1, 4, 3, 5}));
  EXPECT_DOUBLE_EQ(out.arrival_time(), fragment->arrival_time());
}

TEST(UpdatePlan, MismatchedFragmentsAreRejected) {
  Detour d;
  auto ctx = d.ctx();
  auto plan = d.plan();
  auto code = [&](const CompositionPlan& f, std::size_t cur) {
    try {
      update_plan(plan, f, cur, ctx);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io_error;
  };
  std::vector<NodeId> wrong_start{2, 3};
  auto f1 = replay_route(ctx, wrong_start, {}, 1.0, 100.0);
  EXPECT_EQ(code(*f1, 1), Errc::splice_mismatch);
  std::vector<NodeId> no_rejoin{1, 4};
  auto f2 = replay_route(ctx, no_rejoin, {}, 1.0, 100.0);
  EXPECT_EQ(code(*f2, 1), Errc::splice_mismatch);
}

TEST(Perturbations, NestedAcrossRatesAndSeeded) {
  auto s = fx::small_scenario(20, 9);
  auto ctx = make_context(s);
  auto plan = compose_lookahead(ctx, s.request);
  PerturbationModel m = s.perturbation;
  std::map<NodeId, double> previous;
  for (double rate : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    m.failure_rate = rate;
    auto drawn = draw_perturbations(s.network, s.request.source, plan, m);
    EXPECT_EQ(drawn.size(), static_cast<std::size_t>(std::lround(rate * 20)));
    std::map<NodeId, double> now;
    for (const auto& p : drawn) {
      EXPECT_NE(p.node, s.request.source);
      EXPECT_GE(p.arrival_delay, -10.0 / 60.0);
      EXPECT_LE(p.arrival_delay, 30.0 / 60.0);
      now[p.node] = p.arrival_delay;
    }
    for (auto [node, delay] : previous) {
      ASSERT_TRUE(now.contains(node)) << "rate " << rate;
      EXPECT_DOUBLE_EQ(now[node], delay);
    }
    previous = now;
    auto again = draw_perturbations(s.network, s.request.source, plan, m);
    ASSERT_EQ(again.size(), drawn.size());
    for (std::size_t i = 0; i < drawn.size(); ++i) EXPECT_EQ(again[i].node, drawn[i].node);
  }
  m.failure_rate = -0.1;
  EXPECT_FALSE(check_perturbation(m).empty());
  EXPECT_THROW(draw_perturbations(s.network, s.request.source, plan, m), Error);
}

TEST(Execution, NoPerturbationFollowsPlanExactly) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = fx::small_scenario(12, seed);
    auto ctx = make_context(s);
    auto plan = compose_lookahead(ctx, s.request);
    auto trace = execute_resilient(plan, s.network, ctx, {});
    ASSERT_TRUE(trace.delivered);
    EXPECT_TRUE(trace.failures.empty());
    ASSERT_EQ(trace.legs.size(), plan.legs.size());
    for (std::size_t k = 0; k < plan.legs.size(); ++k) {
      EXPECT_EQ(trace.legs[k].to, plan.legs[k].to);
      EXPECT_DOUBLE_EQ(trace.legs[k].depart_time, plan.legs[k].depart_time);
      EXPECT_DOUBLE_EQ(trace.legs[k].arrive_time, plan.legs[k].arrive_time);
    }
    EXPECT_DOUBLE_EQ(trace.delivery_time, plan.arrival_time() - plan.start_time);
  }
}

TEST(Execution, DetourBeatsWaiting) {
  Detour d;
  auto ctx = d.ctx();
  auto plan = d.plan();
  std::vector<Perturbation> events{{1, 0.2, std::nullopt}, {2, 0.0, Interval{0.0, 3.0}}};
  ExecutionConfig local;
  ExecutionConfig replicate;
  replicate.policy = RecoveryPolicy::delay_replication;
  auto a = execute_resilient(plan, d.net, ctx, events, local);
  auto r = execute_resilient(plan, d.net, ctx, events, replicate);
  ASSERT_TRUE(a.delivered);
  ASSERT_TRUE(r.delivered);
  EXPECT_LT(a.delivery_time, r.delivery_time);
  ASSERT_EQ(a.episodes.size(), 1u);
  EXPECT_EQ(a.episodes[0].horizon, 1);
  EXPECT_EQ(a.final_plan.nodes(), (std::vector<NodeId>{0, 1, 4, 3, 5}));
  EXPECT_TRUE(validate_plan(a.final_plan, d.net, fx::request(0, 5)).empty());
  // The caller's network is untouched.
  EXPECT_TRUE(d.net.calendar(2).empty());
}

TEST(Execution, HeavyFailureStillDelivers) {
  std::vector<double> base, hit;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto s = fx::small_scenario(10, seed);
    auto ctx = make_context(s);
    auto plan = compose_lookahead(ctx, s.request);
    auto r = simulate_plan(s, ctx, plan, RecoveryPolicy::adaptive_local, 0.5);
    ASSERT_TRUE(r.delivered) << "seed " << seed;
    EXPECT_TRUE(validate_plan(r.trace.final_plan, s.network, s.request).empty()) << "seed " << seed;
    base.push_back(plan.arrival_time() - s.request.start_time);
    hit.push_back(r.delivery_time);
  }
  double mb = std::accumulate(base.begin(), base.end(), 0.0) / 30;
  double mh = std::accumulate(hit.begin(), hit.end(), 0.0) / 30;
  EXPECT_GE(mh, mb);
}

TEST(Policies, NamesRoundTrip) {
  for (auto p : {RecoveryPolicy::adaptive_local, RecoveryPolicy::global_bruteforce,
                 RecoveryPolicy::delay_replication, RecoveryPolicy::greedy_replan}) {
    EXPECT_EQ(parse_policy(to_string(p)), p);
  }
  EXPECT_FALSE(parse_policy("sideways").has_value());
}
