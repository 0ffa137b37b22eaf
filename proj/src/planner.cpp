#include "skyway/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skyway/error.hpp"

namespace skyway {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_problem(const PlanningContext& ctx, const RouteProblem& p) {
  const SkywayNetwork& net = ctx.network();
  if (p.source >= net.size() || p.destination >= net.size()) {
    throw Error(Errc::invalid_argument, "route endpoint does not exist");
  }
  if (p.source == p.destination) throw Error(Errc::invalid_argument, "source equals destination");
  if (net.size() > kMaxSearchNodes) {
    throw Error(Errc::instance_too_large, "planners support at most 64 stations");
  }
  if (ctx.package_weight() > ctx.drone().payload_capacity) {
    throw Error(Errc::invalid_argument, "package exceeds the drone's payload capacity");
  }
}

void expand_into(const PlanningContext& ctx, const State& s, std::uint64_t blocked,
                 std::vector<Child>& out) {
  const SkywayNetwork& net = ctx.network();
  const std::size_t epoch = ctx.wind().epoch_index(s.timestamp);
  for (const Arc& arc : net.arcs_from(s.node)) {
    if ((s.visited | blocked) & node_bit(arc.to)) continue;
    auto step = try_travel(ctx, s.node, arc, s.timestamp, s.battery, epoch);
    if (!step) continue;
    Child c;
    c.action = ActionKind::travel;
    c.state = State{arc.to, step->arrive, std::max(0.0, s.battery - step->consumed),
                    s.accumulated_distance + arc.distance, s.visited | node_bit(arc.to)};
    c.travel = *step;
    out.push_back(std::move(c));
  }
  if (s.battery < kFullBattery) {
    RechargeStep r = plan_recharge(ctx, net.calendar(s.node), s.node, s.timestamp, s.battery);
    Child c;
    c.action = ActionKind::recharge;
    c.state = State{s.node, r.end(), kFullBattery, s.accumulated_distance, s.visited};
    c.recharge = r;
    out.push_back(std::move(c));
  }
}

CompositionPlan build_plan(const PlanningContext& ctx, const RouteProblem& p,
                           const std::vector<const Child*>& path) {
  PlanBuilder builder(ctx.drone().id, p.source, p.start_time, p.start_battery);
  for (const Child* c : path) {
    if (c->recharge) builder.recharge(*c->recharge);
    if (c->travel) builder.travel(*c->travel);
  }
  return std::move(builder).finish(ctx.network());
}

// Time at which the drone is done at the destination: on arrival, or after
// recharging when it lands below the required charge.
double goal_time(const PlanningContext& ctx, const RouteProblem& p, double t, double battery) {
  if (battery + 1e-9 >= p.arrival_battery) return t;
  const SkywayNetwork& net = ctx.network();
  return plan_recharge(ctx, net.calendar(p.destination), p.destination, t, battery).end();
}

double score_remaining(const PlanningContext& ctx, const State& state, double remaining) {
  double score = state.timestamp + remaining / ctx.drone().speed;
  // Calm air cannot carry the drone home on the current charge: some later
  // stop recharges to full from at most this level.
  if (remaining * ctx.energy().calm_rate(ctx.package_weight()) > state.battery) {
    score += (kFullBattery - state.battery) / kFullBattery * ctx.drone().recharge_time_full;
  }
  return score;
}

// ---------------------------------------------------------------------------
// Lookahead

class LookaheadSearch {
public:
  LookaheadSearch(const PlanningContext& ctx, const RouteProblem& p, int depth)
      : ctx_(ctx), p_(p), depth_(depth), vmax_(ctx.max_ground_speed()) {
    to_goal_.assign(ctx.network().size(), -1.0);
  }

  CompositionPlan run() {
    struct Frame {
      State state;
      std::vector<Child> children;
      std::size_t next = 0;
      const Child* via = nullptr;
    };
    if (!can_finish(root())) throw Error(Errc::unreachable_destination, "destination out of range");
    std::vector<Frame> stack;
    stack.reserve(2 * ctx_.network().size() + 1);
    stack.push_back(Frame{root(), ranked_children(root()), 0, nullptr});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.state.node == p_.destination) break;
      if (top.next >= top.children.size()) {
        stack.pop_back();
        continue;
      }
      const Child& pick = top.children[top.next++];
      if (++expanded_ > ctx_.config().expansion_budget) {
        throw Error(Errc::unreachable_destination, "lookahead search budget exhausted");
      }
      auto kids = pick.state.node == p_.destination ? std::vector<Child>{} : ranked_children(pick.state);
      stack.push_back(Frame{pick.state, std::move(kids), 0, &pick});
    }
    if (stack.empty()) throw Error(Errc::unreachable_destination, "no feasible composition");
    std::vector<const Child*> path;
    for (const Frame& f : stack) {
      if (f.via != nullptr) path.push_back(f.via);
    }
    return build_plan(ctx_, p_, path);
  }

private:
  State root() const {
    return State{p_.source, p_.start_time, p_.start_battery, 0.0, node_bit(p_.source)};
  }

  std::vector<Child> ranked_children(const State& s) {
    std::vector<Child>& kids = kids_;
    kids.clear();
    kids.reserve(ctx_.network().arcs_from(s.node).size() + 1);
    expand_into(ctx_, s, p_.forbidden, kids);
    auto& order = order_;
    order.clear();
    double alpha = kInf;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (!can_finish(kids[i].state)) continue;
      // Exact below the cut; a pruned branch scores above the best so far.
      double v = subtree_value(kids[i].state, depth_, std::nextafter(alpha, kInf));
      alpha = std::min(alpha, v);
      order.emplace_back(v, i);
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      const State& x = kids[a.second].state;
      const State& y = kids[b.second].state;
      if (x.timestamp != y.timestamp) return x.timestamp < y.timestamp;
      if (x.accumulated_distance != y.accumulated_distance) {
        return x.accumulated_distance < y.accumulated_distance;
      }
      if (x.node != y.node) return x.node < y.node;
      return a.second < b.second;
    });
    std::vector<Child> ranked;
    ranked.reserve(order.size());
    for (const auto& [value, i] : order) {
      if (value == kInf) continue;  // every branch below dead-ends within the horizon
      ranked.push_back(std::move(kids[i]));
    }
    return ranked;
  }

  double to_goal(NodeId v) {
    if (to_goal_[v] < 0.0) to_goal_[v] = ctx_.network().straight_line(v, p_.destination);
    return to_goal_[v];
  }

  // Whether the destination is still connected to `s` through flyable
  // segments and stations not yet on the branch.
  bool can_finish(const State& s) {
    if (s.node == p_.destination) return true;
    const SkywayNetwork& net = ctx_.network();
    if (flyable_.empty()) {
      const double budget = kFullBattery - ctx_.config().battery_reserve + 1e-9;
      flyable_.resize(net.arc_count());
      for (std::size_t a = 0; a < net.arc_count(); ++a) flyable_[a] = ctx_.table().min_consumption(a) <= budget;
    }
    std::uint64_t seen = s.visited | p_.forbidden | node_bit(s.node);
    frontier_.assign(1, s.node);
    while (!frontier_.empty()) {
      NodeId v = frontier_.back();
      frontier_.pop_back();
      for (const Arc& arc : net.arcs_from(v)) {
        if (!flyable_[arc.index]) continue;
        if (arc.to == p_.destination) return true;
        if (seen & node_bit(arc.to)) continue;
        seen |= node_bit(arc.to);
        frontier_.push_back(arc.to);
      }
    }
    return false;
  }

  // Best leaf score within `levels` further actions. Subtrees whose bound
  // cannot beat `alpha` are cut; the result is exact whenever it is < alpha.
  double subtree_value(const State& s, int levels, double alpha) {
    if (s.node == p_.destination) return goal_time(ctx_, p_, s.timestamp, s.battery);
    if (levels == 0) return score_remaining(ctx_, s, to_goal(s.node));
    double bound = s.timestamp + to_goal(s.node) / vmax_;
    if (bound >= alpha) return bound;
    if (scratch_.size() < static_cast<std::size_t>(levels)) scratch_.resize(levels);
    std::vector<Child>& kids = scratch_[levels - 1];
    kids.clear();
    kids.reserve(ctx_.network().arcs_from(s.node).size() + 1);
    expand_into(ctx_, s, p_.forbidden, kids);
    double best = alpha;
    for (const Child& c : kids) {
      double v = subtree_value(c.state, levels - 1, best);
      if (v < best) best = v;
    }
    return best;
  }

  const PlanningContext& ctx_;
  const RouteProblem& p_;
  int depth_;
  double vmax_;
  std::size_t expanded_ = 0;
  std::vector<double> to_goal_;
  std::vector<Child> kids_;
  std::vector<std::pair<double, std::size_t>> order_;
  std::vector<char> flyable_;
  std::vector<NodeId> frontier_;
  std::vector<std::vector<Child>> scratch_;  // one expansion buffer per remaining level
};

// ---------------------------------------------------------------------------
// Brute force

class ExhaustiveSearch {
public:
  ExhaustiveSearch(const PlanningContext& ctx, const RouteProblem& p) : ctx_(ctx), p_(p) {}

  CompositionPlan run() {
    nodes_.push_back(p_.source);
    enumerate(p_.source, node_bit(p_.source));
    if (!best_) throw Error(Errc::unreachable_destination, "no feasible composition");
    return build_plan(ctx_, p_, best_->path);
  }

private:
  struct Step {
    std::optional<RechargeStep> recharge;
    TravelStep travel;
  };
  struct Best {
    double arrival;
    double distance;
    std::vector<NodeId> nodes;
    std::vector<char> recharges;
    std::vector<Child> owned;
    std::vector<const Child*> path;
  };

  bool better(double arrival, double dist) const {
    if (!best_) return true;
    if (arrival != best_->arrival) return arrival < best_->arrival;
    if (dist != best_->distance) return dist < best_->distance;
    if (nodes_ != best_->nodes) return nodes_ < best_->nodes;
    return recharge_flags_() < best_->recharges;
  }

  std::vector<char> recharge_flags_() const {
    std::vector<char> flags;
    flags.reserve(steps_.size());
    for (const Step& s : steps_) flags.push_back(s.recharge ? 1 : 0);
    return flags;
  }

  void record(double arrival, double dist) {
    if (!better(arrival, dist)) return;
    Best b{arrival, dist, nodes_, recharge_flags_(), {}, {}};
    b.owned.reserve(steps_.size());
    for (const Step& s : steps_) {
      Child c;
      c.recharge = s.recharge;
      c.travel = s.travel;
      b.owned.push_back(std::move(c));
    }
    for (const Child& c : b.owned) b.path.push_back(&c);
    best_ = std::move(b);
  }

  // Every simple path is enumerated on the graph alone, then simulated.
  void enumerate(NodeId v, std::uint64_t mask) {
    if (v == p_.destination) {
      simulate(0, p_.start_time, p_.start_battery, 0.0);
      return;
    }
    for (const Arc& arc : ctx_.network().arcs_from(v)) {
      if ((mask | p_.forbidden) & node_bit(arc.to)) continue;
      nodes_.push_back(arc.to);
      enumerate(arc.to, mask | node_bit(arc.to));
      nodes_.pop_back();
    }
  }

  // Timing of the current path under every choice of recharge stops. A
  // prefix already later than the incumbent is abandoned.
  void simulate(std::size_t pos, double t, double battery, double dist) {
    if (pos + 1 == nodes_.size()) {
      record(goal_time(ctx_, p_, t, battery), dist);
      return;
    }
    const SkywayNetwork& net = ctx_.network();
    const NodeId v = nodes_[pos];
    const Arc* arc = net.find_arc(v, nodes_[pos + 1]);

    std::optional<RechargeStep> charge;
    if (battery < kFullBattery) charge = plan_recharge(ctx_, net.calendar(v), v, t, battery);

    for (int variant = 0; variant < (charge ? 2 : 1); ++variant) {
      double ready = variant == 0 ? t : charge->end();
      double b = variant == 0 ? battery : kFullBattery;
      auto step = try_travel(ctx_, v, *arc, ready, b);
      if (!step) continue;
      if (best_ && step->arrive > best_->arrival + 1e-9) continue;
      steps_.push_back(Step{variant == 0 ? std::nullopt : charge, *step});
      simulate(pos + 1, step->arrive, std::max(0.0, b - step->consumed), dist + arc->distance);
      steps_.pop_back();
    }
  }

  const PlanningContext& ctx_;
  const RouteProblem& p_;
  std::vector<Step> steps_;
  std::vector<NodeId> nodes_;
  std::optional<Best> best_;
};

}  // namespace

LookaheadDepth::LookaheadDepth(int levels) : levels_(levels) {
  if (levels < 0) throw Error(Errc::invalid_argument, "lookahead depth must be >= 0");
}

RouteProblem make_problem(const DeliveryRequest& r) {
  if (!(r.package_weight > 0.0)) throw Error(Errc::invalid_argument, "package weight must be positive");
  return RouteProblem{r.source, r.destination, r.start_time, kFullBattery, 0};
}

std::vector<Child> expand(const PlanningContext& ctx, const State& state, std::uint64_t forbidden) {
  std::vector<Child> out;
  State s = state;
  s.visited |= node_bit(s.node);
  expand_into(ctx, s, forbidden, out);
  if (out.empty()) throw Error(Errc::dead_end, "no action available at this state");
  return out;
}

double score_state(const PlanningContext& ctx, const State& state, NodeId destination) {
  return score_remaining(ctx, state, ctx.network().straight_line(state.node, destination));
}


CompositionPlan compose_lookahead(const PlanningContext& ctx, const RouteProblem& problem,
                                  LookaheadDepth depth) {
  check_problem(ctx, problem);
  if (depth.value() == 0) return compose_greedy(ctx, problem);
  return LookaheadSearch(ctx, problem, depth.value()).run();
}

CompositionPlan compose_lookahead(const PlanningContext& ctx, const DeliveryRequest& request,
                                  LookaheadDepth depth) {
  return compose_lookahead(ctx, make_problem(request), depth);
}

CompositionPlan compose_greedy(const PlanningContext& ctx, const RouteProblem& problem) {
  check_problem(ctx, problem);
  // Greedy may revisit stations, so it books its own recharges as it goes on
  // a private copy of the calendars.
  SkywayNetwork scratch = ctx.network();
  const PlanningContext local = ctx.rebind(scratch);
  const NodeId dst = problem.destination;

  PlanBuilder builder(ctx.drone().id, problem.source, problem.start_time, problem.start_battery);
  std::vector<int> visits(scratch.size(), 0);
  visits[problem.source] = 1;
  while (builder.node() != dst) {
    NodeId v = builder.node();
    double here = scratch.straight_line(v, dst);
    const Arc* pick = nullptr;
    bool pick_reduces = false;
    for (const Arc& arc : scratch.arcs_from(v)) {
      if (problem.forbidden & node_bit(arc.to)) continue;
      if (!try_travel(local, v, arc, builder.time(), kFullBattery)) continue;
      bool reduces = scratch.straight_line(arc.to, dst) < here;
      bool take = pick == nullptr || (reduces && !pick_reduces) ||
                  (reduces == pick_reduces && arc.distance < pick->distance);
      if (take) {
        pick = &arc;
        pick_reduces = reduces;
      }
    }
    if (pick == nullptr) throw Error(Errc::unreachable_destination, "greedy policy is stuck");

    auto step = try_travel(local, v, *pick, builder.time(), builder.battery());
    if (!step && builder.battery() < kFullBattery) {
      RechargeStep r = plan_recharge(local, scratch.calendar(v), v, builder.time(), builder.battery());
      scratch.calendar(v).reserve(r.begin, r.duration);
      builder.recharge(r);
      step = try_travel(local, v, *pick, builder.time(), builder.battery());
    }
    if (!step) throw Error(Errc::unreachable_destination, "greedy leg cannot be flown");
    builder.travel(*step);
    if (++visits[pick->to] > ctx.config().greedy_revisit_limit) {
      throw Error(Errc::livelock_guard, "greedy policy revisits station " + std::to_string(pick->to));
    }
  }
  return std::move(builder).finish(ctx.network());
}

CompositionPlan compose_greedy(const PlanningContext& ctx, const DeliveryRequest& request) {
  return compose_greedy(ctx, make_problem(request));
}

CompositionPlan compose_bruteforce(const PlanningContext& ctx, const RouteProblem& problem) {
  if (ctx.network().size() > ctx.config().bruteforce_node_limit) {
    throw Error(Errc::instance_too_large,
                "brute force limited to " + std::to_string(ctx.config().bruteforce_node_limit) +
                    " stations");
  }
  check_problem(ctx, problem);
  return ExhaustiveSearch(ctx, problem).run();
}

CompositionPlan compose_bruteforce(const PlanningContext& ctx, const DeliveryRequest& request) {
  return compose_bruteforce(ctx, make_problem(request));
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "lookahead") return Algorithm::lookahead;
  if (name == "greedy") return Algorithm::greedy;
  if (name == "bruteforce") return Algorithm::bruteforce;
  return std::nullopt;
}

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::lookahead: return "lookahead";
    case Algorithm::greedy: return "greedy";
    case Algorithm::bruteforce: return "bruteforce";
  }
  return "unknown";
}

CompositionPlan compose(Algorithm algo, const PlanningContext& ctx, const RouteProblem& problem,
                        LookaheadDepth depth) {
  switch (algo) {
    case Algorithm::lookahead: return compose_lookahead(ctx, problem, depth);
    case Algorithm::greedy: return compose_greedy(ctx, problem);
    case Algorithm::bruteforce: return compose_bruteforce(ctx, problem);
  }
  throw Error(Errc::invalid_argument, "unknown algorithm");
}

}  // namespace skyway
