#include "skyway/resilience.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "skyway/error.hpp"

namespace skyway {

namespace {

double stay_wait(const CompositionPlan& plan, std::size_t position) {
  return position == 0 ? plan.origin_wait : plan.legs[position - 1].wait_duration;
}

std::uint64_t bits_of(std::span<const NodeId> nodes) {
  std::uint64_t mask = 0;
  for (NodeId v : nodes) mask |= node_bit(v);
  return mask;
}

// Replaces the stay recorded at `position` with the origin stay of `from`.
void set_stay(CompositionPlan& plan, std::size_t position, const CompositionPlan& from) {
  if (position == 0) {
    plan.origin_wait = from.origin_wait;
    plan.origin_pad_wait = from.origin_pad_wait;
    plan.origin_recharge = from.origin_recharge;
    plan.origin_recharge_begin = from.origin_recharge_begin;
    return;
  }
  PlanLeg& leg = plan.legs[position - 1];
  leg.wait_duration = from.origin_wait;
  leg.pad_wait = from.origin_pad_wait;
  leg.recharge_duration = from.origin_recharge;
  leg.recharge_begin = from.origin_recharge_begin;
}

double battery_at(const CompositionPlan& plan) {
  return plan.legs.empty() ? plan.start_battery : plan.legs.back().battery_on_arrival;
}

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

bool detect_failure(double expected, double actual, double tolerance) {
  if (tolerance < 0.0) throw Error(Errc::invalid_argument, "detection tolerance must be >= 0");
  return std::abs(actual - expected) > tolerance;
}

CongestionView congestion_view(const CompositionPlan& plan, const SkywayNetwork& network) {
  CongestionView view;
  view.congested.assign(plan.legs.size() + 1, 0);
  view.congested[0] = plan.origin_pad_wait > kTimeEps ? 1 : 0;
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    const PlanLeg& leg = plan.legs[k];
    bool queued = leg.pad_wait > kTimeEps;
    bool full = leg.to < network.size() && network.calendar(leg.to).all_busy(leg.arrive_time);
    view.congested[k + 1] = (queued || full) ? 1 : 0;
  }
  return view;
}

std::vector<double> project_delays(const CompositionPlan& plan, std::size_t cur, double delta) {
  std::vector<double> out;
  const std::size_t last = plan.legs.size();
  if (cur >= last) return out;
  out.reserve(last - cur);
  double shift = delta;
  for (std::size_t j = cur + 1; j <= last; ++j) {
    shift -= stay_wait(plan, j - 1);
    out.push_back(shift);
  }
  return out;
}

int failure_analysis(const CompositionPlan& plan, std::size_t cur,
                     std::span<const double> projected_delays, const CongestionView& congestion) {
  const std::size_t last = plan.legs.size();
  if (cur >= last) return 1;
  const std::size_t remaining = last - cur;

  std::size_t affected = remaining;
  for (std::size_t j = cur + 1; j <= last && j < congestion.congested.size(); ++j) {
    if (congestion.congested[j]) {
      affected = j - cur;
      break;
    }
  }
  std::size_t failed = 1;
  for (double td : projected_delays) {
    if (td >= 0.0) {
      ++failed;
    } else {
      break;
    }
  }
  std::size_t horizon = std::clamp<std::size_t>(std::min(affected, failed), 1, remaining);
  return static_cast<int>(horizon);
}

std::optional<CompositionPlan> replicate_delay(const CompositionPlan& plan, const RuntimeState& at,
                                               const PlanningContext& ctx) {
  auto nodes = plan.nodes();
  auto flags = recharge_flags(plan);
  if (at.position + 1 >= nodes.size()) return std::nullopt;
  std::span<const NodeId> rest(nodes.begin() + static_cast<std::ptrdiff_t>(at.position), nodes.end());
  std::span<const char> rest_flags(flags.begin() + static_cast<std::ptrdiff_t>(at.position), flags.end());
  return replay_route(ctx, rest, rest_flags, at.time, at.battery);
}

CompositionPlan update_plan(const CompositionPlan& plan, const CompositionPlan& fragment,
                            std::size_t cur, const PlanningContext& ctx, SkywayNetwork* bookings) {
  const auto nodes = plan.nodes();
  const std::size_t last = plan.legs.size();
  if (fragment.empty() || cur >= last || fragment.origin() != nodes[cur]) {
    throw Error(Errc::splice_mismatch, "fragment does not start at the current station");
  }
  std::size_t rejoin = 0;
  for (std::size_t j = cur + 1; j <= last; ++j) {
    if (nodes[j] == fragment.terminus()) {
      rejoin = j;
      break;
    }
  }
  if (rejoin == 0) throw Error(Errc::splice_mismatch, "fragment does not rejoin the plan");

  std::optional<CompositionPlan> tail;
  if (rejoin < last) {
    auto flags = recharge_flags(plan);
    std::span<const NodeId> rest(nodes.begin() + static_cast<std::ptrdiff_t>(rejoin), nodes.end());
    std::span<const char> rest_flags(flags.begin() + static_cast<std::ptrdiff_t>(rejoin), flags.end());
    tail = replay_route(ctx, rest, rest_flags, fragment.arrival_time(), battery_at(fragment));
    if (!tail) throw Error(Errc::unreachable_destination, "remaining plan cannot be flown after splice");
  }

  if (bookings != nullptr) release_reservations(plan, *bookings, cur);

  CompositionPlan out = plan;
  out.legs.resize(cur);
  if (cur == 0) {
    out.start_time = fragment.start_time;
    out.start_battery = fragment.start_battery;
  } else {
    out.legs[cur - 1].arrive_time = fragment.start_time;
    out.legs[cur - 1].battery_on_arrival = fragment.start_battery;
  }
  set_stay(out, cur, fragment);
  out.legs.insert(out.legs.end(), fragment.legs.begin(), fragment.legs.end());
  if (tail) {
    set_stay(out, out.legs.size(), *tail);
    out.legs.insert(out.legs.end(), tail->legs.begin(), tail->legs.end());
  }
  finalize_totals(out, ctx.network());

  if (bookings != nullptr) commit_reservations(out, *bookings, cur);
  return out;
}

CompositionPlan recompose(const CompositionPlan& plan, const RuntimeState& at, int horizon,
                          const PlanningContext& ctx) {
  const auto nodes = plan.nodes();
  const std::size_t last = plan.legs.size();
  if (at.position >= last) throw Error(Errc::invalid_argument, "no legs left to recompose");
  const std::size_t remaining = last - at.position;
  const int depth = static_cast<int>(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(horizon, 1)), 1, remaining));

  const auto flags = recharge_flags(plan);
  std::optional<CompositionPlan> baseline = replicate_delay(plan, at, ctx);
  std::optional<double> baseline_arrival;
  if (baseline) baseline_arrival = baseline->arrival_time();

  // A window ending on a congested station could not route around it.
  std::size_t first = at.position + static_cast<std::size_t>(depth);
  if (first < last && congestion_view(plan, ctx.network()).congested[first]) ++first;

  for (std::size_t target = first; target <= last; ++target) {
    RouteProblem local{nodes[at.position], nodes[target], at.time, at.battery,
                       bits_of(std::span<const NodeId>(nodes).subspan(target + 1))};
    if (local.forbidden & node_bit(local.source)) local.forbidden &= ~node_bit(local.source);
    // Rejoin with the charge the rest of the plan was built on, unless it recharges there anyway.
    if (target < last && !flags[target]) local.arrival_battery = plan.legs[target - 1].battery_on_arrival;
    CompositionPlan fragment;
    try {
      fragment = compose_lookahead(ctx, local, LookaheadDepth(depth));
    } catch (const Error& e) {
      if (e.code() == Errc::unreachable_destination || e.code() == Errc::dead_end) continue;
      throw;
    }
    double candidate_arrival = fragment.arrival_time();
    try {
      if (target < last) candidate_arrival = update_plan(plan, fragment, at.position, ctx).arrival_time();
    } catch (const Error& e) {
      if (e.code() == Errc::unreachable_destination) continue;
      throw;
    }
    if (baseline_arrival && *baseline_arrival <= candidate_arrival) {
      // Keep the old sub-route up to the same rejoin station, re-timed.
      std::size_t keep = target - at.position;
      CompositionPlan old = *baseline;
      old.legs.resize(keep);
      old.legs.back().wait_duration = 0.0;
      old.legs.back().pad_wait = 0.0;
      old.legs.back().recharge_duration = 0.0;
      old.legs.back().recharge_begin = 0.0;
      finalize_totals(old, ctx.network());
      return old;
    }
    return fragment;
  }
  throw Error(Errc::unreachable_destination, "no local recomposition reaches the plan");
}

CompositionPlan recompose_global_bruteforce(const CompositionPlan& plan, const RuntimeState& at,
                                            const PlanningContext& ctx) {
  const auto nodes = plan.nodes();
  if (at.position + 1 >= nodes.size()) throw Error(Errc::invalid_argument, "no legs left to recompose");
  RouteProblem rest{nodes[at.position], nodes.back(), at.time, at.battery, 0};
  return compose_bruteforce(ctx, rest);
}

// ---------------------------------------------------------------------------

std::vector<std::string> check_perturbation(const PerturbationModel& m) {
  std::vector<std::string> out;
  if (!(m.failure_rate >= 0.0 && m.failure_rate <= 1.0)) out.emplace_back("failure_rate must lie in [0, 1]");
  if (!(m.max_early >= 0.0) || !(m.max_late >= 0.0)) out.emplace_back("delay bounds must be >= 0");
  if (!(m.calendar_shift_intensity >= 0.0 && m.calendar_shift_intensity <= 1.0)) {
    out.emplace_back("calendar_shift_intensity must lie in [0, 1]");
  }
  return out;
}

std::optional<RecoveryPolicy> parse_policy(std::string_view name) {
  if (name == "adaptive" || name == "local") return RecoveryPolicy::adaptive_local;
  if (name == "global" || name == "bruteforce") return RecoveryPolicy::global_bruteforce;
  if (name == "replication" || name == "none") return RecoveryPolicy::delay_replication;
  if (name == "greedy") return RecoveryPolicy::greedy_replan;
  return std::nullopt;
}

std::string_view to_string(RecoveryPolicy policy) {
  switch (policy) {
    case RecoveryPolicy::adaptive_local: return "adaptive";
    case RecoveryPolicy::global_bruteforce: return "global";
    case RecoveryPolicy::delay_replication: return "replication";
    case RecoveryPolicy::greedy_replan: return "greedy";
  }
  return "unknown";
}

std::vector<Perturbation> draw_perturbations(const SkywayNetwork& network, NodeId source,
                                             const CompositionPlan& reference,
                                             const PerturbationModel& model) {
  if (auto problems = check_perturbation(model); !problems.empty()) {
    throw Error(Errc::config_invalid, problems.front());
  }
  std::mt19937_64 rng(model.seed);
  std::vector<NodeId> order;
  for (NodeId v = 0; v < network.size(); ++v) {
    if (v != source) order.push_back(v);
  }
  for (std::size_t i = order.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }

  std::vector<double> planned_arrival(network.size(), -1.0);
  for (const PlanLeg& leg : reference.legs) {
    if (planned_arrival[leg.to] < 0.0) planned_arrival[leg.to] = leg.arrive_time;
  }
  const double span = std::max(reference.arrival_time() - reference.start_time, 0.25);

  const auto count = std::min<std::size_t>(
      order.size(), static_cast<std::size_t>(std::lround(model.failure_rate * static_cast<double>(network.size()))));
  std::vector<Perturbation> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    // Every station consumes the same draws whatever the rate, so the set at
    // a higher rate extends the set at a lower one.
    double delay = -model.max_early + unit(rng) * (model.max_early + model.max_late);
    double rush_roll = unit(rng);
    double anchor_roll = unit(rng);
    double lead = unit(rng);
    double length = unit(rng);
    if (i >= count) continue;
    NodeId v = order[i];
    Perturbation p{v, delay, std::nullopt};
    if (rush_roll < model.calendar_shift_intensity) {
      double anchor = planned_arrival[v] >= 0.0 ? planned_arrival[v]
                                                : reference.start_time + anchor_roll * span;
      double start = std::max(0.0, anchor - 0.5 * lead);
      p.pad_rush = Interval{start, start + 0.5 + length};
    }
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const Perturbation& a, const Perturbation& b) { return a.node < b.node; });
  return out;
}

double ExecutionTrace::recompose_seconds() const {
  double s = 0.0;
  for (const auto& e : episodes) s += e.compute_seconds;
  return s;
}

namespace {

// Runtime bookkeeping for one execution.
class Executor {
public:
  Executor(const CompositionPlan& plan, const SkywayNetwork& network, const PlanningContext& ctx,
           std::span<const Perturbation> perturbations, const ExecutionConfig& config)
      : plan_(plan), runtime_(network), ctx_(ctx.rebind(runtime_)), config_(config) {
    delay_.assign(runtime_.size(), 0.0);
    fired_.assign(runtime_.size(), 0);
    for (const Perturbation& p : perturbations) {
      if (p.node >= runtime_.size()) continue;
      delay_[p.node] = p.arrival_delay;
      if (p.pad_rush) apply_rush(p.node, *p.pad_rush);
    }
    trace_.injected.assign(perturbations.begin(), perturbations.end());
  }

  ExecutionTrace run() {
    if (plan_.empty()) throw Error(Errc::invalid_argument, "cannot execute an empty plan");
    const double start = plan_.start_time;
    const double abort_at =
        start + config_.abort_factor * (plan_.arrival_time() - start) + config_.abort_slack;
    const NodeId destination = plan_.terminus();
    trace_.start_time = start;

    double t = start;
    double battery = plan_.start_battery;
    std::size_t pos = 0;
    auto nodes = plan_.nodes();
    bool delivered = false;

    while (pos < plan_.legs.size()) {
      const NodeId here = nodes[pos];
      const NodeId next = nodes[pos + 1];
      const auto flags = recharge_flags(plan_);
      const Arc* arc = runtime_.find_arc(here, next);
      if (arc == nullptr) break;

      bool recharged = false;
      auto recharge_now = [&] {
        RechargeStep r = plan_recharge(ctx_, runtime_.calendar(here), here, t, battery);
        runtime_.calendar(here).reserve(r.begin, r.duration);
        record_recharge(r, t);
        t = r.end();
        battery = kFullBattery;
        recharged = true;
      };
      if (flags[pos] && battery < kFullBattery) recharge_now();
      auto step = try_travel(ctx_, here, *arc, t, battery);
      if (!step && !recharged && battery < kFullBattery) {
        recharge_now();
        step = try_travel(ctx_, here, *arc, t, battery);
      }
      if (!step) break;
      add_wait(step->depart - t);

      double injected = fired_[next] ? 0.0 : delay_[next];
      fired_[next] = 1;
      double flight = step->arrive - step->depart;
      double arrive = std::max(step->arrive + injected, step->depart + 0.5 * flight);
      battery = std::clamp(battery - step->consumed, 0.0, kFullBattery);
      ExecutedLeg leg;
      leg.from = here;
      leg.to = next;
      leg.depart_time = step->depart;
      leg.arrive_time = arrive;
      leg.injected_delay = arrive - step->arrive;
      leg.battery_on_arrival = battery;
      trace_.legs.push_back(leg);
      t = arrive;
      ++pos;

      if (next == destination && pos == plan_.legs.size()) {
        delivered = true;
        break;
      }
      if (t > abort_at || trace_.legs.size() >= config_.max_legs) break;

      const double expected = plan_.legs[pos - 1].arrive_time;
      if (!detect_failure(expected, t, config_.detection_tolerance)) continue;
      trace_.failures.push_back(FailureEvent{next, pos, expected, t, t - expected});
      handle_failure(RuntimeState{pos, t, battery}, t - expected);
      nodes = plan_.nodes();
    }

    trace_.delivered = delivered;
    trace_.final_plan = executed_plan();
    trace_.distance = trace_.final_plan.total_distance;
    trace_.delivery_time = trace_.legs.empty() ? 0.0 : trace_.legs.back().arrive_time - start;
    return std::move(trace_);
  }

private:
  void apply_rush(NodeId node, const Interval& window) {
    PadCalendar& cal = runtime_.calendar(node);
    double duration = window.end - window.start;
    for (std::size_t i = 0; i < cal.pad_count(); ++i) {
      if (cal.next_available(window.start, duration) != window.start) break;
      cal.reserve(window.start, duration);
    }
  }

  void record_recharge(const RechargeStep& r, double ready) {
    double wait = r.begin - ready;
    if (trace_.legs.empty()) {
      trace_.origin_wait += wait;
      trace_.origin_recharge = r.duration;
      trace_.origin_recharge_begin = r.begin;
      origin_pad_wait_ += wait;
    } else {
      ExecutedLeg& leg = trace_.legs.back();
      leg.wait_duration += wait;
      leg.pad_wait += wait;
      leg.recharge_duration = r.duration;
      leg.recharge_begin = r.begin;
    }
  }

  void add_wait(double wait) {
    if (trace_.legs.empty()) {
      trace_.origin_wait += wait;
    } else {
      trace_.legs.back().wait_duration += wait;
    }
  }

  // The executed prefix replaces the planned one so splices see actual times.
  void adopt_executed_prefix(std::size_t pos) {
    plan_.origin_wait = trace_.origin_wait;
    plan_.origin_pad_wait = origin_pad_wait_;
    plan_.origin_recharge = trace_.origin_recharge;
    plan_.origin_recharge_begin = trace_.origin_recharge_begin;
    for (std::size_t k = 0; k < pos; ++k) {
      const ExecutedLeg& e = trace_.legs[k];
      PlanLeg& leg = plan_.legs[k];
      leg.depart_time = e.depart_time;
      leg.arrive_time = e.arrive_time;
      leg.battery_on_arrival = e.battery_on_arrival;
      if (k + 1 == pos) continue;  // the stay here has not happened yet
      leg.wait_duration = e.wait_duration;
      leg.pad_wait = e.pad_wait;
      leg.recharge_duration = e.recharge_duration;
      leg.recharge_begin = e.recharge_begin;
    }
  }

  void replicate(const RuntimeState& at) {
    auto rest = replicate_delay(plan_, at, ctx_);
    if (rest) plan_ = update_plan(plan_, *rest, at.position, ctx_);
  }

  void handle_failure(const RuntimeState& at, double delta) {
    // Planned waits of the not-yet-executed legs drive the delay projection.
    const auto projected = project_delays(plan_, at.position, delta);
    adopt_executed_prefix(at.position);
    if (config_.policy == RecoveryPolicy::delay_replication) {
      replicate(at);
      return;
    }

    RecompositionEpisode episode;
    episode.trigger = plan_.nodes()[at.position];
    episode.position = at.position;
    const auto started = std::chrono::steady_clock::now();
    std::optional<CompositionPlan> fragment;
    try {
      switch (config_.policy) {
        case RecoveryPolicy::adaptive_local: {
          int horizon = failure_analysis(plan_, at.position, projected, congestion_view(plan_, runtime_));
          episode.horizon = horizon;
          fragment = recompose(plan_, at, horizon, ctx_);
          break;
        }
        case RecoveryPolicy::global_bruteforce:
          fragment = recompose_global_bruteforce(plan_, at, ctx_);
          break;
        case RecoveryPolicy::greedy_replan: {
          const auto nodes = plan_.nodes();
          fragment = compose_greedy(ctx_, RouteProblem{nodes[at.position], nodes.back(), at.time,
                                                       at.battery, 0});
          break;
        }
        case RecoveryPolicy::delay_replication:
          break;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::unreachable_destination && e.code() != Errc::dead_end &&
          e.code() != Errc::livelock_guard) {
        throw;
      }
      fragment.reset();
    }
    episode.compute_seconds = elapsed_seconds(started);
    if (fragment) {
      plan_ = update_plan(plan_, *fragment, at.position, ctx_);
    } else {
      episode.fell_back = true;
      replicate(at);
    }
    trace_.episodes.push_back(episode);
  }

  CompositionPlan executed_plan() const {
    CompositionPlan out;
    out.drone = plan_.drone;
    out.start_time = trace_.start_time;
    out.start_battery = plan_.start_battery;
    out.origin_wait = trace_.origin_wait;
    out.origin_pad_wait = origin_pad_wait_;
    out.origin_recharge = trace_.origin_recharge;
    out.origin_recharge_begin = trace_.origin_recharge_begin;
    for (const ExecutedLeg& e : trace_.legs) {
      PlanLeg leg;
      leg.from = e.from;
      leg.to = e.to;
      leg.depart_time = e.depart_time;
      leg.arrive_time = e.arrive_time;
      leg.wait_duration = e.wait_duration;
      leg.pad_wait = e.pad_wait;
      leg.recharge_duration = e.recharge_duration;
      leg.recharge_begin = e.recharge_begin;
      leg.battery_on_arrival = e.battery_on_arrival;
      out.legs.push_back(leg);
    }
    finalize_totals(out, runtime_);
    return out;
  }

  CompositionPlan plan_;
  SkywayNetwork runtime_;
  PlanningContext ctx_;
  ExecutionConfig config_;
  std::vector<double> delay_;
  std::vector<char> fired_;
  double origin_pad_wait_ = 0.0;
  ExecutionTrace trace_;
};

}  // namespace

ExecutionTrace execute_resilient(const CompositionPlan& plan, const SkywayNetwork& network,
                                 const PlanningContext& ctx,
                                 std::span<const Perturbation> perturbations,
                                 const ExecutionConfig& config) {
  return Executor(plan, network, ctx, perturbations, config).run();
}

}  // namespace skyway
