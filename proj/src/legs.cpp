#include "skyway/legs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "skyway/error.hpp"
#include "skyway/kernels.hpp"

namespace skyway {

LegTable::LegTable(const SkywayNetwork& network, const WindField& wind, double air_speed,
                   double energy_per_km)
    : arcs_(network.arc_count()) {
  std::vector<double> tx(arcs_), ty(arcs_), dist(arcs_);
  for (NodeId v = 0; v < network.size(); ++v) {
    for (const Arc& arc : network.arcs_from(v)) {
      double rad = arc.bearing * std::numbers::pi / 180.0;
      tx[arc.index] = std::sin(rad);
      ty[arc.index] = std::cos(rad);
      dist[arc.index] = arc.distance;
    }
  }
  const std::size_t epochs = wind.size();
  gs_.resize(epochs * arcs_);
  time_.resize(epochs * arcs_);
  cons_.resize(epochs * arcs_);
  for (std::size_t e = 0; e < epochs; ++e) {
    const WindSample& w = wind.epochs()[e].sample;
    double rad = w.bearing * std::numbers::pi / 180.0;
    kernels::WindParams params{air_speed, w.speed, std::sin(rad), std::cos(rad), energy_per_km};
    std::span<double> gs(gs_.data() + e * arcs_, arcs_);
    std::span<double> tt(time_.data() + e * arcs_, arcs_);
    std::span<double> cc(cons_.data() + e * arcs_, arcs_);
    kernels::arc_kinematics(params, {tx, ty, dist}, {gs, tt, cc});
  }
  min_cons_.assign(arcs_, std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t a = 0; a < arcs_; ++a) {
      if (std::isfinite(travel_time(e, a))) min_cons_[a] = std::min(min_cons_[a], consumption(e, a));
    }
  }
}

PlanningContext::PlanningContext(const SkywayNetwork& network, DroneSpec drone, WindField wind,
                                 double package_weight, EnergyModel energy, PlannerConfig config)
    : network_(&network),
      drone_(std::move(drone)),
      wind_(std::move(wind)),
      weight_(package_weight),
      energy_(energy),
      config_(config) {
  if (!(drone_.speed > 0.0) || !(drone_.recharge_time_full > 0.0)) {
    throw Error(Errc::invalid_argument, "drone needs positive speed and recharge time");
  }
  if (!(package_weight > 0.0)) throw Error(Errc::invalid_argument, "package weight must be positive");
  table_ = LegTable(network, wind_, drone_.speed, energy_.calm_rate(weight_));
}

PlanningContext PlanningContext::rebind(const SkywayNetwork& network) const {
  PlanningContext copy = *this;
  copy.network_ = &network;
  return copy;
}

std::optional<TravelStep> try_travel(const PlanningContext& ctx, NodeId from, const Arc& arc,
                                     double ready, double battery) {
  return try_travel(ctx, from, arc, ready, battery, ctx.wind().epoch_index(ready));
}

std::optional<TravelStep> try_travel(const PlanningContext& ctx, NodeId from, const Arc& arc,
                                     double ready, double battery, std::size_t epoch) {
  const WindField& wind = ctx.wind();
  const double budget = battery - ctx.config().battery_reserve + 1e-9;
  for (std::size_t e = epoch; e < wind.size(); ++e) {
    double time = ctx.table().travel_time(e, arc.index);
    double cons = ctx.table().consumption(e, arc.index);
    if (!std::isfinite(time) || cons > budget) continue;
    double depart = std::max(ready, wind.epochs()[e].start);
    return TravelStep{from, arc.to, ready, depart, depart + time, cons, arc.distance};
  }
  return std::nullopt;
}

RechargeStep plan_recharge(const PlanningContext& ctx, const PadCalendar& calendar, NodeId node,
                           double arrive, double battery) {
  double duration = (kFullBattery - battery) / kFullBattery * ctx.drone().recharge_time_full;
  double begin = calendar.next_available(arrive, duration);
  return RechargeStep{node, arrive, begin, duration};
}

PlanBuilder::PlanBuilder(std::uint32_t drone, NodeId origin, double start_time, double start_battery)
    : node_(origin), time_(start_time), battery_(start_battery) {
  plan_.drone = drone;
  plan_.start_time = start_time;
  plan_.start_battery = start_battery;
}

void PlanBuilder::recharge(const RechargeStep& step) {
  double wait = step.begin - time_;
  if (plan_.legs.empty()) {
    plan_.origin_wait += wait;
    plan_.origin_pad_wait += wait;
    plan_.origin_recharge = step.duration;
    plan_.origin_recharge_begin = step.begin;
  } else {
    PlanLeg& leg = plan_.legs.back();
    leg.wait_duration += wait;
    leg.pad_wait += wait;
    leg.recharge_duration = step.duration;
    leg.recharge_begin = step.begin;
  }
  time_ = step.end();
  battery_ = kFullBattery;
}

void PlanBuilder::travel(const TravelStep& step) {
  double wind_wait = step.depart - time_;
  if (plan_.legs.empty()) {
    plan_.origin_wait += wind_wait;
  } else {
    plan_.legs.back().wait_duration += wind_wait;
  }
  PlanLeg leg;
  leg.from = step.from;
  leg.to = step.to;
  leg.depart_time = step.depart;
  leg.arrive_time = step.arrive;
  leg.battery_on_arrival = std::clamp(battery_ - step.consumed, 0.0, kFullBattery);
  plan_.legs.push_back(leg);
  node_ = step.to;
  time_ = step.arrive;
  battery_ = leg.battery_on_arrival;
  distance_ += step.distance;
}

CompositionPlan PlanBuilder::finish(const SkywayNetwork& network) && {
  finalize_totals(plan_, network);
  return std::move(plan_);
}

std::optional<CompositionPlan> replay_route(const PlanningContext& ctx, std::span<const NodeId> nodes,
                                            std::span<const char> recharge_at, double start_time,
                                            double start_battery) {
  if (nodes.size() < 2) return std::nullopt;
  const SkywayNetwork& net = ctx.network();
  PlanBuilder builder(ctx.drone().id, nodes.front(), start_time, start_battery);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Arc* arc = net.find_arc(nodes[i], nodes[i + 1]);
    if (arc == nullptr) return std::nullopt;
    bool recharged = false;
    auto recharge_here = [&] {
      builder.recharge(plan_recharge(ctx, net.calendar(nodes[i]), nodes[i], builder.time(),
                                     builder.battery()));
      recharged = true;
    };
    if (i < recharge_at.size() && recharge_at[i] && builder.battery() < kFullBattery) recharge_here();
    auto step = try_travel(ctx, nodes[i], *arc, builder.time(), builder.battery());
    if (!step && !recharged && builder.battery() < kFullBattery) {
      recharge_here();
      step = try_travel(ctx, nodes[i], *arc, builder.time(), builder.battery());
    }
    if (!step) return std::nullopt;
    builder.travel(*step);
  }
  return std::move(builder).finish(net);
}

std::vector<char> recharge_flags(const CompositionPlan& plan) {
  std::vector<char> flags(plan.legs.size() + 1, 0);
  flags[0] = plan.origin_recharge > 0.0 ? 1 : 0;
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    flags[k + 1] = plan.legs[k].recharge_duration > 0.0 ? 1 : 0;
  }
  return flags;
}

}  // namespace skyway
