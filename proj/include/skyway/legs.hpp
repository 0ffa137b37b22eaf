#pragma once

// Shared leg mechanics used by every planner, the recomposer and the runtime
// executor: wind-adjusted travel with waits for a flyable wind epoch, pad
// queueing before a recharge, and a builder that turns those steps into a
// CompositionPlan.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skyway/model.hpp"
#include "skyway/wind.hpp"

namespace skyway {

struct PlannerConfig {
  int lookahead_depth = 1;
  std::size_t bruteforce_node_limit = 12;
  int greedy_revisit_limit = 3;
  double battery_reserve = 0.0;  // percent kept after every leg
  std::size_t expansion_budget = 2'000'000;
};

// Per-epoch, per-arc wind kinematics, filled by the batched kernel.
class LegTable {
public:
  LegTable() = default;
  LegTable(const SkywayNetwork& network, const WindField& wind, double air_speed,
           double energy_per_km);

  double ground_speed(std::size_t epoch, std::size_t arc) const { return gs_[epoch * arcs_ + arc]; }
  double travel_time(std::size_t epoch, std::size_t arc) const { return time_[epoch * arcs_ + arc]; }
  double consumption(std::size_t epoch, std::size_t arc) const { return cons_[epoch * arcs_ + arc]; }
  // Cheapest flyable crossing of `arc` over all epochs; infinity if none.
  double min_consumption(std::size_t arc) const { return min_cons_[arc]; }

private:
  std::size_t arcs_ = 0;
  std::vector<double> min_cons_;
  std::vector<double> gs_;
  std::vector<double> time_;
  std::vector<double> cons_;
};

// Everything a planner needs about one delivery. The network is referenced,
// not copied: its pad calendars are read at call time.
class PlanningContext {
public:
  PlanningContext(const SkywayNetwork& network, DroneSpec drone, WindField wind,
                  double package_weight, EnergyModel energy = {}, PlannerConfig config = {});

  const SkywayNetwork& network() const noexcept { return *network_; }
  const DroneSpec& drone() const noexcept { return drone_; }
  const WindField& wind() const noexcept { return wind_; }
  double package_weight() const noexcept { return weight_; }
  const EnergyModel& energy() const noexcept { return energy_; }
  const PlannerConfig& config() const noexcept { return config_; }
  PlannerConfig& config() noexcept { return config_; }
  const LegTable& table() const noexcept { return table_; }

  /// Best possible ground speed under this wind field; bounds remaining time from below.
  double max_ground_speed() const noexcept { return drone_.speed + wind_.max_speed(); }

  /// Same context reading a different network (e.g. a runtime copy).
  PlanningContext rebind(const SkywayNetwork& network) const;

private:
  const SkywayNetwork* network_;
  DroneSpec drone_;
  WindField wind_;
  double weight_;
  EnergyModel energy_;
  PlannerConfig config_;
  LegTable table_;
};

struct TravelStep {
  NodeId from = 0;
  NodeId to = 0;
  double ready = 0.0;      // time the drone could leave
  double depart = 0.0;     // ready + wait for a flyable wind epoch
  double arrive = 0.0;
  double consumed = 0.0;   // percent
  double distance = 0.0;
};

struct RechargeStep {
  NodeId node = 0;
  double arrive = 0.0;
  double begin = 0.0;     // pad booking start
  double duration = 0.0;
  double end() const { return begin + duration; }
};

/// Earliest flight over `arc` leaving no sooner than `ready` with `battery`
/// percent on board. Departure slides to a later wind epoch when the current
/// one is unflyable or too costly; nullopt when no epoch works.
std::optional<TravelStep> try_travel(const PlanningContext& ctx, NodeId from, const Arc& arc,
                                     double ready, double battery);
/// Same, with the wind epoch containing `ready` already looked up.
std::optional<TravelStep> try_travel(const PlanningContext& ctx, NodeId from, const Arc& arc,
                                     double ready, double battery, std::size_t epoch);

/// Charge-to-full at `node`, queueing for the first pad that stays free for
/// the whole charge.
RechargeStep plan_recharge(const PlanningContext& ctx, const PadCalendar& calendar, NodeId node,
                           double arrive, double battery);

// Accumulates travel and recharge steps into a CompositionPlan.
class PlanBuilder {
public:
  PlanBuilder(std::uint32_t drone, NodeId origin, double start_time, double start_battery);

  NodeId node() const noexcept { return node_; }
  double time() const noexcept { return time_; }
  double battery() const noexcept { return battery_; }
  double distance() const noexcept { return distance_; }
  std::size_t leg_count() const noexcept { return plan_.legs.size(); }

  void recharge(const RechargeStep& step);
  void travel(const TravelStep& step);

  CompositionPlan finish(const SkywayNetwork& network) &&;

private:
  CompositionPlan plan_;
  NodeId node_;
  double time_;
  double battery_;
  double distance_ = 0.0;
};

/// Flies a fixed node sequence from (time, battery), recharging where
/// `recharge_at[i]` is set (position i in `nodes`) and additionally whenever
/// the next leg cannot be flown on the remaining charge. Returns nullopt when
/// some leg cannot be flown even on a full battery.
std::optional<CompositionPlan> replay_route(const PlanningContext& ctx, std::span<const NodeId> nodes,
                                            std::span<const char> recharge_at, double start_time,
                                            double start_battery);

/// Per-position recharge flags of a plan (position 0 is the origin stay).
std::vector<char> recharge_flags(const CompositionPlan& plan);

}  // namespace skyway
