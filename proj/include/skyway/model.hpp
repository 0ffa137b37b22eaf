#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skyway {

using NodeId = std::uint32_t;

/// Time is hours since the scenario epoch, distance is km, battery is percent.
inline constexpr double kFullBattery = 100.0;
inline constexpr double kTimeEps = 1e-9;

struct DroneSpec {
  std::uint32_t id = 0;
  std::string name;
  double payload_capacity = 0.0;    // kg
  double flight_time = 0.0;         // minutes at full charge
  double flight_range = 0.0;        // km at full charge
  double speed = 0.0;               // km/h air speed
  double recharge_time_full = 0.0;  // hours for 0 -> 100 %
};

/// Empty when the spec is self-consistent; otherwise one message per problem.
std::vector<std::string> check_drone(const DroneSpec& drone);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Compass bearing from `from` toward `to`, degrees in [0, 360). North is +y, east is +x.
double bearing(Point from, Point to);

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

// Occupancy of the recharging pads of one station. Each pad holds a sorted
// list of disjoint half-open intervals.
class PadCalendar {
public:
  explicit PadCalendar(std::size_t pad_count = 1);

  std::size_t pad_count() const noexcept { return pads_.size(); }
  std::span<const Interval> pad(std::size_t index) const { return pads_.at(index); }

  /// Earliest t' >= t such that some pad is free over [t', t' + duration).
  double next_available(double t, double duration) const;

  /// Books [t, t + duration) on the lowest-index free pad and returns that pad index.
  /// Throws Errc::reservation_conflict when no pad is free for the whole interval.
  std::size_t reserve(double t, double duration);

  /// Removes an interval previously booked with exactly these bounds.
  /// Books exactly [start, end) on one pad; throws Errc::reservation_conflict on overlap.
  void reserve_on(std::size_t index, double start, double end);
  bool release(double start, double end);

  bool pad_free(std::size_t index, double t, double duration) const;
  std::size_t occupancy(double t) const;
  bool all_busy(double t) const { return occupancy(t) >= pad_count(); }
  bool empty() const;

private:
  std::vector<std::vector<Interval>> pads_;
};

double next_pad_available(const PadCalendar& calendar, double t, double duration);
PadCalendar reserve_pad(PadCalendar calendar, double t, double duration);

struct Node {
  NodeId id = 0;
  Point position;
  std::size_t pad_count = 1;
  PadCalendar calendar;
};

struct SkywaySegment {
  NodeId a = 0;
  NodeId b = 0;
  double distance = 0.0;  // km
  double bearing = 0.0;   // degrees, a -> b
};

/// One direction of a segment, as seen from its tail node.
struct Arc {
  NodeId to = 0;
  std::size_t segment = 0;
  std::size_t index = 0;  // dense directed-arc index in [0, 2 * segment_count)
  double distance = 0.0;
  double bearing = 0.0;
};

class SkywayNetwork {
public:
  NodeId add_node(Point position, std::size_t pad_count);
  std::size_t add_segment(NodeId a, NodeId b);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t arc_count() const noexcept { return 2 * segments_.size(); }

  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<SkywaySegment>& segments() const noexcept { return segments_; }
  std::span<const Arc> arcs_from(NodeId id) const { return adjacency_.at(id); }
  const Arc* find_arc(NodeId from, NodeId to) const;

  PadCalendar& calendar(NodeId id) { return nodes_.at(id).calendar; }
  const PadCalendar& calendar(NodeId id) const { return nodes_.at(id).calendar; }

  double straight_line(NodeId a, NodeId b) const;
  bool connected() const;

  /// Drops every pad booking, keeping nodes and segments.
  void clear_calendars();

private:
  std::vector<Node> nodes_;
  std::vector<SkywaySegment> segments_;
  std::vector<std::vector<Arc>> adjacency_;
};

struct DeliveryRequest {
  NodeId source = 0;
  NodeId destination = 0;
  double package_weight = 0.0;  // kg
  double start_time = 0.0;      // hours
};

// One flown segment. wait/recharge describe the stay at `to` before the next
// departure; pad_wait is the part of the wait spent queueing for a pad.
struct PlanLeg {
  NodeId from = 0;
  NodeId to = 0;
  double depart_time = 0.0;
  double arrive_time = 0.0;
  double wait_duration = 0.0;
  double pad_wait = 0.0;
  double recharge_duration = 0.0;
  double recharge_begin = 0.0;  // absolute start of the pad booking when recharging
  double battery_on_arrival = 0.0;

  double ready_time() const { return arrive_time + wait_duration + recharge_duration; }
};

struct CompositionPlan {
  std::uint32_t drone = 0;
  double start_time = 0.0;
  double start_battery = kFullBattery;
  // Stay at the origin before the first departure.
  double origin_wait = 0.0;
  double origin_pad_wait = 0.0;
  double origin_recharge = 0.0;
  double origin_recharge_begin = 0.0;
  std::vector<PlanLeg> legs;
  double total_delivery_time = 0.0;  // last arrival - first departure
  double total_distance = 0.0;

  bool empty() const noexcept { return legs.empty(); }
  NodeId origin() const { return legs.front().from; }
  NodeId terminus() const { return legs.back().to; }
  double arrival_time() const { return legs.empty() ? start_time : legs.back().arrive_time; }

  /// Node sequence: origin followed by each leg's head.
  std::vector<NodeId> nodes() const;
  std::size_t recharge_count() const;
};

/// Recomputes total_distance and total_delivery_time from the legs.
void finalize_totals(CompositionPlan& plan, const SkywayNetwork& network);

std::vector<std::string> validate_plan(const CompositionPlan& plan, const SkywayNetwork& network,
                                       const DeliveryRequest& request);

/// Books every recharge of `plan` at node positions >= first_stay. Position 0 is the origin
/// stay; position k >= 1 is the stay recorded on legs[k - 1].
void commit_reservations(const CompositionPlan& plan, SkywayNetwork& network,
                         std::size_t first_stay = 0);
/// Inverse of commit_reservations; bookings that are already absent are skipped.
void release_reservations(const CompositionPlan& plan, SkywayNetwork& network,
                          std::size_t first_stay = 0);

/// Largest number of simultaneously booked pads at any node; used by capacity checks.
std::size_t max_pad_overlap(const PadCalendar& calendar);

}  // namespace skyway
