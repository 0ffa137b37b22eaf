#include "skyway/model.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "skyway/error.hpp"

namespace skyway {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::config_invalid: return "config-invalid";
    case Errc::instance_too_large: return "instance-too-large";
    case Errc::unreachable_destination: return "unreachable-destination";
    case Errc::reservation_conflict: return "reservation-conflict";
    case Errc::infeasible_wind: return "infeasible-wind";
    case Errc::dead_end: return "dead-end";
    case Errc::livelock_guard: return "livelock-guard";
    case Errc::splice_mismatch: return "splice-mismatch";
    case Errc::empty_candidate_set: return "empty-candidate-set";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

std::vector<std::string> check_drone(const DroneSpec& d) {
  std::vector<std::string> problems;
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0)) problems.push_back(std::string(field) + " must be positive");
  };
  positive(d.payload_capacity, "payload_capacity");
  positive(d.flight_time, "flight_time");
  positive(d.flight_range, "flight_range");
  positive(d.speed, "speed");
  positive(d.recharge_time_full, "recharge_time_full");
  if (problems.empty() && d.flight_range > d.speed * d.flight_time / 60.0 * 1.05) {
    problems.push_back("flight_range exceeds speed * flight_time");
  }
  return problems;
}

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

double bearing(Point from, Point to) {
  double deg = std::atan2(to.x - from.x, to.y - from.y) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

// ---------------------------------------------------------------------------
// PadCalendar

namespace {

bool overlaps(const Interval& iv, double start, double end) { return start < iv.end && iv.start < end; }

// Earliest start >= t on a single pad that fits `duration`.
double earliest_on_pad(const std::vector<Interval>& pad, double t, double duration) {
  double cur = t;
  for (const Interval& iv : pad) {
    if (iv.end <= cur) continue;
    if (iv.start >= cur + duration) break;
    cur = iv.end;
  }
  return cur;
}

}  // namespace

PadCalendar::PadCalendar(std::size_t pad_count) : pads_(pad_count) {
  if (pad_count == 0) throw Error(Errc::invalid_argument, "a station needs at least one pad");
}

double PadCalendar::next_available(double t, double duration) const {
  if (duration < 0.0) throw Error(Errc::invalid_argument, "negative pad duration");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pad : pads_) best = std::min(best, earliest_on_pad(pad, t, duration));
  return best;
}

bool PadCalendar::pad_free(std::size_t index, double t, double duration) const {
  const auto& pad = pads_.at(index);
  double end = t + duration;
  auto it = std::lower_bound(pad.begin(), pad.end(), t,
                             [](const Interval& iv, double v) { return iv.end <= v; });
  return it == pad.end() || !overlaps(*it, t, end);
}

std::size_t PadCalendar::reserve(double t, double duration) {
  if (!(duration > 0.0)) throw Error(Errc::invalid_argument, "reservation needs a positive duration");
  for (std::size_t i = 0; i < pads_.size(); ++i) {
    if (!pad_free(i, t, duration)) continue;
    auto& pad = pads_[i];
    Interval iv{t, t + duration};
    auto pos = std::lower_bound(pad.begin(), pad.end(), iv.start,
                                [](const Interval& a, double v) { return a.start < v; });
    pad.insert(pos, iv);
    return i;
  }
  std::ostringstream msg;
  msg << "no pad free for [" << t << ", " << t + duration << ")";
  throw Error(Errc::reservation_conflict, msg.str());
}

void PadCalendar::reserve_on(std::size_t index, double start, double end) {
  if (!(end > start)) throw Error(Errc::invalid_argument, "reservation needs a positive duration");
  auto& pad = pads_.at(index);
  auto pos = std::lower_bound(pad.begin(), pad.end(), start,
                              [](const Interval& a, double v) { return a.start < v; });
  bool clash = (pos != pad.end() && pos->start < end) || (pos != pad.begin() && std::prev(pos)->end > start);
  if (clash) throw Error(Errc::reservation_conflict, "pad already booked in that window");
  pad.insert(pos, Interval{start, end});
}

bool PadCalendar::release(double start, double end) {
  for (auto& pad : pads_) {
    auto it = std::find_if(pad.begin(), pad.end(), [&](const Interval& iv) {
      return iv.start == start && iv.end == end;
    });
    if (it != pad.end()) {
      pad.erase(it);
      return true;
    }
  }
  return false;
}

std::size_t PadCalendar::occupancy(double t) const {
  std::size_t busy = 0;
  for (const auto& pad : pads_) {
    for (const Interval& iv : pad) {
      if (iv.start > t) break;
      if (t < iv.end) {
        ++busy;
        break;
      }
    }
  }
  return busy;
}

bool PadCalendar::empty() const {
  return std::all_of(pads_.begin(), pads_.end(), [](const auto& p) { return p.empty(); });
}

double next_pad_available(const PadCalendar& calendar, double t, double duration) {
  return calendar.next_available(t, duration);
}

PadCalendar reserve_pad(PadCalendar calendar, double t, double duration) {
  calendar.reserve(t, duration);
  return calendar;
}

std::size_t max_pad_overlap(const PadCalendar& calendar) {
  std::vector<std::pair<double, int>> events;
  for (std::size_t p = 0; p < calendar.pad_count(); ++p) {
    for (const Interval& iv : calendar.pad(p)) {
      events.emplace_back(iv.start, +1);
      events.emplace_back(iv.end, -1);
    }
  }
  // Ends sort before starts at the same instant: intervals are half-open.
  std::sort(events.begin(), events.end());
  int cur = 0;
  int best = 0;
  for (const auto& [t, delta] : events) {
    cur += delta;
    best = std::max(best, cur);
  }
  return static_cast<std::size_t>(best);
}

// ---------------------------------------------------------------------------
// SkywayNetwork

NodeId SkywayNetwork::add_node(Point position, std::size_t pad_count) {
  for (const Node& n : nodes_) {
    if (n.position.x == position.x && n.position.y == position.y) {
      throw Error(Errc::invalid_argument, "duplicate node position");
    }
  }
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, position, pad_count, PadCalendar(pad_count)});
  adjacency_.emplace_back();
  return id;
}

std::size_t SkywayNetwork::add_segment(NodeId a, NodeId b) {
  if (a >= size() || b >= size()) throw Error(Errc::invalid_argument, "segment endpoint does not exist");
  if (a == b) throw Error(Errc::invalid_argument, "self-loop segment");
  if (find_arc(a, b) != nullptr) throw Error(Errc::invalid_argument, "duplicate segment");
  Point pa = nodes_[a].position;
  Point pb = nodes_[b].position;
  std::size_t seg = segments_.size();
  double d = distance(pa, pb);
  segments_.push_back(SkywaySegment{a, b, d, bearing(pa, pb)});
  adjacency_[a].push_back(Arc{b, seg, 2 * seg, d, bearing(pa, pb)});
  adjacency_[b].push_back(Arc{a, seg, 2 * seg + 1, d, bearing(pb, pa)});
  for (NodeId v : {a, b}) {
    std::sort(adjacency_[v].begin(), adjacency_[v].end(),
              [](const Arc& x, const Arc& y) { return x.to < y.to; });
  }
  return seg;
}

const Arc* SkywayNetwork::find_arc(NodeId from, NodeId to) const {
  if (from >= size()) return nullptr;
  for (const Arc& arc : adjacency_[from]) {
    if (arc.to == to) return &arc;
  }
  return nullptr;
}

double SkywayNetwork::straight_line(NodeId a, NodeId b) const {
  return distance(nodes_.at(a).position, nodes_.at(b).position);
}

bool SkywayNetwork::connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop();
    for (const Arc& arc : adjacency_[v]) {
      if (!seen[arc.to]) {
        seen[arc.to] = 1;
        ++count;
        frontier.push(arc.to);
      }
    }
  }
  return count == nodes_.size();
}

void SkywayNetwork::clear_calendars() {
  for (Node& n : nodes_) n.calendar = PadCalendar(n.pad_count);
}

// ---------------------------------------------------------------------------
// Plans

std::vector<NodeId> CompositionPlan::nodes() const {
  std::vector<NodeId> out;
  if (legs.empty()) return out;
  out.reserve(legs.size() + 1);
  out.push_back(legs.front().from);
  for (const PlanLeg& leg : legs) out.push_back(leg.to);
  return out;
}

std::size_t CompositionPlan::recharge_count() const {
  std::size_t n = origin_recharge > 0.0 ? 1 : 0;
  for (const PlanLeg& leg : legs) n += leg.recharge_duration > 0.0 ? 1 : 0;
  return n;
}

void finalize_totals(CompositionPlan& plan, const SkywayNetwork& network) {
  double dist = 0.0;
  for (const PlanLeg& leg : plan.legs) {
    const Arc* arc = network.find_arc(leg.from, leg.to);
    dist += arc != nullptr ? arc->distance : network.straight_line(leg.from, leg.to);
  }
  plan.total_distance = dist;
  plan.total_delivery_time =
      plan.legs.empty() ? 0.0 : plan.legs.back().arrive_time - plan.legs.front().depart_time;
}

std::vector<std::string> validate_plan(const CompositionPlan& plan, const SkywayNetwork& network,
                                       const DeliveryRequest& request) {
  std::vector<std::string> out;
  if (plan.legs.empty()) {
    out.emplace_back("empty plan");
    return out;
  }
  auto at_leg = [](const char* what, std::size_t k) {
    return std::string(what) + " at leg " + std::to_string(k + 1);
  };
  if (plan.legs.front().from != request.source) out.emplace_back("source mismatch");
  if (plan.legs.back().to != request.destination) out.emplace_back("destination mismatch");

  double dist = 0.0;
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    const PlanLeg& leg = plan.legs[k];
    if (k > 0 && plan.legs[k - 1].to != leg.from) out.push_back(at_leg("chain break", k));
    const Arc* arc = network.find_arc(leg.from, leg.to);
    if (arc == nullptr) {
      out.push_back(at_leg("missing segment", k));
    } else {
      dist += arc->distance;
    }
    if (!(leg.arrive_time > leg.depart_time)) out.push_back(at_leg("non-positive flight time", k));
    if (leg.wait_duration < 0.0 || leg.recharge_duration < 0.0 || leg.pad_wait < 0.0 ||
        leg.pad_wait > leg.wait_duration + kTimeEps) {
      out.push_back(at_leg("negative stay", k));
    }
    if (leg.battery_on_arrival < 0.0 || leg.battery_on_arrival > kFullBattery) {
      out.push_back(at_leg("battery out of range", k));
    }
    if (k > 0) {
      double expected = plan.legs[k - 1].ready_time();
      if (std::abs(expected - leg.depart_time) > 1e-7) out.push_back(at_leg("timing gap", k));
    }
  }
  if (std::abs(dist - plan.total_distance) > 1e-6 * std::max(1.0, dist)) {
    out.emplace_back("distance aggregation mismatch");
  }
  double span = plan.legs.back().arrive_time - plan.legs.front().depart_time;
  if (std::abs(span - plan.total_delivery_time) > 1e-7) {
    out.emplace_back("delivery time aggregation mismatch");
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_recharge(const CompositionPlan& plan, std::size_t first_stay, Fn&& fn) {
  if (plan.legs.empty()) return;
  if (first_stay == 0 && plan.origin_recharge > 0.0) {
    fn(plan.legs.front().from, plan.origin_recharge_begin, plan.origin_recharge);
  }
  for (std::size_t k = std::max<std::size_t>(first_stay, 1); k <= plan.legs.size(); ++k) {
    const PlanLeg& leg = plan.legs[k - 1];
    if (leg.recharge_duration > 0.0) {
      fn(leg.to, leg.recharge_begin, leg.recharge_duration);
    }
  }
}

}  // namespace

void commit_reservations(const CompositionPlan& plan, SkywayNetwork& network, std::size_t first_stay) {
  for_each_recharge(plan, first_stay, [&](NodeId node, double start, double duration) {
    network.calendar(node).reserve(start, duration);
  });
}

void release_reservations(const CompositionPlan& plan, SkywayNetwork& network, std::size_t first_stay) {
  for_each_recharge(plan, first_stay, [&](NodeId node, double start, double duration) {
    network.calendar(node).release(start, start + duration);
  });
}

}  // namespace skyway
