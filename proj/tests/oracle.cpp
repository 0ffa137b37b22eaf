#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skyway::oracle {

namespace {

void dfs(const SkywayNetwork& net, NodeId v, NodeId dst, Path& cur, std::vector<char>& on,
         std::vector<Path>& out) {
  if (v == dst) {
    out.push_back(cur);
    return;
  }
  for (const Arc& a : net.arcs_from(v)) {
    if (on[a.to]) continue;
    on[a.to] = 1;
    cur.push_back(a.to);
    dfs(net, a.to, dst, cur, on, out);
    cur.pop_back();
    on[a.to] = 0;
  }
}

// Smallest s >= t such that [s, s + d) misses every booking on some pad.
double pad_start(const PadCalendar& cal, double t, double d) {
  double best = INFINITY;
  for (std::size_t p = 0; p < cal.pad_count(); ++p) {
    auto busy = cal.pad(p);
    std::vector<double> cands{t};
    for (const Interval& iv : busy) {
      if (iv.end >= t) cands.push_back(iv.end);
    }
    std::sort(cands.begin(), cands.end());
    for (double s : cands) {
      bool clash = std::any_of(busy.begin(), busy.end(),
                               [&](const Interval& iv) { return s < iv.end && iv.start < s + d; });
      if (!clash) {
        best = std::min(best, s);
        break;
      }
    }
  }
  return best;
}

std::size_t epoch_of(const WindField& w, double t) {
  std::size_t e = 0;
  while (e + 1 < w.size() && w.epochs()[e + 1].start <= t) ++e;
  return e;
}

bool before(const Outcome& a, const Outcome& b) {
  if (std::abs(a.arrival - b.arrival) > 1e-9) return a.arrival < b.arrival;
  if (std::abs(a.distance - b.distance) > 1e-9) return a.distance < b.distance;
  if (a.nodes != b.nodes) return a.nodes < b.nodes;
  return a.recharges < b.recharges;
}

}  // namespace

std::vector<Path> paths_recursive(const SkywayNetwork& net, NodeId src, NodeId dst) {
  std::vector<Path> out;
  Path cur{src};
  std::vector<char> on(net.size(), 0);
  on[src] = 1;
  dfs(net, src, dst, cur, on, out);
  return out;
}

std::vector<Path> paths_iterative(const SkywayNetwork& net, NodeId src, NodeId dst) {
  std::vector<Path> out;
  Path cur{src};
  std::vector<std::size_t> cursor{0};
  while (!cur.empty()) {
    NodeId v = cur.back();
    auto arcs = net.arcs_from(v);
    if (v == dst || cursor.back() >= arcs.size()) {
      if (v == dst) out.push_back(cur);
      cur.pop_back();
      cursor.pop_back();
      continue;
    }
    NodeId next = arcs[cursor.back()++].to;
    if (std::find(cur.begin(), cur.end(), next) != cur.end()) continue;
    cur.push_back(next);
    cursor.push_back(0);
  }
  return out;
}

namespace {

struct Leg {
  double distance;
  double course;
};

std::vector<Leg> legs_of(const SkywayNetwork& net, const Path& path) {
  std::vector<Leg> legs;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Point p = net.node(path[i]).position;
    Point q = net.node(path[i + 1]).position;
    double course = std::atan2(q.x - p.x, q.y - p.y) * 180.0 / std::numbers::pi;
    if (course < 0) course += 360.0;
    legs.push_back({std::hypot(q.x - p.x, q.y - p.y), course});
  }
  return legs;
}

// One leg from (t, b); recharging first when `charge` is set and useful.
bool step(const Instance& in, NodeId at, const Leg& leg, bool charge, double& t, double& b,
          char& charged) {
  charged = 0;
  if (charge && b < 100.0) {
    double dur = (100.0 - b) / 100.0 * in.recharge_full;
    t = pad_start(in.network->calendar(at), t, dur) + dur;
    b = 100.0;
    charged = 1;
  }
  for (std::size_t e = epoch_of(in.wind, t); e < in.wind.size(); ++e) {
    auto kin = try_ground_speed(in.air_speed, in.wind.epochs()[e].sample, leg.course);
    if (!kin) continue;
    double use = battery_consumed(leg.distance, in.package_weight, *kin, in.energy);
    if (use > b + 1e-9) continue;
    t = std::max(t, in.wind.epochs()[e].start) + leg.distance / kin->ground_speed;
    b = std::max(0.0, b - use);
    return true;
  }
  return false;
}

struct Walker {
  const Instance& in;
  const Path& path;
  std::vector<Leg> legs;
  Outcome cur;
  std::optional<Outcome>& best;

  void go(std::size_t i, double t, double b) {
    if (i == legs.size()) {
      cur.arrival = t;
      if (!best || before(cur, *best)) best = cur;
      return;
    }
    for (bool charge : {false, true}) {
      if (charge && b >= 100.0) continue;  // same timeline as not charging
      double t2 = t, b2 = b;
      char flag = 0;
      if (!step(in, path[i], legs[i], charge, t2, b2, flag)) continue;
      cur.recharges.push_back(flag);
      cur.distance += legs[i].distance;
      go(i + 1, t2, b2);
      cur.distance -= legs[i].distance;
      cur.recharges.pop_back();
    }
  }
};

}  // namespace

std::optional<Outcome> fly(const Instance& in, const Path& path, std::uint64_t mask) {
  Outcome o;
  o.nodes = path;
  double t = in.start_time;
  double b = 100.0;
  auto legs = legs_of(*in.network, path);
  for (std::size_t i = 0; i < legs.size(); ++i) {
    char flag = 0;
    if (!step(in, path[i], legs[i], (mask >> i) & 1, t, b, flag)) return std::nullopt;
    o.distance += legs[i].distance;
    o.recharges.push_back(flag);
  }
  o.arrival = t;
  return o;
}

std::optional<Outcome> optimum(const Instance& in, const std::vector<Path>& paths) {
  std::optional<Outcome> best;
  for (const Path& path : paths) {
    Walker w{in, path, legs_of(*in.network, path), Outcome{0.0, 0.0, path, {}}, best};
    w.go(0, in.start_time, 100.0);
  }
  return best;
}

}  // namespace skyway::oracle
