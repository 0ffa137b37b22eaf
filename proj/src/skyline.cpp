#include "skyway/skyline.hpp"

#include <algorithm>
#include <list>

#include "skyway/error.hpp"

namespace skyway {

namespace {

// -1: a better, 0: equal, +1: b better.
int compare(double a, double b, Preference pref) {
  if (a == b) return 0;
  bool a_better = pref == Preference::lower_is_better ? a < b : a > b;
  return a_better ? -1 : 1;
}

}  // namespace

std::vector<DroneSpec> payload_filter(const std::vector<DroneSpec>& candidates, double package_weight) {
  if (!(package_weight > 0.0)) throw Error(Errc::invalid_argument, "package weight must be positive");
  std::vector<DroneSpec> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
               [&](const DroneSpec& d) { return d.payload_capacity >= package_weight; });
  if (out.empty()) throw Error(Errc::empty_candidate_set, "no drone can carry the package");
  return out;
}

bool dominates(const DroneSpec& a, const DroneSpec& b, const QualityDirection& dir) {
  const int c[] = {compare(a.flight_time, b.flight_time, dir.flight_time),
                   compare(a.flight_range, b.flight_range, dir.flight_range),
                   compare(a.recharge_time_full, b.recharge_time_full, dir.recharge_time)};
  bool strict = false;
  for (int v : c) {
    if (v > 0) return false;
    strict = strict || v < 0;
  }
  return strict;
}

SkylineResult bnl_skyline(const std::vector<DroneSpec>& candidates, const QualityDirection& dir) {
  if (candidates.empty()) throw Error(Errc::invalid_argument, "skyline needs at least one candidate");

  // Window of mutually incomparable services seen so far.
  std::list<const DroneSpec*> window;
  SkylineResult result;
  for (const DroneSpec& s : candidates) {
    bool dominated = false;
    for (auto it = window.begin(); it != window.end();) {
      if (dominates(**it, s, dir)) {
        result.dominated[s.id] = (*it)->id;
        dominated = true;
        break;
      }
      if (dominates(s, **it, dir)) {
        result.dominated[(*it)->id] = s.id;
        it = window.erase(it);
      } else {
        ++it;
      }
    }
    if (!dominated) window.push_back(&s);
  }
  for (const DroneSpec* s : window) result.skyline.insert(s->id);
  return result;
}

DroneSpec select_drone(const std::vector<DroneSpec>& catalog, double package_weight,
                       const QualityDirection& dir) {
  auto admitted = payload_filter(catalog, package_weight);
  auto sky = bnl_skyline(admitted, dir);
  const DroneSpec* best = nullptr;
  for (const DroneSpec& d : admitted) {
    if (!sky.skyline.contains(d.id)) continue;
    if (best == nullptr || d.speed > best->speed || (d.speed == best->speed && d.id < best->id)) {
      best = &d;
    }
  }
  return *best;
}

}  // namespace skyway
