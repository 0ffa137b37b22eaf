#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "skyway/model.hpp"

namespace skyway {

enum class Preference { lower_is_better, higher_is_better };

// Direction per compared QoS attribute. The defaults are the only monotone
// assignment that reproduces the reference drone-service table.
struct QualityDirection {
  Preference flight_time = Preference::lower_is_better;
  Preference flight_range = Preference::higher_is_better;
  Preference recharge_time = Preference::lower_is_better;
};

struct SkylineResult {
  std::set<std::uint32_t> skyline;
  std::map<std::uint32_t, std::uint32_t> dominated;  // dominated id -> one dominator
};

/// Candidates able to lift the package (payload_capacity >= package_weight).
/// Throws Errc::empty_candidate_set when nothing qualifies.
std::vector<DroneSpec> payload_filter(const std::vector<DroneSpec>& candidates, double package_weight);

bool dominates(const DroneSpec& a, const DroneSpec& b, const QualityDirection& dir = {});

/// Block-nested-loop skyline with an unbounded window.
SkylineResult bnl_skyline(const std::vector<DroneSpec>& candidates, const QualityDirection& dir = {});

/// Payload filter, skyline, then the fastest skyline drone (lowest id on ties).
DroneSpec select_drone(const std::vector<DroneSpec>& catalog, double package_weight,
                       const QualityDirection& dir = {});

}  // namespace skyway
