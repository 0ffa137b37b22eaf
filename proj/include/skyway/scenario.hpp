#pragma once
// Synthetic delivery scenarios and their JSON representation.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skyway/model.hpp"
#include "skyway/resilience.hpp"
#include "skyway/wind.hpp"

namespace skyway {

struct WindTimelineConfig {
  std::size_t epochs = 48;
  double epoch_hours = 1.0;
  double max_speed = 25.0;      // km/h, uniform in [0, max_speed]
  double bearing_drift = 30.0;  // degrees per epoch, uniform in [-drift, drift]
};

struct ScenarioConfig {
  std::size_t node_count = 20;
  std::size_t pads_per_node = 5;
  std::size_t drone_count = 60;
  std::size_t request_count = 1;
  double battery_rate = 25.0;  // percent per 10 km at 1 kg
  double failure_rate = 0.3;
  std::uint64_t seed = 1;
  double area_km = 40.0;
  double min_node_gap_km = 0.5;
  double max_segment_km = 18.0;
  double min_trip_fraction = 0.5;  // of area_km, source to destination
  double package_weight_min = 0.2;
  double package_weight_max = 1.2;
  double start_time_max = 4.0;   // hours
  double hotspot_fraction = 0.3;
  double hotspot_utilization = 0.6;
  double base_utilization = 0.2;
  double booking_min_h = 0.25;  // background pad bookings, hours
  double booking_max_h = 1.25;
  WindTimelineConfig wind;
  double calendar_shift_intensity = 0.5;

  /// Runs per experiment cell: 10 % of the node count, at least one.
  std::size_t runs_per_point() const;
};

/// Human-readable problems with `config`; empty when valid.
std::vector<std::string> check_config(const ScenarioConfig& config);

struct Scenario {
  SkywayNetwork network;
  std::vector<DroneSpec> drones;
  WindField wind;
  DeliveryRequest request;
  PerturbationModel perturbation;
  EnergyModel energy;

  /// Segment services on offer: every segment flown by every drone.
  std::size_t service_count() const { return network.segments().size() * drones.size(); }
};

/// Deterministic per config.seed. Throws Errc::config_invalid.
Scenario generate_scenario(const ScenarioConfig& config);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Accepts either a bare array of drones or an object with a "drones" array.
std::vector<DroneSpec> catalog_from_json(const std::string& text);
std::vector<DroneSpec> load_catalog(const std::filesystem::path& path);
std::string catalog_to_json(const std::vector<DroneSpec>& drones);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// splitmix64 step; used to derive independent seeds from one base seed.
std::uint64_t mix_seed(std::uint64_t value);

}  // namespace skyway
