#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace skyway {

/// Wind speed in km/h and the compass bearing the wind blows FROM.
struct WindSample {
  double speed = 0.0;
  double bearing = 0.0;
};

struct WindEpoch {
  double start = 0.0;  // hours
  WindSample sample;
};

// Piecewise-constant wind timeline. The first epoch starts at t = 0 and the
// last one extends forever.
class WindField {
public:
  WindField();  // calm everywhere
  explicit WindField(std::vector<WindEpoch> epochs);

  const std::vector<WindEpoch>& epochs() const noexcept { return epochs_; }
  std::size_t size() const noexcept { return epochs_.size(); }

  std::size_t epoch_index(double t) const;
  const WindSample& sample_at(double t) const { return epochs_[epoch_index(t)].sample; }
  double max_speed() const noexcept { return max_speed_; }

private:
  std::vector<WindEpoch> epochs_;
  double max_speed_ = 0.0;
};

// Leg geometry under wind. Field names follow the aviation wind triangle:
// head_tail < 0 is a headwind, cross is the crosswind component and along is
// the air-speed share left along the track.
struct LegKinematics {
  double course_correction = 0.0;  // degrees, (-180, 180]
  double head_tail = 0.0;          // km/h
  double cross = 0.0;              // km/h
  double along = 0.0;              // km/h
  double ground_speed = 0.0;       // km/h
  double air_speed = 0.0;          // km/h
};

/// Normalises an angle in degrees to (-180, 180].
double normalize_course(double degrees);

/// Throws Errc::infeasible_wind when the crosswind exceeds the air speed or
/// the resulting ground speed is not positive.
LegKinematics ground_speed(double air_speed, const WindSample& wind, double segment_bearing);
std::optional<LegKinematics> try_ground_speed(double air_speed, const WindSample& wind,
                                              double segment_bearing);

double travel_time(double distance_km, const LegKinematics& kin);

// Linear battery model: base_rate percent per reference_distance km with a
// reference_weight package, scaled by payload and by AS / GS.
struct EnergyModel {
  double base_rate = 25.0;
  double reference_distance = 10.0;
  double reference_weight = 1.0;
  double drone_equivalent_mass = 3.0;

  double weight_factor(double package_weight) const {
    return (drone_equivalent_mass + package_weight) / (drone_equivalent_mass + reference_weight);
  }
  /// Percent per km in calm air for the given package.
  double calm_rate(double package_weight) const {
    return base_rate / reference_distance * weight_factor(package_weight);
  }
};

double battery_consumed(double distance_km, double package_weight, const LegKinematics& kin,
                        const EnergyModel& model = {});

}  // namespace skyway
