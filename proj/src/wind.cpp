#include "skyway/wind.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skyway/error.hpp"

namespace skyway {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_sample(const WindSample& s) {
  if (!(s.speed >= 0.0)) throw Error(Errc::invalid_argument, "wind speed must be >= 0");
  if (!(s.bearing >= 0.0 && s.bearing < 360.0)) {
    throw Error(Errc::invalid_argument, "wind bearing must lie in [0, 360)");
  }
}

}  // namespace

WindField::WindField() : epochs_{WindEpoch{0.0, WindSample{}}} {}

WindField::WindField(std::vector<WindEpoch> epochs) : epochs_(std::move(epochs)) {
  if (epochs_.empty() || epochs_.front().start != 0.0) {
    throw Error(Errc::invalid_argument, "wind timeline must start at t = 0");
  }
  for (std::size_t i = 0; i < epochs_.size(); ++i) {
    check_sample(epochs_[i].sample);
    if (i > 0 && !(epochs_[i].start > epochs_[i - 1].start)) {
      throw Error(Errc::invalid_argument, "wind epochs must be strictly increasing");
    }
    max_speed_ = std::max(max_speed_, epochs_[i].sample.speed);
  }
}

std::size_t WindField::epoch_index(double t) const {
  auto it = std::upper_bound(epochs_.begin(), epochs_.end(), t,
                             [](double v, const WindEpoch& e) { return v < e.start; });
  return it == epochs_.begin() ? 0 : static_cast<std::size_t>(it - epochs_.begin()) - 1;
}

double normalize_course(double degrees) {
  double d = std::fmod(degrees, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

std::optional<LegKinematics> try_ground_speed(double air_speed, const WindSample& wind,
                                              double segment_bearing) {
  if (!(air_speed > 0.0)) throw Error(Errc::invalid_argument, "air speed must be positive");
  LegKinematics k;
  k.air_speed = air_speed;
  k.course_correction = normalize_course(segment_bearing - wind.bearing);
  double angle = (180.0 - k.course_correction) * kDegToRad;
  k.head_tail = wind.speed * std::cos(angle);
  k.cross = wind.speed * std::sin(angle);
  double radicand = air_speed * air_speed - k.cross * k.cross;
  if (radicand < 0.0) return std::nullopt;
  k.along = std::sqrt(radicand);
  k.ground_speed = k.head_tail + k.along;
  if (!(k.ground_speed > 0.0)) return std::nullopt;
  return k;
}

LegKinematics ground_speed(double air_speed, const WindSample& wind, double segment_bearing) {
  auto k = try_ground_speed(air_speed, wind, segment_bearing);
  if (!k) throw Error(Errc::infeasible_wind, "wind exceeds the drone's air speed on this leg");
  return *k;
}

double travel_time(double distance_km, const LegKinematics& kin) {
  if (!(kin.ground_speed > 0.0)) throw Error(Errc::invalid_argument, "ground speed must be positive");
  if (!(distance_km > 0.0)) throw Error(Errc::invalid_argument, "distance must be positive");
  return distance_km / kin.ground_speed;
}

double battery_consumed(double distance_km, double package_weight, const LegKinematics& kin,
                        const EnergyModel& model) {
  if (distance_km < 0.0 || !(package_weight > 0.0)) {
    throw Error(Errc::invalid_argument, "distance and package weight must be positive");
  }
  if (distance_km == 0.0) return 0.0;
  if (!(kin.ground_speed > 0.0)) throw Error(Errc::invalid_argument, "ground speed must be positive");
  double wind_factor = kin.air_speed / kin.ground_speed;
  return model.calm_rate(package_weight) * distance_km * wind_factor;
}

}  // namespace skyway
