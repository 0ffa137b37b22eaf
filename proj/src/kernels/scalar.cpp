#include <cmath>
#include <limits>

#include "skyway/kernels.hpp"

namespace skyway::kernels {

void arc_kinematics_scalar(const WindParams& p, const ArcInputs& in, const ArcOutputs& out) {
  const double inf = std::numeric_limits<double>::infinity();
  const double as2 = p.air_speed * p.air_speed;
  const std::size_t n = in.distance.size();
  for (std::size_t i = 0; i < n; ++i) {
    double dot = in.track_x[i] * p.wind_sin + in.track_y[i] * p.wind_cos;
    double crs = in.track_x[i] * p.wind_cos - in.track_y[i] * p.wind_sin;
    double head_tail = -p.wind_speed * dot;
    double cross = p.wind_speed * crs;
    double radicand = as2 - cross * cross;
    double gs = radicand >= 0.0 ? head_tail + std::sqrt(radicand) : 0.0;
    if (gs > 0.0) {
      out.ground_speed[i] = gs;
      out.travel_time[i] = in.distance[i] / gs;
      out.consumption[i] = p.energy_per_km * in.distance[i] * (p.air_speed / gs);
    } else {
      out.ground_speed[i] = 0.0;
      out.travel_time[i] = inf;
      out.consumption[i] = inf;
    }
  }
}

}  // namespace skyway::kernels
