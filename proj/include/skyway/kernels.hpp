#pragma once

// Batched wind kinematics over the directed arcs of a network.
//
// The wind triangle is evaluated in vector form: with the arc's unit track
// vector (sin bearing, cos bearing) and the unit vector of the wind source
// bearing, the head/tail component is -WS * dot and the crosswind component
// is WS * cross. That avoids per-arc trig and maps onto SIMD lanes.
//
// Infeasible arcs (crosswind above air speed, or non-positive ground speed)
// produce ground_speed = 0 and +inf travel time and consumption.

#include <cstddef>
#include <span>
#include <string_view>

namespace skyway::kernels {

struct WindParams {
  double air_speed = 0.0;
  double wind_speed = 0.0;
  double wind_sin = 0.0;      // sin(wind bearing)
  double wind_cos = 1.0;      // cos(wind bearing)
  double energy_per_km = 0.0; // calm-air percent per km for the current package
};

struct ArcInputs {
  std::span<const double> track_x;  // sin(bearing)
  std::span<const double> track_y;  // cos(bearing)
  std::span<const double> distance;
};

struct ArcOutputs {
  std::span<double> ground_speed;
  std::span<double> travel_time;
  std::span<double> consumption;
};

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

void arc_kinematics_scalar(const WindParams& p, const ArcInputs& in, const ArcOutputs& out);
#if defined(SKYWAY_HAVE_AVX2)
void arc_kinematics_avx2(const WindParams& p, const ArcInputs& in, const ArcOutputs& out);
#endif

/// Best variant supported by this CPU (and this build).
Isa detected_isa();
/// Variant used by arc_kinematics(); defaults to detected_isa(). Forcing an
/// unsupported variant falls back to scalar.
Isa active_isa();
void force_isa(Isa isa);

void arc_kinematics(const WindParams& p, const ArcInputs& in, const ArcOutputs& out);

}  // namespace skyway::kernels
