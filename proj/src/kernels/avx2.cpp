#include <immintrin.h>

#include <limits>

#include "skyway/kernels.hpp"

namespace skyway::kernels {

void arc_kinematics_avx2(const WindParams& p, const ArcInputs& in, const ArcOutputs& out) {
  const std::size_t n = in.distance.size();
  const __m256d ws = _mm256_set1_pd(p.wind_speed);
  const __m256d neg_ws = _mm256_set1_pd(-p.wind_speed);
  const __m256d wsin = _mm256_set1_pd(p.wind_sin);
  const __m256d wcos = _mm256_set1_pd(p.wind_cos);
  const __m256d as = _mm256_set1_pd(p.air_speed);
  const __m256d as2 = _mm256_set1_pd(p.air_speed * p.air_speed);
  const __m256d epk = _mm256_set1_pd(p.energy_per_km);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d tx = _mm256_loadu_pd(in.track_x.data() + i);
    __m256d ty = _mm256_loadu_pd(in.track_y.data() + i);
    __m256d d = _mm256_loadu_pd(in.distance.data() + i);

    // Same operation order as the scalar kernel; no fused multiply-adds so
    // both variants round identically.
    __m256d dot = _mm256_add_pd(_mm256_mul_pd(tx, wsin), _mm256_mul_pd(ty, wcos));
    __m256d crs = _mm256_sub_pd(_mm256_mul_pd(tx, wcos), _mm256_mul_pd(ty, wsin));
    __m256d head_tail = _mm256_mul_pd(neg_ws, dot);
    __m256d cross = _mm256_mul_pd(ws, crs);
    __m256d radicand = _mm256_sub_pd(as2, _mm256_mul_pd(cross, cross));
    __m256d rad_ok = _mm256_cmp_pd(radicand, zero, _CMP_GE_OQ);
    __m256d root = _mm256_sqrt_pd(_mm256_max_pd(radicand, zero));
    __m256d gs = _mm256_and_pd(_mm256_add_pd(head_tail, root), rad_ok);
    __m256d ok = _mm256_cmp_pd(gs, zero, _CMP_GT_OQ);

    __m256d time = _mm256_div_pd(d, gs);
    __m256d cons = _mm256_mul_pd(_mm256_mul_pd(epk, d), _mm256_div_pd(as, gs));

    _mm256_storeu_pd(out.ground_speed.data() + i, _mm256_and_pd(gs, ok));
    _mm256_storeu_pd(out.travel_time.data() + i, _mm256_blendv_pd(inf, time, ok));
    _mm256_storeu_pd(out.consumption.data() + i, _mm256_blendv_pd(inf, cons, ok));
  }
  if (i < n) {
    ArcInputs tail_in{in.track_x.subspan(i), in.track_y.subspan(i), in.distance.subspan(i)};
    ArcOutputs tail_out{out.ground_speed.subspan(i), out.travel_time.subspan(i),
                        out.consumption.subspan(i)};
    arc_kinematics_scalar(p, tail_in, tail_out);
  }
}

}  // namespace skyway::kernels
