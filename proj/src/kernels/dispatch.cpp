#include <atomic>

#include "skyway/kernels.hpp"

namespace skyway::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SKYWAY_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detected_isa()};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return isa;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  active_slot().store(isa, std::memory_order_relaxed);
}

void arc_kinematics(const WindParams& p, const ArcInputs& in, const ArcOutputs& out) {
#if defined(SKYWAY_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    arc_kinematics_avx2(p, in, out);
    return;
  }
#endif
  arc_kinematics_scalar(p, in, out);
}

}  // namespace skyway::kernels
