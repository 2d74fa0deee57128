#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "krein/simd.hpp"

namespace krein::simd {

namespace {

Isa detect() {
  if (const char* env = std::getenv("KREIN_SIMD"); env && std::string(env) == "scalar") return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(KREIN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) throw std::runtime_error("AVX2 kernels unavailable on this machine");
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void green_batch(Complex s, std::span<const double> d, std::span<Complex> out) {
#ifdef KREIN_HAVE_AVX2
  if (active_isa() == Isa::avx2) return avx2::green_batch(s, d, out);
#endif
  scalar::green_batch(s, d, out);
}

void yukawa_sum(double s, const PointsSoA& sources, std::span<const double> c, const PointsSoA& targets,
                std::span<double> out) {
#ifdef KREIN_HAVE_AVX2
  if (active_isa() == Isa::avx2) return avx2::yukawa_sum(s, sources, c, targets, out);
#endif
  scalar::yukawa_sum(s, sources, c, targets, out);
}

void cexp_batch(std::span<const Complex> a, std::span<Complex> out) {
#ifdef KREIN_HAVE_AVX2
  if (active_isa() == Isa::avx2) return avx2::cexp_batch(a, out);
#endif
  scalar::cexp_batch(a, out);
}

}  // namespace krein::simd
