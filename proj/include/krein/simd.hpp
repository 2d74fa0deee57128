#pragma once

#include <cstddef>
#include <span>

#include "krein/types.hpp"

// Batched kernel evaluations. Each kernel has a scalar reference and, on x86-64
// builds, an AVX2/FMA variant picked at runtime. KREIN_SIMD=scalar forces the
// reference path.

namespace krein::simd {

enum class Isa { scalar, avx2 };

bool avx2_available();
Isa active_isa();
// Overrides the runtime choice; requesting avx2 on a machine without it throws.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

struct PointsSoA {
  std::span<const double> x, y, z;
  std::size_t size() const { return x.size(); }
};

// out[i] = exp(-s d[i]) / (4 pi d[i])
void green_batch(Complex s, std::span<const double> d, std::span<Complex> out);
// out[i] = sum_j c[j] exp(-s |t_i - y_j|) / (4 pi |t_i - y_j|), real s
void yukawa_sum(double s, const PointsSoA& sources, std::span<const double> c, const PointsSoA& targets,
                std::span<double> out);
// out[i] = exp(a[i])
void cexp_batch(std::span<const Complex> a, std::span<Complex> out);

namespace scalar {
void green_batch(Complex s, std::span<const double> d, std::span<Complex> out);
void yukawa_sum(double s, const PointsSoA& sources, std::span<const double> c, const PointsSoA& targets,
                std::span<double> out);
void cexp_batch(std::span<const Complex> a, std::span<Complex> out);
}  // namespace scalar

#ifdef KREIN_HAVE_AVX2
namespace avx2 {
void green_batch(Complex s, std::span<const double> d, std::span<Complex> out);
void yukawa_sum(double s, const PointsSoA& sources, std::span<const double> c, const PointsSoA& targets,
                std::span<double> out);
void cexp_batch(std::span<const Complex> a, std::span<Complex> out);
}  // namespace avx2
#endif

}  // namespace krein::simd
