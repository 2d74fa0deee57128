#include <immintrin.h>

#include "krein/simd.hpp"

namespace krein::simd::avx2 {

namespace {

// exp with Cody-Waite reduction and the (3,3) Pade form of exp on [-ln2/2, ln2/2].
inline __m256d exp4(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.78);
  const __m256d lo = _mm256_set1_pd(-708.39);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), x);
  const __m256d xx = _mm256_mul_pd(x, x);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(r, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // 2^fx through the exponent field
  __m128i n = _mm256_cvtpd_epi32(fx);
  n = _mm_add_epi32(n, _mm_set1_epi32(1023));
  const __m256i bits = _mm256_slli_epi64(_mm256_cvtepi32_epi64(n), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, r);
}

// sin and cos with octant reduction; callers keep |x| <= 1e6.
inline void sincos4(__m256d x, __m256d* s_out, __m256d* c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d xneg = _mm256_and_pd(x, sign_bit);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);

  __m128i j = _mm256_cvttpd_epi32(_mm256_mul_pd(ax, _mm256_set1_pd(1.27323954473516268615)));
  j = _mm_and_si128(_mm_add_epi32(j, _mm_set1_epi32(1)), _mm_set1_epi32(~1));
  const __m256d y = _mm256_cvtepi32_pd(j);
  j = _mm_and_si128(j, _mm_set1_epi32(7));

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156E-1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668E-8), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645E-15), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295E-1));
  const __m256d sinp = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218E-2));
  const __m256d cosp =
      _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc, _mm256_fnmadd_pd(zz, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

  const __m128i upper = _mm_cmpgt_epi32(j, _mm_set1_epi32(3));
  const __m128i swap = _mm_cmpeq_epi32(_mm_and_si128(j, _mm_set1_epi32(3)), _mm_set1_epi32(2));
  const __m256d upper_m = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(upper));
  const __m256d swap_m = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(swap));

  __m256d s = _mm256_blendv_pd(sinp, cosp, swap_m);
  __m256d c = _mm256_blendv_pd(cosp, sinp, swap_m);
  s = _mm256_xor_pd(s, _mm256_xor_pd(_mm256_and_pd(upper_m, sign_bit), xneg));
  c = _mm256_xor_pd(c, _mm256_and_pd(_mm256_xor_pd(upper_m, swap_m), sign_bit));
  *s_out = s;
  *c_out = c;
}

inline bool reducible(__m256d x) {
  const __m256d ax = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  return _mm256_movemask_pd(_mm256_cmp_pd(ax, _mm256_set1_pd(1e6), _CMP_GT_OQ)) == 0;
}

inline void store_interleaved(double* dst, __m256d re, __m256d im) {
  const __m256d lo = _mm256_unpacklo_pd(re, im);
  const __m256d hi = _mm256_unpackhi_pd(re, im);
  _mm256_storeu_pd(dst, _mm256_permute2f128_pd(lo, hi, 0x20));
  _mm256_storeu_pd(dst + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

}  // namespace

void green_batch(Complex s, std::span<const double> d, std::span<Complex> out) {
  const std::size_t n = d.size();
  const __m256d nsr = _mm256_set1_pd(-s.real());
  const __m256d nsi = _mm256_set1_pd(-s.imag());
  const __m256d fp = _mm256_set1_pd(four_pi);
  double* o = reinterpret_cast<double*>(out.data());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dv = _mm256_loadu_pd(d.data() + i);
    const __m256d b = _mm256_mul_pd(nsi, dv);
    const __m256d a = _mm256_mul_pd(nsr, dv);
    // results near the subnormal range come from the scalar path
    if (!reducible(b) || _mm256_movemask_pd(_mm256_cmp_pd(a, _mm256_set1_pd(-690.0), _CMP_LT_OQ)) != 0) {
      scalar::green_batch(s, d.subspan(i, 4), out.subspan(i, 4));
      continue;
    }
    const __m256d mag = _mm256_div_pd(exp4(a), _mm256_mul_pd(fp, dv));
    __m256d sn, cs;
    sincos4(b, &sn, &cs);
    store_interleaved(o + 2 * i, _mm256_mul_pd(mag, cs), _mm256_mul_pd(mag, sn));
  }
  if (i < n) scalar::green_batch(s, d.subspan(i), out.subspan(i));
}

void yukawa_sum(double s, const PointsSoA& sources, std::span<const double> c, const PointsSoA& targets,
                std::span<double> out) {
  const std::size_t n = targets.size();
  const __m256d ns = _mm256_set1_pd(-s);
  const __m256d fp = _mm256_set1_pd(four_pi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d tx = _mm256_loadu_pd(targets.x.data() + i);
    const __m256d ty = _mm256_loadu_pd(targets.y.data() + i);
    const __m256d tz = _mm256_loadu_pd(targets.z.data() + i);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const __m256d dx = _mm256_sub_pd(tx, _mm256_set1_pd(sources.x[j]));
      const __m256d dy = _mm256_sub_pd(ty, _mm256_set1_pd(sources.y[j]));
      const __m256d dz = _mm256_sub_pd(tz, _mm256_set1_pd(sources.z[j]));
      const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
      const __m256d r = _mm256_sqrt_pd(r2);
      const __m256d term = _mm256_div_pd(exp4(_mm256_mul_pd(ns, r)), _mm256_mul_pd(fp, r));
      acc = _mm256_fmadd_pd(_mm256_set1_pd(c[j]), term, acc);
    }
    _mm256_storeu_pd(out.data() + i, acc);
  }
  if (i < n) {
    const PointsSoA tail{targets.x.subspan(i), targets.y.subspan(i), targets.z.subspan(i)};
    scalar::yukawa_sum(s, sources, c, tail, out.subspan(i));
  }
}

void cexp_batch(std::span<const Complex> a, std::span<Complex> out) {
  const std::size_t n = a.size();
  const double* in = reinterpret_cast<const double*>(a.data());
  double* o = reinterpret_cast<double*>(out.data());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(in + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(in + 2 * i + 4);
    // lanes come out in the order 0, 2, 1, 3 and go back the same way
    const __m256d re = _mm256_unpacklo_pd(v0, v1);
    const __m256d im = _mm256_unpackhi_pd(v0, v1);
    if (!reducible(im)) {
      scalar::cexp_batch(a.subspan(i, 4), out.subspan(i, 4));
      continue;
    }
    const __m256d mag = exp4(re);
    __m256d sn, cs;
    sincos4(im, &sn, &cs);
    const __m256d rr = _mm256_mul_pd(mag, cs);
    const __m256d ii = _mm256_mul_pd(mag, sn);
    _mm256_storeu_pd(o + 2 * i, _mm256_unpacklo_pd(rr, ii));
    _mm256_storeu_pd(o + 2 * i + 4, _mm256_unpackhi_pd(rr, ii));
  }
  if (i < n) scalar::cexp_batch(a.subspan(i), out.subspan(i));
}

}  // namespace krein::simd::avx2
