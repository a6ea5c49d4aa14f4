// Compiled with -mavx2 (never -mfma). Only reached after a runtime CPU check.
#include "rsg/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstring>

#include "rsg/detail/formulas.hpp"

namespace rsg::kernels {
namespace {

void affine(const double* s, double* out, std::size_t n, double start,
            double v0, double slope) {
  const __m256d vs = _mm256_set1_pd(start);
  const __m256d vv = _mm256_set1_pd(v0);
  const __m256d vk = _mm256_set1_pd(slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(s + i), vs);
    _mm256_storeu_pd(out + i, _mm256_add_pd(vv, _mm256_mul_pd(vk, d)));
  }
  for (; i < n; ++i) out[i] = detail::affine_at(s[i], start, v0, slope);
}

inline __m256d cubic4(__m256d x, const double* c) {
  __m256d r = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(c[3]), x), _mm256_set1_pd(c[2]));
  r = _mm256_add_pd(_mm256_mul_pd(r, x), _mm256_set1_pd(c[1]));
  return _mm256_add_pd(_mm256_mul_pd(r, x), _mm256_set1_pd(c[0]));
}

void cubic(const double* s, double* out, std::size_t n, const double* c) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, cubic4(_mm256_loadu_pd(s + i), c));
  for (; i < n; ++i) out[i] = detail::cubic_at(s[i], c);
}

void hermite(const double* s, const std::int32_t* idx, double* out,
             std::size_t n, const double* x0, const double* h, const double* y0,
             const double* a1, const double* a2, const double* a3) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i k = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d vx0 = _mm256_i32gather_pd(x0, k, 8);
    const __m256d vh = _mm256_i32gather_pd(h, k, 8);
    const __m256d vy0 = _mm256_i32gather_pd(y0, k, 8);
    const __m256d va1 = _mm256_i32gather_pd(a1, k, 8);
    const __m256d va2 = _mm256_i32gather_pd(a2, k, 8);
    const __m256d va3 = _mm256_i32gather_pd(a3, k, 8);
    const __m256d t = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(s + i), vx0), vh);
    __m256d r = _mm256_add_pd(va2, _mm256_mul_pd(t, va3));
    r = _mm256_add_pd(va1, _mm256_mul_pd(t, r));
    _mm256_storeu_pd(out + i, _mm256_add_pd(vy0, _mm256_mul_pd(t, r)));
  }
  for (; i < n; ++i) {
    const auto k = idx[i];
    out[i] = detail::hermite_at(s[i], x0[k], h[k], y0[k], a1[k], a2[k], a3[k]);
  }
}

void axpy(double w, const double* x, double* y, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vw, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = y[i] + w * x[i];
}

void scale(double w, const double* x, double* y, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(vw, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = w * x[i];
}

void vmin(const double* a, double* b, std::size_t n) {
  std::size_t i = 0;
  // _mm256_min_pd(a, b) is a < b ? a : b per lane, matching the scalar form.
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(b + i, _mm256_min_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) b[i] = a[i] < b[i] ? a[i] : b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

ArgMin argmin(const double* x, std::size_t n) {
  if (n < 8) return scalar_table().argmin(x, n);
  __m256d best = _mm256_loadu_pd(x);
  __m256i best_i = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i cur_i = best_i;
  const __m256i four = _mm256_set1_epi64x(4);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    cur_i = _mm256_add_epi64(cur_i, four);
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d lt = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, v, lt);
    best_i = _mm256_castpd_si256(_mm256_blendv_pd(_mm256_castsi256_pd(best_i),
                                                  _mm256_castsi256_pd(cur_i), lt));
  }
  alignas(32) double bv[4];
  alignas(32) long long bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(bi), best_i);
  ArgMin r{bv[0], static_cast<std::size_t>(bi[0])};
  for (int l = 1; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(bi[l]);
    if (bv[l] < r.value || (bv[l] == r.value && li < r.index)) r = {bv[l], li};
  }
  for (; i < n; ++i) {
    if (x[i] < r.value) r = {x[i], i};
  }
  return r;
}

void bisect_mid(const double* lo, const double* hi, double* mid, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d l = _mm256_loadu_pd(lo + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(hi + i), l);
    _mm256_storeu_pd(mid + i, _mm256_add_pd(l, _mm256_mul_pd(d, half)));
  }
  for (; i < n; ++i) mid[i] = lo[i] + (hi[i] - lo[i]) * 0.5;
}

void bisect_update(double* lo, double* hi, const double* mid, const double* fmid,
                   const double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = _mm256_loadu_pd(mid + i);
    const __m256d below = _mm256_cmp_pd(_mm256_loadu_pd(fmid + i), _mm256_loadu_pd(y + i), _CMP_LT_OQ);
    _mm256_storeu_pd(lo + i, _mm256_blendv_pd(_mm256_loadu_pd(lo + i), m, below));
    _mm256_storeu_pd(hi + i, _mm256_blendv_pd(m, _mm256_loadu_pd(hi + i), below));
  }
  for (; i < n; ++i) {
    if (fmid[i] < y[i]) {
      lo[i] = mid[i];
    } else {
      hi[i] = mid[i];
    }
  }
}

struct Field4 {
  const LoopRhs& r;
  __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d one = _mm256_set1_pd(1.0);
  __m256d minus_one = _mm256_set1_pd(-1.0);
  __m256d zero = _mm256_setzero_pd();

  void operator()(__m256d x, __m256d z, __m256d& dx, __m256d& dz) const {
    dx = _mm256_sub_pd(z, cubic4(x, r.drift));
    const __m256d a = _mm256_andnot_pd(sign_mask, z);
    __m256i k = _mm256_setzero_si256();
    for (std::size_t j = 1; j < r.q_pieces; ++j) {
      const __m256d ge = _mm256_cmp_pd(a, _mm256_set1_pd(r.q_start[j]), _CMP_GE_OQ);
      k = _mm256_sub_epi64(k, _mm256_castpd_si256(ge));
    }
    const __m256d st = _mm256_i64gather_pd(r.q_start, k, 8);
    const __m256d v0 = _mm256_i64gather_pd(r.q_value, k, 8);
    const __m256d sl = _mm256_i64gather_pd(r.q_slope, k, 8);
    const __m256d q = _mm256_add_pd(v0, _mm256_mul_pd(sl, _mm256_sub_pd(a, st)));
    const __m256d sgn = _mm256_or_pd(_mm256_and_pd(_mm256_cmp_pd(z, zero, _CMP_GT_OQ), one),
                                     _mm256_and_pd(_mm256_cmp_pd(z, zero, _CMP_LT_OQ), minus_one));
    dz = _mm256_sub_pd(x, _mm256_mul_pd(sgn, q));
  }
};

void loop_rk4(const LoopRhs& r, double* xs, double* zs, std::uint8_t* alive,
              std::size_t n, double h, std::size_t steps) {
  const Field4 field{r};
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d hh = _mm256_set1_pd(h * 0.5);
  const __m256d h6 = _mm256_set1_pd(h / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d limit = _mm256_set1_pd(1e12);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(xs + i);
    __m256d z = _mm256_loadu_pd(zs + i);
    __m256d live = _mm256_castsi256_pd(_mm256_setr_epi64x(
        alive[i] ? -1 : 0, alive[i + 1] ? -1 : 0, alive[i + 2] ? -1 : 0, alive[i + 3] ? -1 : 0));
    for (std::size_t s = 0; s < steps; ++s) {
      if (_mm256_movemask_pd(live) == 0) break;
      __m256d k1x, k1z, k2x, k2z, k3x, k3z, k4x, k4z;
      field(x, z, k1x, k1z);
      field(_mm256_add_pd(x, _mm256_mul_pd(hh, k1x)), _mm256_add_pd(z, _mm256_mul_pd(hh, k1z)), k2x, k2z);
      field(_mm256_add_pd(x, _mm256_mul_pd(hh, k2x)), _mm256_add_pd(z, _mm256_mul_pd(hh, k2z)), k3x, k3z);
      field(_mm256_add_pd(x, _mm256_mul_pd(vh, k3x)), _mm256_add_pd(z, _mm256_mul_pd(vh, k3z)), k4x, k4z);
      const __m256d sx = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(k1x, _mm256_mul_pd(two, k2x)),
                                                     _mm256_mul_pd(two, k3x)), k4x);
      const __m256d sz = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(k1z, _mm256_mul_pd(two, k2z)),
                                                     _mm256_mul_pd(two, k3z)), k4z);
      x = _mm256_blendv_pd(x, _mm256_add_pd(x, _mm256_mul_pd(h6, sx)), live);
      z = _mm256_blendv_pd(z, _mm256_add_pd(z, _mm256_mul_pd(h6, sz)), live);
      const __m256d norm2 = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(z, z));
      live = _mm256_andnot_pd(_mm256_cmp_pd(norm2, limit, _CMP_NLE_UQ), live);
    }
    _mm256_storeu_pd(xs + i, x);
    _mm256_storeu_pd(zs + i, z);
    const int m = _mm256_movemask_pd(live);
    for (int l = 0; l < 4; ++l) alive[i + l] = static_cast<std::uint8_t>((m >> l) & 1);
  }
  if (i < n) scalar_table().loop_rk4(r, xs + i, zs + i, alive + i, n - i, h, steps);
}

}  // namespace

const Table* avx2_table_impl() {
  static const Table t{"avx2", affine, cubic,      hermite,       axpy,
                       scale,  vmin,   sub,        argmin,        bisect_mid,
                       bisect_update,  loop_rk4};
  return &t;
}

}  // namespace rsg::kernels

#else

namespace rsg::kernels {
const Table* avx2_table_impl() { return nullptr; }
}  // namespace rsg::kernels

#endif
