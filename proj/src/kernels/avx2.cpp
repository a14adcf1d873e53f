// Compiled with -mavx2 only. Multiplies and adds are kept separate so the
// elementwise kernels reproduce the scalar reference bit for bit.

#include <immintrin.h>

#include <cmath>

#include "backends.hpp"

namespace mcpert::kernels::detail {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void mul_add(const double* d, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = y[i] + d[i] * x[i];
}

void lincomb(const double* base, double h, const double* k, double* out, std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(base + i), _mm256_mul_pd(vh, _mm256_loadu_pd(k + i)));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = base[i] + h * k[i];
}

void rk4_combine(const double* k1, const double* k2, const double* k3, const double* k4,
                 double h6, double* p, std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h6);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
    s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_add_pd(s, s));
    s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
    __m256d vp = _mm256_add_pd(_mm256_loadu_pd(p + i), _mm256_mul_pd(vh, s));
    _mm256_storeu_pd(p + i, vp);
  }
  for (; i < n; ++i) {
    double s = k2[i] + k3[i];
    s = k1[i] + (s + s);
    s = s + k4[i];
    p[i] = p[i] + h6 * s;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double l1_norm(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void abs_accumulate(const double* v, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_add_pd(_mm256_loadu_pd(acc + i), abs_pd(_mm256_loadu_pd(v + i)));
    _mm256_storeu_pd(acc + i, va);
  }
  for (; i < n; ++i) acc[i] = acc[i] + std::fabs(v[i]);
}

constexpr Table kAvx2{Backend::avx2, axpy,    mul_add, lincomb,     rk4_combine,
                      dot,           sum,     l1_norm, l1_distance, abs_accumulate};

}  // namespace

const Table& avx2_table() { return kAvx2; }

}  // namespace mcpert::kernels::detail
