#include <arm_neon.h>

#include <cmath>

#include "backends.hpp"

namespace mcpert::kernels::detail {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void mul_add(const double* d, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vld1q_f64(d + i), vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + d[i] * x[i];
}

void lincomb(const double* base, double h, const double* k, double* out, std::size_t n) {
  const float64x2_t vh = vdupq_n_f64(h);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(base + i), vmulq_f64(vh, vld1q_f64(k + i))));
  for (; i < n; ++i) out[i] = base[i] + h * k[i];
}

void rk4_combine(const double* k1, const double* k2, const double* k3, const double* k4,
                 double h6, double* p, std::size_t n) {
  const float64x2_t vh = vdupq_n_f64(h6);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t s = vaddq_f64(vld1q_f64(k2 + i), vld1q_f64(k3 + i));
    s = vaddq_f64(vld1q_f64(k1 + i), vaddq_f64(s, s));
    s = vaddq_f64(s, vld1q_f64(k4 + i));
    vst1q_f64(p + i, vaddq_f64(vld1q_f64(p + i), vmulq_f64(vh, s)));
  }
  for (; i < n; ++i) {
    double s = k2[i] + k3[i];
    s = k1[i] + (s + s);
    s = s + k4[i];
    p[i] = p[i] + h6 * s;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double l1_norm(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabsq_f64(vld1q_f64(a + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void abs_accumulate(const double* v, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vabsq_f64(vld1q_f64(v + i))));
  for (; i < n; ++i) acc[i] = acc[i] + std::fabs(v[i]);
}

constexpr Table kNeon{Backend::neon, axpy,    mul_add, lincomb,     rk4_combine,
                      dot,           sum,     l1_norm, l1_distance, abs_accumulate};

}  // namespace

const Table& neon_table() { return kNeon; }

}  // namespace mcpert::kernels::detail
