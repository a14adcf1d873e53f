#include <cmath>

#include "mcpert/kernels.hpp"

namespace mcpert::kernels {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void mul_add(const double* d, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + d[i] * x[i];
}

void lincomb(const double* base, double h, const double* k, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + h * k[i];
}

void rk4_combine(const double* k1, const double* k2, const double* k3, const double* k4,
                 double h6, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = k2[i] + k3[i];
    s = k1[i] + (s + s);
    s = s + k4[i];
    p[i] = p[i] + h6 * s;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double l1_norm(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void abs_accumulate(const double* v, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + std::fabs(v[i]);
}

constexpr Table kScalar{Backend::scalar, axpy,    mul_add, lincomb,     rk4_combine,
                        dot,             sum,     l1_norm, l1_distance, abs_accumulate};

}  // namespace

const Table& scalar_table() { return kScalar; }

}  // namespace mcpert::kernels
