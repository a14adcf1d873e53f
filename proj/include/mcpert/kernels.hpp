#pragma once

// Data-parallel inner loops used by the solver and the matrix measures.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2 on
// x86-64, NEON on aarch64) are selected at runtime. Elementwise kernels round
// identically to the reference; reductions may differ by reassociation only.
//
// The active backend can be forced with MCPERT_KERNELS=scalar|avx2|neon.

#include <cstddef>
#include <span>
#include <string_view>

namespace mcpert::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b);

struct Table {
  Backend backend;
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y += d .* x
  void (*mul_add)(const double* d, const double* x, double* y, std::size_t n);
  // out = base + h * k
  void (*lincomb)(const double* base, double h, const double* k, double* out, std::size_t n);
  // p += h6 * (k1 + 2 (k2 + k3) + k4)
  void (*rk4_combine)(const double* k1, const double* k2, const double* k3, const double* k4,
                      double h6, double* p, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*l1_norm)(const double* a, std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  // acc += |v|
  void (*abs_accumulate)(const double* v, double* acc, std::size_t n);
};

const Table& scalar_table();

/// Table for `b`, or nullptr when the backend is not compiled in or the CPU
/// lacks the instructions.
const Table* table_for(Backend b);

bool supported(Backend b);

/// Throws std::invalid_argument for unsupported backends.
void select(Backend b);

Backend active_backend();
const Table& active();

/// RAII override of the active backend, mainly for equivalence tests.
class ScopedBackend {
public:
  explicit ScopedBackend(Backend b);
  ~ScopedBackend();
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
  Backend previous_;
};

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void mul_add(std::span<const double> d, std::span<const double> x, std::span<double> y) {
  active().mul_add(d.data(), x.data(), y.data(), d.size());
}
inline void lincomb(std::span<const double> base, double h, std::span<const double> k,
                    std::span<double> out) {
  active().lincomb(base.data(), h, k.data(), out.data(), base.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double l1_norm(std::span<const double> a) { return active().l1_norm(a.data(), a.size()); }
inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  return active().l1_distance(a.data(), b.data(), a.size());
}
inline void abs_accumulate(std::span<const double> v, std::span<double> acc) {
  active().abs_accumulate(v.data(), acc.data(), v.size());
}

}  // namespace mcpert::kernels
