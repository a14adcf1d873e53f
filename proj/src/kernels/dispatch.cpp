#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "backends.hpp"

namespace mcpert::kernels {
namespace {

bool cpu_has(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(MCPERT_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(MCPERT_WITH_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend best_available() {
  if (cpu_has(Backend::avx2)) return Backend::avx2;
  if (cpu_has(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

Backend initial_backend() {
  if (const char* env = std::getenv("MCPERT_KERNELS")) {
    const std::string v(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon})
      if (v == backend_name(b) && cpu_has(b)) return b;
  }
  return best_available();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{table_for(initial_backend())};
  return table;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

const Table* table_for(Backend b) {
  if (!cpu_has(b)) return nullptr;
  switch (b) {
    case Backend::scalar:
      return &scalar_table();
    case Backend::avx2:
#if defined(MCPERT_WITH_AVX2)
      return &detail::avx2_table();
#else
      return nullptr;
#endif
    case Backend::neon:
#if defined(MCPERT_WITH_NEON)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

bool supported(Backend b) { return table_for(b) != nullptr; }

void select(Backend b) {
  const Table* t = table_for(b);
  if (t == nullptr)
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
  current().store(t);
}

Backend active_backend() { return current().load()->backend; }

const Table& active() { return *current().load(std::memory_order_relaxed); }

ScopedBackend::ScopedBackend(Backend b) : previous_(active_backend()) { select(b); }
ScopedBackend::~ScopedBackend() { select(previous_); }

}  // namespace mcpert::kernels
