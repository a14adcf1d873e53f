#pragma once

#include <cstddef>
#include <functional>

namespace mcpert {

using ScalarFunction = std::function<double(double)>;

struct QuadratureOptions {
  std::size_t initial_intervals = 2048;
  std::size_t max_intervals = std::size_t{1} << 20;
  double tolerance = 1e-10;
};

struct QuadratureResult {
  double value = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

/// Composite Simpson on a uniform grid, doubled until two successive
/// estimates agree to `tolerance` (relative to max(1, |estimate|)).
QuadratureResult integrate(const ScalarFunction& f, double a, double b, const QuadratureOptions& opts = {});

/// Mean of f over [a, b] via `integrate`.
double mean_over(const ScalarFunction& f, double a, double b, const QuadratureOptions& opts = {});

/// Extremes over u in [0, period] of G(u) = integral_0^u (f(s) - mean) ds.
///
/// G is accumulated cell by cell (Simpson per cell) on `cells` cells, then the
/// best grid point is refined by golden-section search over its neighbours.
struct RunningIntegralExtremes {
  double sup = 0.0;
  double sup_at = 0.0;
  double inf = 0.0;
  double inf_at = 0.0;
  /// sup - inf: the smallest K with -integral_s^t (f - mean) <= K for all s <= t.
  double oscillation() const noexcept { return sup - inf; }
};

RunningIntegralExtremes running_integral_extremes(const ScalarFunction& f, double mean, double period,
                                                  std::size_t cells = 4096);

}  // namespace mcpert
