#include "mcpert/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace mcpert {

QuadratureResult integrate(const ScalarFunction& f, double a, double b, const QuadratureOptions& opts) {
  if (!(b > a)) return {0.0, 0, true};
  std::size_t n = std::max<std::size_t>(2, opts.initial_intervals + (opts.initial_intervals & 1));
  double h = (b - a) / static_cast<double>(n);
  const double ends = f(a) + f(b);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < n; ++i) (i % 2 ? odd : even) += f(a + static_cast<double>(i) * h);
  double prev = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);

  while (2 * n <= opts.max_intervals) {
    even += odd;
    n *= 2;
    h = (b - a) / static_cast<double>(n);
    odd = 0.0;
    for (std::size_t i = 1; i < n; i += 2) odd += f(a + static_cast<double>(i) * h);
    const double next = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    if (std::fabs(next - prev) <= opts.tolerance * std::max(1.0, std::fabs(next))) return {next, n, true};
    prev = next;
  }
  return {prev, n, false};
}

double mean_over(const ScalarFunction& f, double a, double b, const QuadratureOptions& opts) {
  if (!(b > a)) throw std::invalid_argument("mean_over: empty interval");
  return integrate(f, a, b, opts).value / (b - a);
}

namespace {

double simpson_panel(const ScalarFunction& g, double a, double b, int panels) {
  const double h = (b - a) / (2.0 * panels);
  double s = g(a) + g(b);
  for (int i = 1; i < 2 * panels; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

// Golden-section search for the maximum of `value` on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& value, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = value(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = value(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

RunningIntegralExtremes running_integral_extremes(const ScalarFunction& f, double mean, double period,
                                                  std::size_t cells) {
  if (!(period > 0.0)) throw std::invalid_argument("running_integral_extremes: period must be positive");
  cells = std::max<std::size_t>(cells, 1);
  const double h = period / static_cast<double>(cells);
  auto g = [&](double s) { return f(s) - mean; };

  std::vector<double> grid(cells + 1, 0.0);
  double left = g(0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    const double u0 = static_cast<double>(i) * h;
    const double u1 = static_cast<double>(i + 1) * h;
    const double right = g(u1);
    grid[i + 1] = grid[i] + h / 6.0 * (left + 4.0 * g(0.5 * (u0 + u1)) + right);
    left = right;
  }

  const auto imax = static_cast<std::size_t>(std::max_element(grid.begin(), grid.end()) - grid.begin());
  const auto imin = static_cast<std::size_t>(std::min_element(grid.begin(), grid.end()) - grid.begin());

  // G at an interior point u, using the nearest grid point to its left.
  auto running = [&](double u) {
    u = std::clamp(u, 0.0, period);
    auto k = static_cast<std::size_t>(u / h);
    if (k >= cells) k = cells - 1;
    const double uk = static_cast<double>(k) * h;
    return grid[k] + simpson_panel(g, uk, u, 4);
  };

  auto refine = [&](std::size_t idx, double sign) {
    const double lo = static_cast<double>(idx > 0 ? idx - 1 : 0) * h;
    const double hi = static_cast<double>(std::min(idx + 1, cells)) * h;
    auto [x, v] = golden_max([&](double u) { return sign * running(u); }, lo, hi);
    const double at_grid = sign * grid[idx];
    if (at_grid >= v) return std::pair{static_cast<double>(idx) * h, grid[idx]};
    return std::pair{x, sign * v};
  };

  RunningIntegralExtremes out;
  std::tie(out.sup_at, out.sup) = refine(imax, 1.0);
  std::tie(out.inf_at, out.inf) = refine(imin, -1.0);
  // G(0) = 0 belongs to both extremes' candidate sets.
  out.sup = std::max(out.sup, 0.0);
  out.inf = std::min(out.inf, 0.0);
  return out;
}

}  // namespace mcpert
