#include <algorithm>
#include <cmath>

#include "mcpert/errors.hpp"
#include "mcpert/kernels.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

RegimeReport limiting_regime(const ChainSpec& spec, const RegimeOptions& opts) {
  if (!(opts.tolerance > 0.0)) throw ValidationError("regime tolerance must be positive");
  if (opts.samples_per_period == 0) throw ValidationError("samples per period must be positive");
  RegimeReport r;
  r.period = spec.period().value_or(1.0);
  const double step = opts.step.value_or(default_step(spec));
  const std::size_t n = spec.top();

  std::vector<double> lo = delta_vector(spec.dim(), 0);
  std::vector<double> hi = delta_vector(spec.dim(), n);
  Propagator from_lo(spec, step);
  Propagator from_hi(spec, step);

  double t = 0.0;
  double dist = kernels::l1_distance(lo, hi);
  r.boundary_times.push_back(t);
  r.boundary_distances.push_back(dist);
  while (dist >= opts.tolerance || t < opts.min_horizon * (1.0 - 1e-12)) {
    if (t + r.period > opts.max_horizon * (1.0 + 1e-12))
      throw ConvergenceError("no limiting regime within horizon " + format_double(opts.max_horizon), dist);
    const double tn = t + r.period;
    from_lo.advance(lo, t, tn);
    from_hi.advance(hi, t, tn);
    check_probability(lo, tn);
    check_probability(hi, tn);
    t = tn;
    dist = kernels::l1_distance(lo, hi);
    r.boundary_times.push_back(t);
    r.boundary_distances.push_back(dist);
  }
  r.horizon = t;

  IntegrateOptions io;
  io.step = step;
  io.stride = r.period / static_cast<double>(opts.samples_per_period);
  io.initial = "state 0 at T";
  r.limit = integrate(spec, ProbabilityVector{t, lo}, t + r.period, io);
  r.phi.reserve(r.limit.size());
  for (const auto& p : r.limit.states) r.phi.push_back(mean_of(p));
  const auto [mn, mx] = std::minmax_element(r.phi.begin(), r.phi.end());
  r.phi_min = *mn;
  r.phi_max = *mx;
  return r;
}

}  // namespace mcpert
