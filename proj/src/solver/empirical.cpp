#include <algorithm>
#include <cmath>
#include <string>

#include "mcpert/errors.hpp"
#include "mcpert/kernels.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

double empirical_beta(const ChainSpec& spec, double t, double s, std::optional<double> step, std::size_t cap) {
  if (spec.dim() > cap)
    throw ValidationError("empirical beta needs " + std::to_string(spec.dim()) + " propagations; cap is " +
                          std::to_string(cap));
  if (!(t >= s)) throw ValidationError("empirical beta needs t >= s");
  const double h = step.value_or(default_step(spec));
  const std::size_t d = spec.dim();
  std::vector<std::vector<double>> cols(d);
  Propagator prop(spec, h);
  for (std::size_t i = 0; i < d; ++i) {
    cols[i] = delta_vector(d, i);
    prop.advance(cols[i], s, t);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) best = std::max(best, kernels::l1_distance(cols[i], cols[j]));
  return 0.5 * best;
}

PerturbationDistance empirical_perturbation_distance(const ChainSpec& spec, const ChainSpec& perturbed,
                                                     const ProbabilityVector& p0, double horizon,
                                                     const IntegrateOptions& opts) {
  if (spec.dim() != perturbed.dim()) throw ValidationError("perturbed chain must have the same state space");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  IntegrateOptions io = opts;
  if (!io.step) io.step = std::min(default_step(spec), default_step(perturbed));
  const double P = spec.period().value_or(1.0);
  if (io.stride <= 0.0) io.stride = P / 100.0;
  const Trajectory a = integrate(spec, p0, p0.t + horizon, io);
  const Trajectory b = integrate(perturbed, p0, p0.t + horizon, io);

  PerturbationDistance r;
  r.period = P;
  r.times = a.times;
  r.distances.reserve(a.size());
  const double final_from = p0.t + horizon - P;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = kernels::l1_distance(a.states[k], b.states[k]);
    r.distances.push_back(d);
    if (a.times[k] >= final_from - 1e-12 * std::max(1.0, std::fabs(final_from)))
      r.final_period_sup = std::max(r.final_period_sup, d);
  }
  return r;
}

StationaryResult stationary_distribution(const ChainSpec& spec, const StationaryOptions& opts) {
  if (!spec.homogeneous()) throw ValidationError("stationary distribution needs a time-homogeneous chain");
  const double L = spec.L();
  const double h = opts.step.value_or(L > 0.0 ? 1.0 / (4.0 * L) : 1.0);
  Propagator prop(spec, h);
  GeneratorSlice A;
  spec.assemble(0.0, A);
  StationaryResult r;
  r.p = delta_vector(spec.dim(), 0);
  std::vector<double> ap(spec.dim());
  auto residual = [&] {
    A.apply(r.p, ap);
    return kernels::l1_norm(ap);
  };
  const double chunk = 64.0 * h;
  r.residual = residual();
  while (r.residual > opts.residual_tolerance) {
    if (r.time >= opts.max_time)
      throw ConvergenceError("stationary distribution not reached by t = " + format_double(opts.max_time),
                             r.residual);
    prop.advance(r.p, r.time, r.time + chunk);
    r.time += chunk;
    check_probability(r.p, r.time);
    r.residual = residual();
  }
  return r;
}

std::vector<TailProbeRow> stationary_tail_probe(double lambda, double mu, double eps,
                                                const std::vector<std::size_t>& levels,
                                                double recursion_tolerance, const StationaryOptions& opts) {
  if (!(lambda >= 0.0) || !(mu > 0.0) || !(eps >= 0.0))
    throw ValidationError("tail probe needs lambda >= 0, mu > 0, eps >= 0");
  std::vector<TailProbeRow> rows;
  for (std::size_t n : levels) {
    if (n < 2) throw ValidationError("truncation level must be at least 2");
    const ChainSpec base = build_class_I(RateFamily::uniform(RateFunction::constant(lambda), 0),
                                         RateFamily::uniform(RateFunction::constant(mu), 1),
                                         StateSpace::truncated(n));
    const ChainSpec pert = perturb_spec(base, Perturbation{PerturbationMode::mass_arrival, eps, {}, false});
    StationaryResult st = stationary_distribution(pert, opts);
    TailProbeRow row;
    row.level = n;
    row.p0 = st.p[0];
    for (std::size_t k = 0; k < n; ++k) {
      const double lhs = mu * st.p[k + 1];
      const double rhs = lambda * st.p[k] + st.p[0] * eps / static_cast<double>(k + 1);
      row.recursion_residual = std::max(row.recursion_residual, std::fabs(lhs - rhs));
    }
    if (row.recursion_residual > recursion_tolerance)
      throw InvariantError("balance recursion fails at level " + std::to_string(n) + " by " +
                               format_double(row.recursion_residual),
                           st.time);
    row.p = std::move(st.p);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mcpert
