#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mcpert/errors.hpp"
#include "mcpert/kernels.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

std::vector<double> delta_vector(std::size_t dim, std::size_t state) {
  if (state >= dim) throw ValidationError("initial state " + std::to_string(state) + " is outside the state space");
  std::vector<double> p(dim, 0.0);
  p[state] = 1.0;
  return p;
}

double mean_of(std::span<const double> p) {
  double m = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
  return m;
}

double default_step(const ChainSpec& spec) {
  const double L = spec.L();
  return L > 0.0 ? std::min(1e-3, 1.0 / (4.0 * L)) : 1e-3;
}

void check_probability(std::span<const double> p, double t, double conservation_tolerance,
                       double negativity_tolerance) {
  const double s = kernels::sum(p);
  if (!(std::fabs(s - 1.0) <= conservation_tolerance))
    throw InvariantError("probability mass drifted to " + format_double(s), t);
  const double m = p.empty() ? 0.0 : *std::min_element(p.begin(), p.end());
  if (!(m >= -negativity_tolerance)) throw InvariantError("negative probability " + format_double(m), t);
}

Propagator::Propagator(const ChainSpec& spec, double max_step) : spec_(&spec), max_step_(max_step) {
  if (!(max_step > 0.0) || !std::isfinite(max_step)) throw ValidationError("step must be positive");
  const double L = spec.L();
  if (L > 0.0 && max_step > 1.0 / (2.0 * L))
    throw ValidationError("step " + format_double(max_step) + " exceeds 1/(2L) = " + format_double(0.5 / L));
  const std::size_t d = spec.dim();
  k1_.resize(d);
  k2_.resize(d);
  k3_.resize(d);
  k4_.resize(d);
  tmp_.resize(d);
}

void Propagator::slice_at(double t, GeneratorSlice& out) { spec_->assemble(t, out); }

void Propagator::step(std::span<double> p, double t, double h) {
  const double t_end = t + h;
  const GeneratorSlice* A0 = &a0_;
  const GeneratorSlice* Am = &a_mid_;
  const GeneratorSlice* A1 = &a1_;
  if (spec_->homogeneous()) {
    if (!have_a1_) {
      slice_at(t, a0_);
      have_a1_ = true;
    }
    Am = A1 = A0;
  } else {
    if (have_a1_ && t == t1_cached_)
      std::swap(a0_, a1_);
    else
      slice_at(t, a0_);
    slice_at(t + 0.5 * h, a_mid_);
    slice_at(t_end, a1_);
    t1_cached_ = t_end;
    have_a1_ = true;
  }

  const auto& kt = kernels::active();
  const std::size_t n = p.size();
  A0->apply(p, k1_);
  kt.lincomb(p.data(), 0.5 * h, k1_.data(), tmp_.data(), n);
  Am->apply(tmp_, k2_);
  kt.lincomb(p.data(), 0.5 * h, k2_.data(), tmp_.data(), n);
  Am->apply(tmp_, k3_);
  kt.lincomb(p.data(), h, k3_.data(), tmp_.data(), n);
  A1->apply(tmp_, k4_);
  kt.rk4_combine(k1_.data(), k2_.data(), k3_.data(), k4_.data(), h / 6.0, p.data(), n);
}

void Propagator::advance(std::span<double> p, double t0, double t1) {
  if (p.size() != spec_->dim()) throw ValidationError("state vector has the wrong dimension");
  if (!(t1 >= t0)) throw ValidationError("integration interval must run forward in time");
  if (t1 == t0) return;
  const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / max_step_ * (1.0 - 1e-12)));
  const std::size_t m = std::max<std::size_t>(steps, 1);
  const double h = (t1 - t0) / static_cast<double>(m);
  double t = t0;
  for (std::size_t i = 0; i < m; ++i) {
    const double tn = i + 1 == m ? t1 : t0 + static_cast<double>(i + 1) * h;
    step(p, t, tn - t);
    t = tn;
  }
}

Trajectory integrate(const ChainSpec& spec, const ProbabilityVector& p0, double t1, const IntegrateOptions& opts) {
  if (p0.p.size() != spec.dim())
    throw ValidationError("initial distribution has " + std::to_string(p0.p.size()) + " entries, chain has " +
                          std::to_string(spec.dim()) + " states");
  try {
    check_probability(p0.p, p0.t, opts.conservation_tolerance, opts.negativity_tolerance);
  } catch (const InvariantError& e) {
    throw ValidationError(std::string("initial distribution is not a probability vector: ") + e.what());
  }
  if (!(t1 >= p0.t) || !std::isfinite(t1)) throw ValidationError("end time must not precede the start time");
  if (opts.stride < 0.0) throw ValidationError("output stride must be nonnegative");

  const double step = opts.step.value_or(default_step(spec));
  Propagator prop(spec, step);
  Trajectory tr;
  tr.label = spec.label();
  tr.initial = opts.initial;
  tr.step = step;
  tr.min_probability = 1.0;

  std::vector<double> p = p0.p;
  auto record = [&](double t) {
    check_probability(p, t, opts.conservation_tolerance, opts.negativity_tolerance);
    tr.max_conservation_error = std::max(tr.max_conservation_error, std::fabs(kernels::sum(p) - 1.0));
    tr.min_probability = std::min(tr.min_probability, *std::min_element(p.begin(), p.end()));
    tr.times.push_back(t);
    tr.states.push_back(p);
  };

  record(p0.t);
  const double span = t1 - p0.t;
  if (span == 0.0) return tr;
  const double stride = opts.stride > 0.0 ? opts.stride : span;
  const auto intervals = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / stride - 1e-9)));
  double t = p0.t;
  for (std::size_t i = 1; i <= intervals; ++i) {
    const double tn = i == intervals ? t1 : p0.t + static_cast<double>(i) * stride;
    prop.advance(p, t, tn);
    t = tn;
    record(t);
  }
  return tr;
}

}  // namespace mcpert
