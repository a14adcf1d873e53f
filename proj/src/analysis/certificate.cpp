#include <algorithm>
#include <cmath>
#include <limits>

#include "mcpert/analysis.hpp"
#include "mcpert/errors.hpp"
#include "mcpert/quadrature.hpp"

namespace mcpert {

std::string_view to_string(Approach a) { return a == Approach::weighted ? "weighted" : "uniform"; }

KStar k_star_of(const std::function<double(double)>& f, double mean, double period) {
  const auto ext = running_integral_extremes(f, mean, period, 4096);
  return {ext.sup, ext.inf, ext.oscillation()};
}

double k_star(const RateFunction& f, double mean) {
  const auto p = f.period();
  if (!p) {
    if (f.is_constant()) return 0.0;
    throw ValidationError("K* requires a declared period");
  }
  return k_star_of([&f](double t) { return f.eval(t); }, mean, *p).sup;
}

GridSup grid_sup(const std::function<double(double)>& f, double period, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 1);
  GridSup g;
  g.coarse = -std::numeric_limits<double>::infinity();
  const double h = period / static_cast<double>(samples);
  for (std::size_t i = 0; i < samples; ++i) g.coarse = std::max(g.coarse, f(static_cast<double>(i) * h));
  g.value = g.coarse;
  for (std::size_t i = 0; i < samples; ++i) g.value = std::max(g.value, f((static_cast<double>(i) + 0.5) * h));
  g.delta = g.value - g.coarse;
  g.samples = 2 * samples;
  return g;
}

namespace {

double require_period(const ChainSpec& spec) {
  if (!spec.period())
    throw ValidationError("certificates need periodic rates: declare a common period for every time-dependent rate");
  return *spec.period();
}

// Round-off in the generator entries makes a constant profile wobble at the
// 1e-14 level; its running integral is then zero, not quadrature noise.
bool flat_on_grid(const std::function<double(double)>& f, double period, std::size_t samples, double scale) {
  samples = std::max<std::size_t>(samples, 1);
  const double h = period / static_cast<double>(2 * samples);
  double lo = f(0.0), hi = lo;
  for (std::size_t i = 1; i < 2 * samples; ++i) {
    const double v = f(static_cast<double>(i) * h);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo <= 1e-12 * std::max(1.0, scale);
}

KStar k_star_checked(const std::function<double(double)>& f, double mean, double period, std::size_t samples,
                     double scale) {
  if (flat_on_grid(f, period, samples, scale)) return {};
  return k_star_of(f, mean, period);
}

}  // namespace

ErgodicityCertificate weighted_certificate(const ChainSpec& spec, const WeightSequence& w,
                                           const CertificateOptions& opts) {
  if (spec.chain_class() == ChainClass::V)
    throw ValidationError("weighted certificates cover classes I-IV; use the uniform approach for class V");
  const double P = require_period(spec);
  const WeightSequence wt = w.truncated(spec.top());
  const AlphaProfile profile(spec, wt);
  auto alpha = [&profile](double t) { return profile.alpha(t); };

  ErgodicityCertificate c;
  c.approach = Approach::weighted;
  c.period = P;
  c.alpha_star = mean_over(alpha, 0.0, P);
  const KStar k = k_star_checked(alpha, c.alpha_star, P, opts.grid, spec.L());
  c.K_star = k.sup;
  c.K_osc = k.oscillation;
  c.d = wt.d();
  c.W = wt.W();
  c.norm_D = wt.norm1_of_D();
  c.L = spec.L();
  const GridSup B = grid_sup([&](double t) { return profile.weighted_norm(t); }, P, opts.grid);
  const GridSup f = grid_sup([&](double t) { return weighted_f_norm(spec, wt, t); }, P, opts.grid);
  c.B_sup = B.value;
  c.B_grid_delta = B.delta;
  c.f_sup = f.value;
  c.f_grid_delta = f.delta;
  c.grid = B.samples;
  if (c.alpha_star > 0.0) {
    c.certified = true;
    c.M = std::exp(c.K_osc);
    c.a = c.alpha_star;
  } else {
    c.reason = "mean of alpha(t) over one period is not positive";
  }
  return c;
}

double beta_star(const ChainSpec& spec, double t) {
  if (spec.chain_class() != ChainClass::V) throw ValidationError("beta* is defined for class-V chains only");
  const std::size_t n = spec.top();
  if (n == 0) return 0.0;
  std::vector<double> v(n);
  spec.catastrophes().eval_range(1, t, v);
  return *std::min_element(v.begin(), v.end());
}

ErgodicityCertificate uniform_certificate_classV(const ChainSpec& spec, const CertificateOptions& opts) {
  if (spec.chain_class() != ChainClass::V) throw ValidationError("catastrophe certificate needs a class-V chain");
  const double P = require_period(spec);
  auto beta = [&spec](double t) { return beta_star(spec, t); };
  ErgodicityCertificate c;
  c.approach = Approach::uniform;
  c.period = P;
  c.beta_mean = mean_over(beta, 0.0, P);
  const KStar k = k_star_checked(beta, c.beta_mean, P, opts.grid, spec.L());
  c.K_star = k.sup;
  c.K_osc = k.oscillation;
  c.L = spec.L();
  c.grid = 2 * opts.grid;
  if (c.beta_mean > 0.0) {
    c.certified = true;
    c.c = 2.0 * std::exp(c.K_osc);
    c.b = c.beta_mean;
  } else {
    c.reason = "catastrophe intensities have zero mean infimum";
  }
  return c;
}

ErgodicityCertificate uniform_from_weighted(const ErgodicityCertificate& weighted, const WeightSequence& w) {
  if (weighted.approach != Approach::weighted) throw ValidationError("expected a weighted certificate");
  if (!weighted.certified || !(weighted.a > 0.0))
    throw InfeasibleError("weighted certificate is not certified; no uniform constants follow");
  ErgodicityCertificate c = weighted;
  c.approach = Approach::uniform;
  c.norm_D = w.norm1_of_D();
  c.d = w.d();
  c.c = 4.0 * c.norm_D * weighted.M / c.d;
  c.b = weighted.a;
  c.beta_mean = weighted.a;
  return c;
}

double alpha_integral(const AlphaProfile& profile, double s, double t) {
  return integrate([&profile](double u) { return profile.alpha(u); }, s, t).value;
}

double beta_integral(const ChainSpec& spec, double s, double t) {
  return integrate([&spec](double u) { return beta_star(spec, u); }, s, t).value;
}

}  // namespace mcpert
