#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "mcpert/errors.hpp"
#include "mcpert/model.hpp"

namespace mcpert {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Width needed by a group family a_k / b_k on 0..n.
std::size_t group_width(const RateFamily& fam, std::size_t n) {
  if (fam.is_zero()) return 0;
  const std::size_t end = fam.support_end();
  if (end == std::numeric_limits<std::size_t>::max() || end - 1 >= n) return n;
  return end - 1;
}

void collect_period(const RateFamily& fam, std::optional<double>& period) {
  for (const auto& r : fam.functions()) {
    if (r.is_constant()) continue;
    const auto p = r.period();
    if (!p) continue;
    if (period && std::fabs(*period - *p) > 1e-12 * std::max(1.0, *p))
      throw ValidationError("rate functions declare different periods (" + fmt(*period) + " and " + fmt(*p) + ")");
    period = p;
  }
}

bool family_is_periodic(const RateFamily& fam) {
  return std::all_of(fam.functions().begin(), fam.functions().end(),
                     [](const RateFunction& r) { return r.is_constant() || r.period().has_value(); });
}

}  // namespace

std::string_view to_string(ChainClass c) {
  switch (c) {
    case ChainClass::I:
      return "I";
    case ChainClass::II:
      return "II";
    case ChainClass::III:
      return "III";
    case ChainClass::IV:
      return "IV";
    case ChainClass::V:
      return "V";
  }
  return "?";
}

ChainClass chain_class_from_string(std::string_view s) {
  if (s == "I" || s == "1") return ChainClass::I;
  if (s == "II" || s == "2") return ChainClass::II;
  if (s == "III" || s == "3") return ChainClass::III;
  if (s == "IV" || s == "4") return ChainClass::IV;
  if (s == "V" || s == "5") return ChainClass::V;
  throw ValidationError("unknown chain class '" + std::string(s) + "' (expected I, II, III, IV or V)");
}

void ChainSpec::require(const RateFamily& fam, std::size_t first, std::size_t last, const char* what) const {
  for (std::size_t k = first; k <= last; ++k)
    if (!fam.defined(k)) throw ValidationError(std::string("missing ") + what + " rate for index " + std::to_string(k));
}

std::vector<double> ChainSpec::grid(std::size_t samples) const {
  samples = std::max<std::size_t>(samples, 1);
  const double span = period_.value_or(1.0);
  std::vector<double> ts(samples);
  for (std::size_t i = 0; i < samples; ++i) ts[i] = span * static_cast<double>(i) / static_cast<double>(samples);
  return ts;
}

void ChainSpec::finalize(const BuildOptions& opts) {
  const std::size_t n = space_.top;
  if (opts.grid_samples == 0) throw ValidationError("grid_samples must be positive");
  grid_samples_ = opts.grid_samples;
  label_ = opts.label;

  const ChainClass structure = class_ == ChainClass::V ? base_class_ : class_;
  lower_ = upper_ = 0;
  if (n > 0) {
    switch (structure) {
      case ChainClass::I:
        require(births_, 0, n - 1, "birth");
        require(deaths_, 1, n, "death");
        lower_ = upper_ = 1;
        break;
      case ChainClass::II:
        require(arrivals_, 1, n, "group-arrival");
        require(deaths_, 1, n, "service");
        lower_ = group_width(arrivals_, n);
        upper_ = 1;
        break;
      case ChainClass::III:
        require(births_, 0, n - 1, "arrival");
        require(services_, 1, n, "group-service");
        lower_ = 1;
        upper_ = group_width(services_, n);
        break;
      case ChainClass::IV:
        require(arrivals_, 1, n, "group-arrival");
        require(services_, 1, n, "group-service");
        lower_ = group_width(arrivals_, n);
        upper_ = group_width(services_, n);
        break;
      case ChainClass::V:
        break;
    }
    if (class_ == ChainClass::V) require(catastrophes_, 1, n, "catastrophe");
  }

  for (const auto& tr : extra_) {
    if (tr.from > n || tr.to > n)
      throw ValidationError("transition " + std::to_string(tr.from) + "->" + std::to_string(tr.to) +
                            " is outside the state space 0.." + std::to_string(n));
    if (tr.from == tr.to) throw ValidationError("self-transition at state " + std::to_string(tr.from));
    if (!std::isfinite(tr.scale) || tr.scale < 0.0) throw ValidationError("transition scale must be nonnegative");
    if (tr.to > tr.from && tr.from != 0) lower_ = std::max(lower_, tr.to - tr.from);
    if (tr.to < tr.from && tr.to != 0) upper_ = std::max(upper_, tr.from - tr.to);
  }
  row0_border_ = col0_border_ = false;
  for (const auto& tr : extra_) {
    if (tr.from == 0 && tr.to > lower_) col0_border_ = true;
    if (tr.to == 0 && tr.from > upper_) row0_border_ = true;
  }
  if (class_ == ChainClass::V && !catastrophes_.is_zero() && n > upper_) row0_border_ = true;

  std::optional<double> period;
  bool periodic = true;
  homogeneous_ = true;
  for (const RateFamily* fam : {&births_, &deaths_, &arrivals_, &services_, &catastrophes_}) {
    collect_period(*fam, period);
    periodic = periodic && family_is_periodic(*fam);
    for (const auto& r : fam->functions()) homogeneous_ = homogeneous_ && r.is_constant();
  }
  for (const auto& tr : extra_) {
    collect_period(RateFamily::uniform(tr.rate), period);
    periodic = periodic && (tr.rate.is_constant() || tr.rate.period().has_value());
    homogeneous_ = homogeneous_ && tr.rate.is_constant();
  }
  // A chain is periodic when every time-dependent rate declares the same
  // period; fully constant chains are treated as 1-periodic.
  if (periodic)
    period_ = period.value_or(1.0);
  else
    period_.reset();

  GeneratorSlice slice;
  double worst = 0.0;
  double worst_t = 0.0;
  for (double t : grid(homogeneous_ ? 1 : grid_samples_)) {
    assemble(t, slice);
    const double m = slice.max_abs_diagonal();
    if (m > worst) {
      worst = m;
      worst_t = t;
    }
  }
  if (opts.L) {
    if (!std::isfinite(*opts.L) || *opts.L < 0.0) throw ValidationError("L must be finite and nonnegative");
    if (worst > *opts.L * (1.0 + 1e-12))
      throw ValidationError("sup |a_ii(t)| = " + fmt(worst) + " at t=" + fmt(worst_t) + " exceeds L = " +
                            fmt(*opts.L));
    L_ = *opts.L;
  } else {
    L_ = worst;
  }
}

void ChainSpec::add_family_entries(double t, GeneratorSlice& out) const {
  const std::size_t n = space_.top;
  if (n == 0) return;
  BandMatrix& band = out.band;
  std::span<double> v(out.scratch_.data(), n);
  const ChainClass structure = class_ == ChainClass::V ? base_class_ : class_;

  auto single_up = [&](const RateFamily& fam) {  // k -> k+1 at fam_k, k = 0..n-1
    fam.eval_range(0, t, v);
    auto d = band.diagonal(-1);
    for (std::size_t k = 0; k < n; ++k) d[k + 1] += v[k];
  };
  auto single_down = [&](const RateFamily& fam) {  // k -> k-1 at fam_k, k = 1..n
    fam.eval_range(1, t, v);
    auto d = band.diagonal(1);
    for (std::size_t k = 1; k <= n; ++k) d[k - 1] += v[k - 1];
  };
  auto group_up = [&](const RateFamily& fam) {  // i -> i+m at fam_m
    const std::size_t w = group_width(fam, n);
    if (w == 0) return;
    fam.eval_range(1, t, v.first(w));
    for (std::size_t m = 1; m <= w; ++m) {
      if (v[m - 1] == 0.0) continue;
      auto d = band.diagonal(-static_cast<std::ptrdiff_t>(m));
      for (std::size_t i = m; i <= n; ++i) d[i] += v[m - 1];
    }
  };
  auto group_down = [&](const RateFamily& fam) {  // i+m -> i at fam_m
    const std::size_t w = group_width(fam, n);
    if (w == 0) return;
    fam.eval_range(1, t, v.first(w));
    for (std::size_t m = 1; m <= w; ++m) {
      if (v[m - 1] == 0.0) continue;
      auto d = band.diagonal(static_cast<std::ptrdiff_t>(m));
      for (std::size_t i = 0; i + m <= n; ++i) d[i] += v[m - 1];
    }
  };

  switch (structure) {
    case ChainClass::I:
      single_up(births_);
      single_down(deaths_);
      break;
    case ChainClass::II:
      group_up(arrivals_);
      single_down(deaths_);
      break;
    case ChainClass::III:
      single_up(births_);
      group_down(services_);
      break;
    case ChainClass::IV:
      group_up(arrivals_);
      group_down(services_);
      break;
    case ChainClass::V:
      break;
  }
}

void ChainSpec::assemble(double t, GeneratorSlice& out) const {
  const std::size_t dim = space_.dim();
  const std::size_t n = space_.top;
  if (out.band.dim() != dim || out.band.lower() != std::min(lower_, n) || out.band.upper() != std::min(upper_, n))
    out.band = BandMatrix(dim, lower_, upper_);
  else
    out.band.set_zero();
  out.row0.assign(row0_border_ ? dim : 0, 0.0);
  out.col0.assign(col0_border_ ? dim : 0, 0.0);
  out.scratch_.assign(2 * dim, 0.0);
  out.t = t;

  auto add = [&](std::size_t to, std::size_t from, double r) {
    if (out.band.in_band(to, from))
      out.band.ref(to, from) += r;
    else if (to == 0)
      out.row0[from] += r;
    else
      out.col0[to] += r;
  };

  add_family_entries(t, out);

  if (class_ == ChainClass::V && n > 0 && !catastrophes_.is_zero()) {
    std::span<double> v(out.scratch_.data(), n);
    catastrophes_.eval_range(1, t, v);
    for (std::size_t k = 1; k <= n; ++k)
      if (v[k - 1] != 0.0) add(0, k, v[k - 1]);
  }
  for (const auto& tr : extra_) {
    const double r = tr.rate.eval(t) * tr.scale;
    if (r != 0.0) add(tr.to, tr.from, r);
  }

  std::span<double> acc(out.scratch_.data() + dim, dim);
  std::fill(acc.begin(), acc.end(), 0.0);
  out.band.accumulate_offdiag_column_abs(acc);
  for (std::size_t j = 1; j < out.row0.size(); ++j) acc[j] += out.row0[j];
  for (std::size_t i = 1; i < out.col0.size(); ++i) acc[0] += out.col0[i];
  auto diag = out.band.diagonal(0);
  for (std::size_t j = 0; j < dim; ++j) diag[j] = -acc[j];
}

ChainSpec build_class_I(RateFamily birth, RateFamily death, StateSpace size, const BuildOptions& opts) {
  ChainSpec s;
  s.class_ = s.base_class_ = ChainClass::I;
  s.space_ = size;
  s.births_ = std::move(birth);
  s.deaths_ = std::move(death);
  s.finalize(opts);
  return s;
}

ChainSpec build_class_II(RateFamily group_arrivals, RateFamily service, StateSpace size, const BuildOptions& opts) {
  ChainSpec s;
  s.class_ = s.base_class_ = ChainClass::II;
  s.space_ = size;
  s.arrivals_ = std::move(group_arrivals);
  s.deaths_ = std::move(service);
  s.finalize(opts);
  return s;
}

ChainSpec build_class_III(RateFamily arrivals, RateFamily group_service, StateSpace size, const BuildOptions& opts) {
  ChainSpec s;
  s.class_ = s.base_class_ = ChainClass::III;
  s.space_ = size;
  s.births_ = std::move(arrivals);
  s.services_ = std::move(group_service);
  s.finalize(opts);
  return s;
}

ChainSpec build_class_IV(RateFamily group_arrivals, RateFamily group_service, StateSpace size,
                         const BuildOptions& opts) {
  ChainSpec s;
  s.class_ = s.base_class_ = ChainClass::IV;
  s.space_ = size;
  s.arrivals_ = std::move(group_arrivals);
  s.services_ = std::move(group_service);
  s.finalize(opts);
  return s;
}

ChainSpec build_class_V(const ChainSpec& base, RateFamily catastrophes, const BuildOptions& opts) {
  if (base.class_ == ChainClass::V) throw ValidationError("class-V base must itself be of class I-IV");
  ChainSpec s = base;
  s.class_ = ChainClass::V;
  s.base_class_ = base.class_;
  s.catastrophes_ = std::move(catastrophes);
  s.finalize(opts);
  return s;
}

ChainSpec build_class_V(StateSpace size, std::vector<Transition> intensities, RateFamily catastrophes,
                        const BuildOptions& opts) {
  ChainSpec s;
  s.class_ = s.base_class_ = ChainClass::V;
  s.space_ = size;
  s.extra_ = std::move(intensities);
  s.catastrophes_ = std::move(catastrophes);
  s.finalize(opts);
  return s;
}

}  // namespace mcpert
