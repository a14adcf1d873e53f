#include <algorithm>
#include <cmath>
#include <vector>

#include "../analysis/weighted_columns.hpp"
#include "mcpert/bounds.hpp"
#include "mcpert/errors.hpp"

namespace mcpert {

namespace {

// ||A - A_bar||_1 for two slices of equal dimension.
double generator_gap(const GeneratorSlice& a, const GeneratorSlice& b) {
  const std::size_t n = a.dim() - 1;
  const std::size_t up = std::max(a.band.upper(), b.band.upper());
  const std::size_t lo = std::max(a.band.lower(), b.band.lower());
  double best = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const std::size_t i0 = j > up ? j - up : 0;
    const std::size_t i1 = std::min(n, j + lo);
    double s = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) s += std::fabs(a(i, j) - b(i, j));
    if (i0 > 0) s += std::fabs(a(0, j) - b(0, j));
    if (j == 0)
      for (std::size_t i = i1 + 1; i <= n; ++i) s += std::fabs(a(i, 0) - b(i, 0));
    best = std::max(best, s);
  }
  return best;
}

class WeightedGap {
public:
  WeightedGap(const ChainSpec& a, const ChainSpec& b, const WeightSequence& w)
      : ca_(a, w), cb_(b, w), col_(a.top() + 1, 0.0), seen_(a.top() + 1, 0) {}

  // ||D (B - B_bar) D^-1||_1 at t.
  double B(double t) {
    ca_.prepare(t);
    cb_.prepare(t);
    double best = 0.0;
    for (std::size_t j = 1; j <= ca_.n(); ++j) {
      touched_.clear();
      auto add = [this](double sign) {
        return [this, sign](std::size_t i, double v) {
          if (!seen_[i]) {
            seen_[i] = 1;
            touched_.push_back(i);
          }
          col_[i] += sign * v;
        };
      };
      ca_.column(j, add(1.0));
      cb_.column(j, add(-1.0));
      double s = 0.0;
      for (std::size_t i : touched_) {
        s += std::fabs(col_[i]);
        col_[i] = 0.0;
        seen_[i] = 0;
      }
      best = std::max(best, s);
    }
    return best;
  }

private:
  detail::WeightedColumns ca_, cb_;
  std::vector<double> col_;
  std::vector<char> seen_;
  std::vector<std::size_t> touched_;
};

double f_gap(const GeneratorSlice& a, const GeneratorSlice& b, const WeightSequence& w) {
  const std::size_t n = a.dim() - 1;
  std::vector<double> diff(n);
  for (std::size_t i = 1; i <= n; ++i) diff[i - 1] = a(i, 0) - b(i, 0);
  return w.norm1D(diff);
}

}  // namespace

std::optional<double> rate_epsilon(const Perturbation& p) {
  switch (p.mode) {
    case PerturbationMode::none:
      return 0.0;
    case PerturbationMode::uniform:
    case PerturbationMode::offsets: {
      if (p.offsets.empty()) return p.epsilon;
      double m = 0.0;
      for (const auto* v : {&p.offsets.births, &p.offsets.deaths, &p.offsets.arrivals, &p.offsets.services,
                            &p.offsets.catastrophes})
        for (double x : *v) m = std::max(m, std::fabs(x));
      return m;
    }
    case PerturbationMode::mass_arrival:
    case PerturbationMode::multiplicative:
      return std::nullopt;
  }
  return std::nullopt;
}

PerturbationGaps structured_gaps(const ChainSpec& spec, const ChainSpec& perturbed, const WeightSequence* w,
                                 std::optional<double> rate_eps, std::size_t grid) {
  if (spec.dim() != perturbed.dim()) throw ValidationError("perturbed chain must have the same state space");
  grid = std::max<std::size_t>(grid, 1);
  PerturbationGaps g;
  g.rate_eps = rate_eps;
  const bool weighted = w != nullptr && spec.chain_class() != ChainClass::V &&
                        perturbed.chain_class() != ChainClass::V && spec.top() > 0;
  g.weighted = weighted;
  std::optional<WeightSequence> wt;
  std::optional<WeightedGap> wg;
  if (weighted) {
    wt = w->truncated(spec.top());
    wg.emplace(spec, perturbed, *wt);
  }

  const double P = spec.period().value_or(1.0);
  const bool homogeneous = spec.homogeneous() && perturbed.homogeneous();
  const std::size_t samples = homogeneous ? 1 : grid;
  GeneratorSlice sa, sb;
  struct Sup {
    double coarse = 0.0, fine = 0.0;
  } A, B, F;
  auto sample = [&](double t, bool coarse) {
    spec.assemble(t, sa);
    perturbed.assemble(t, sb);
    auto upd = [coarse](Sup& s, double v) {
      if (coarse) s.coarse = std::max(s.coarse, v);
      s.fine = std::max(s.fine, v);
    };
    upd(A, generator_gap(sa, sb));
    if (weighted) {
      upd(B, wg->B(t));
      upd(F, f_gap(sa, sb, *wt));
    }
  };
  const double h = P / static_cast<double>(samples);
  for (std::size_t i = 0; i < samples; ++i) sample(static_cast<double>(i) * h, true);
  if (!homogeneous)
    for (std::size_t i = 0; i < samples; ++i) sample((static_cast<double>(i) + 0.5) * h, false);

  g.A = A.fine;
  g.B = B.fine;
  g.f = F.fine;
  g.grid = homogeneous ? 1 : 2 * samples;
  g.grid_delta = std::max({A.fine - A.coarse, B.fine - B.coarse, F.fine - F.coarse});
  if (rate_eps && *rate_eps > 0.0) {
    g.B_over_eps = g.B / *rate_eps;
    g.f_over_eps = g.f / *rate_eps;
    g.B_within_5eps = g.B <= 5.0 * *rate_eps * (1.0 + 1e-12);
    g.f_within_5eps = g.f <= 5.0 * *rate_eps * (1.0 + 1e-12);
  }
  return g;
}

}  // namespace mcpert
