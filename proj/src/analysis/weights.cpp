#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcpert/analysis.hpp"
#include "mcpert/errors.hpp"

namespace mcpert {

WeightSequence::WeightSequence(Kind k, double delta, std::vector<double> d)
    : kind_(k), delta_(delta), d_(std::move(d)) {
  W_ = d_.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  norm_ = 0.0;
  for (std::size_t i = 0; i < d_.size(); ++i) {
    W_ = std::min(W_, d_[i] / static_cast<double>(i + 1));
    norm_ += d_[i];
  }
}

WeightSequence WeightSequence::unit(std::size_t n) { return {Kind::unit, 1.0, std::vector<double>(n, 1.0)}; }

WeightSequence WeightSequence::geometric(double delta, std::size_t n) {
  if (!std::isfinite(delta) || delta < 1.0) throw ValidationError("geometric weights need delta >= 1");
  std::vector<double> d(n);
  double v = 1.0;
  for (auto& x : d) {
    x = v;
    v *= delta;
  }
  if (n > 0 && !std::isfinite(d.back())) throw ValidationError("geometric weights overflow");
  return {Kind::geometric, delta, std::move(d)};
}

WeightSequence WeightSequence::listed(std::vector<double> d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || !(d[i] > 0.0)) throw ValidationError("weights must be positive and finite");
    if (i > 0 && d[i] < d[i - 1]) throw ValidationError("weights must be nondecreasing");
  }
  return {Kind::listed, 1.0, std::move(d)};
}

WeightSequence WeightSequence::truncated(std::size_t n) const {
  if (n > d_.size())
    throw ValidationError("weight sequence has " + std::to_string(d_.size()) + " entries but the chain needs " +
                          std::to_string(n));
  return {kind_, delta_, std::vector<double>(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(n))};
}

void WeightSequence::apply(std::span<const double> z, std::span<double> out) const {
  if (z.size() > d_.size()) throw ValidationError("weight sequence shorter than the vector");
  double tail = 0.0;
  for (std::size_t i = z.size(); i-- > 0;) {
    tail += z[i];
    out[i] = d_[i] * tail;
  }
}

double WeightSequence::norm1D(std::span<const double> z) const {
  if (z.size() > d_.size()) throw ValidationError("weight sequence shorter than the vector");
  double tail = 0.0;
  double s = 0.0;
  for (std::size_t i = z.size(); i-- > 0;) {
    tail += z[i];
    s += d_[i] * std::fabs(tail);
  }
  return s;
}

}  // namespace mcpert
