#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcpert/errors.hpp"
#include "mcpert/model.hpp"

namespace mcpert {

RateFamily::RateFamily() : first_(1), tail_(Tail::zero) {}

RateFamily RateFamily::uniform(RateFunction r, std::size_t first) {
  RateFamily f;
  f.rates_ = {std::move(r)};
  f.first_ = first;
  f.uniform_ = true;
  return f;
}

RateFamily RateFamily::scaled(RateFunction r, std::vector<double> multipliers, std::size_t first, Tail tail) {
  for (double m : multipliers)
    if (!std::isfinite(m) || m < 0.0) throw ValidationError("rate multipliers must be finite and nonnegative");
  if (multipliers.empty()) return listed({}, first, tail);
  RateFamily f;
  f.rates_ = {std::move(r)};
  f.multipliers_ = std::move(multipliers);
  f.first_ = first;
  f.tail_ = tail;
  return f;
}

RateFamily RateFamily::listed(std::vector<RateFunction> rates, std::size_t first, Tail tail) {
  RateFamily f;
  f.rates_ = std::move(rates);
  f.first_ = first;
  f.tail_ = tail;
  return f;
}

std::size_t RateFamily::table_size() const noexcept {
  if (uniform_) return 1;
  return multipliers_.empty() ? rates_.size() : multipliers_.size();
}

bool RateFamily::defined(std::size_t k) const noexcept {
  if (k < first_) return tail_ == Tail::zero;
  if (uniform_) return true;
  return k - first_ < table_size() || tail_ == Tail::zero;
}

std::size_t RateFamily::support_end() const noexcept {
  if (uniform_) return std::numeric_limits<std::size_t>::max();
  return first_ + table_size();
}

bool RateFamily::is_zero() const noexcept { return !uniform_ && table_size() == 0; }

double RateFamily::eval(std::size_t k, double t) const {
  double v = 0.0;
  eval_range(k, t, std::span<double>(&v, 1));
  return v;
}

void RateFamily::eval_range(std::size_t first, double t, std::span<double> out) const {
  const std::size_t n = table_size();
  const bool shared = rates_.size() == 1;
  const double base = shared ? rates_[0].eval(t) : 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t k = first + i;
    if (k < first_ || (!uniform_ && k - first_ >= n)) {
      if (tail_ != Tail::zero)
        throw ValidationError("rate family has no entry for index " + std::to_string(k));
      out[i] = 0.0;
      continue;
    }
    const std::size_t r = uniform_ ? 0 : k - first_;
    double v = shared ? base : rates_[r].eval(t);
    if (!multipliers_.empty()) v *= multipliers_[r];
    v *= factor_;
    const std::size_t o = k - first_;
    if (o < offsets_.size()) {
      v += offsets_[o];
      if (clamp_) v = std::max(v, 0.0);
    }
    if (!(v >= 0.0)) throw EvaluationError("negative rate at index " + std::to_string(k), t);
    out[i] = v;
  }
}

RateFamily RateFamily::with_offsets(std::vector<double> offsets, bool clamp_at_zero) const {
  for (double o : offsets)
    if (!std::isfinite(o)) throw ValidationError("rate offsets must be finite");
  if (!uniform_ && offsets.size() > table_size())
    throw ValidationError("more rate offsets (" + std::to_string(offsets.size()) + ") than family entries (" +
                          std::to_string(table_size()) + ")");
  RateFamily f = *this;
  if (f.offsets_.size() < offsets.size()) f.offsets_.resize(offsets.size(), 0.0);
  for (std::size_t i = 0; i < offsets.size(); ++i) f.offsets_[i] += offsets[i];
  f.clamp_ = f.clamp_ || clamp_at_zero;
  return f;
}

RateFamily RateFamily::scaled_by(double factor) const {
  if (!std::isfinite(factor) || factor < 0.0) throw ValidationError("rate scale factor must be nonnegative");
  RateFamily f = *this;
  f.factor_ *= factor;
  for (double& o : f.offsets_) o *= factor;
  return f;
}

RateFamily RateFamily::with_period(double period) const {
  RateFamily f = *this;
  for (auto& r : f.rates_) r = r.with_period(period);
  return f;
}

}  // namespace mcpert
