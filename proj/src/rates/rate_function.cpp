#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <variant>

#include "mcpert/errors.hpp"
#include "mcpert/quadrature.hpp"
#include "mcpert/rates.hpp"

namespace mcpert {

struct RateFunction::Impl {
  std::variant<double, RateExpr, std::vector<RateStep>> body;
};

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Minimal scanner for the table literal `table: [(t0,v0),(t1,v1),...]`.
class TableScanner {
public:
  TableScanner(std::string_view src, std::size_t pos) : src_(src), pos_(pos) {}

  std::vector<RateStep> run() {
    expect('[');
    std::vector<RateStep> steps;
    if (!peek(']')) {
      do {
        expect('(');
        const double t = number();
        expect(',');
        const double v = number();
        expect(')');
        steps.push_back({t, v});
      } while (accept(','));
    }
    expect(']');
    skip();
    if (pos_ != src_.size()) throw ParseError("trailing characters after table", pos_);
    if (steps.empty()) throw ParseError("empty rate table", pos_);
    return steps;
  }

private:
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "' in rate table", pos_);
  }
  double number() {
    skip();
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (res.ec != std::errc() || !std::isfinite(v)) throw ParseError("malformed number in rate table", pos_);
    pos_ = static_cast<std::size_t>(res.ptr - src_.data());
    return v;
  }

  std::string_view src_;
  std::size_t pos_;
};

}  // namespace

RateFunction RateFunction::constant(double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw ValidationError("constant rate must be finite and nonnegative, got " + fmt17(value));
  return RateFunction(std::make_shared<const Impl>(Impl{value}), std::nullopt);
}

RateFunction RateFunction::expression(RateExpr expr) {
  return RateFunction(std::make_shared<const Impl>(Impl{std::move(expr)}), std::nullopt);
}

RateFunction RateFunction::table(std::vector<RateStep> steps) {
  if (steps.empty()) throw ValidationError("rate table needs at least one breakpoint");
  if (steps.front().start != 0.0) throw ValidationError("rate table must start at t=0");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!std::isfinite(steps[i].value) || steps[i].value < 0.0)
      throw ValidationError("rate table values must be finite and nonnegative");
    if (i > 0 && !(steps[i].start > steps[i - 1].start))
      throw ValidationError("rate table breakpoints must increase strictly");
  }
  return RateFunction(std::make_shared<const Impl>(Impl{std::move(steps)}), std::nullopt);
}

RateFunction RateFunction::with_period(double period) const {
  if (!std::isfinite(period) || !(period > 0.0)) throw ValidationError("rate period must be positive");
  return RateFunction(impl_, period);
}

bool RateFunction::is_constant() const noexcept {
  if (std::holds_alternative<double>(impl_->body)) return true;
  if (const auto* e = std::get_if<RateExpr>(&impl_->body)) return !e->depends_on_time();
  return std::get<std::vector<RateStep>>(impl_->body).size() == 1;
}

bool RateFunction::is_table() const noexcept {
  return std::holds_alternative<std::vector<RateStep>>(impl_->body);
}

double RateFunction::eval(double t) const {
  double v;
  if (const auto* c = std::get_if<double>(&impl_->body)) {
    v = *c;
  } else if (const auto* e = std::get_if<RateExpr>(&impl_->body)) {
    v = (*e)(t);
  } else {
    const auto& steps = std::get<std::vector<RateStep>>(impl_->body);
    double u = t;
    if (period_) {
      u = std::fmod(t, *period_);
      if (u < 0.0) u += *period_;
    }
    auto it = std::upper_bound(steps.begin(), steps.end(), u,
                               [](double x, const RateStep& s) { return x < s.start; });
    v = it == steps.begin() ? steps.front().value : std::prev(it)->value;
  }
  if (!(v >= 0.0)) {
    if (!std::isfinite(v)) throw EvaluationError("non-finite rate value", t);
    throw EvaluationError("negative rate value " + fmt17(v), t);
  }
  return v;
}

std::string RateFunction::to_string() const {
  if (const auto* c = std::get_if<double>(&impl_->body)) return fmt17(*c);
  if (const auto* e = std::get_if<RateExpr>(&impl_->body)) return e->to_string();
  std::string s = "table: [";
  const auto& steps = std::get<std::vector<RateStep>>(impl_->body);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) s += ", ";
    s += "(" + fmt17(steps[i].start) + ", " + fmt17(steps[i].value) + ")";
  }
  return s + "]";
}

RateFunction parse_rate(std::string_view source) {
  std::size_t pos = 0;
  while (pos < source.size() && std::isspace(static_cast<unsigned char>(source[pos]))) ++pos;
  constexpr std::string_view kTable = "table:";
  if (source.substr(pos, kTable.size()) == kTable) {
    auto steps = TableScanner(source, pos + kTable.size()).run();
    try {
      return RateFunction::table(std::move(steps));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), pos);
    }
  }
  return RateFunction::expression(RateExpr::parse(source));
}

double eval_rate(const RateFunction& r, double t) { return r.eval(t); }

double periodic_mean(const RateFunction& r) {
  const auto p = r.period();
  if (!p) {
    if (r.is_constant()) return r.eval(0.0);
    throw ValidationError("periodic_mean requires a declared period");
  }
  return mean_over([&r](double t) { return r.eval(t); }, 0.0, *p);
}

}  // namespace mcpert
