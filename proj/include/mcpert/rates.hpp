#pragma once

// Time-dependent transition intensities.
//
// Grammar (whitespace-insensitive):
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | number | "t" | "pi" | func "(" expr ("," expr)? ")" | "(" expr ")"
//   func   := "sin" | "cos" | "exp" | "min" | "max"
//   number := decimal literal, optionally with an exponent (2.5, .5, 1e-3)
//
// sin/cos/exp take one argument, min/max two.
//
// A rate may also be a right-continuous step table written
//   table: [(t0,v0),(t1,v1),...]
// with t0 = 0 and strictly increasing breakpoints.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcpert {

class RateExpr {
public:
  /// Throws ParseError (syntax, unknown identifier, empty input).
  static RateExpr parse(std::string_view source);

  /// Raw value; may be negative. Throws EvaluationError on division by zero
  /// or a non-finite result.
  double operator()(double t) const;

  /// Fully parenthesized form that re-parses to an identical program.
  std::string to_string() const;

  bool depends_on_time() const noexcept;

  struct Program;

private:
  explicit RateExpr(std::shared_ptr<const Program> p) : program_(std::move(p)) {}
  std::shared_ptr<const Program> program_;
};

struct RateStep {
  double start;
  double value;
  friend bool operator==(const RateStep&, const RateStep&) = default;
};

/// Immutable, cheap to copy, safe to evaluate concurrently.
class RateFunction {
public:
  RateFunction() : RateFunction(constant(0.0)) {}

  static RateFunction constant(double value);
  static RateFunction expression(RateExpr expr);
  /// Throws ValidationError unless steps start at 0, increase strictly and are
  /// nonnegative.
  static RateFunction table(std::vector<RateStep> steps);

  /// Declared period; period-dependent computations trust it as given.
  RateFunction with_period(double period) const;
  std::optional<double> period() const noexcept { return period_; }

  bool is_constant() const noexcept;
  bool is_table() const noexcept;

  /// Precondition t >= 0. Throws EvaluationError for negative or non-finite
  /// values (the message carries t).
  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  /// Canonical source text (grammar string or table form).
  std::string to_string() const;

private:
  struct Impl;
  explicit RateFunction(std::shared_ptr<const Impl> impl, std::optional<double> period)
      : impl_(std::move(impl)), period_(period) {}
  std::shared_ptr<const Impl> impl_;
  std::optional<double> period_;
};

/// Parses either a grammar expression or a `table: [...]` literal.
RateFunction parse_rate(std::string_view source);

double eval_rate(const RateFunction& r, double t);

/// (1/P) * integral over one declared period. Throws ValidationError when no
/// period is declared.
double periodic_mean(const RateFunction& r);

}  // namespace mcpert
