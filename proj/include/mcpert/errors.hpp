#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcpert {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed rate expression or scenario text. `offset` is a byte offset into
/// the parsed source (for scenarios: into the whole file).
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// A model, weight sequence or scenario violates its contract.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Rate evaluation produced a negative, non-finite or undefined value.
class EvaluationError : public Error {
public:
  EvaluationError(const std::string& what, double t)
      : Error(what + " at t=" + std::to_string(t)), t_(t) {}
  double time() const noexcept { return t_; }

private:
  double t_;
};

/// Solver conservation / nonnegativity breach.
class InvariantError : public Error {
public:
  InvariantError(const std::string& what, double t)
      : Error(what + " at t=" + std::to_string(t)), t_(t) {}
  double time() const noexcept { return t_; }

private:
  double t_;
};

/// No certificate, or a bound whose denominator is not positive.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// Limiting regime not reached within the horizon.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double final_distance)
      : Error(what + " (final distance " + std::to_string(final_distance) + ")"),
        final_distance_(final_distance) {}
  double final_distance() const noexcept { return final_distance_; }

private:
  double final_distance_;
};

}  // namespace mcpert
