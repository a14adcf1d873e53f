#pragma once

// Perturbation bounds on the limiting behaviour of a perturbed chain.
//
// Uniform approach: with 2 beta(t,s) <= c e^{-b(t-s)} and ||A - A_bar|| <= eps,
//   limsup ||p - p_bar|| <= (1 + log(c/2)) eps / b.
// Weighted approach: with ||U(t,s)||_1D <= M e^{-a(t-s)} and gaps
//   gB = sup ||B - B_bar||_1D, gf = sup ||f - f_bar||_1D,
//   limsup ||p - p_bar||_1D <= M (M gB f_sup + a gf) / (a (a - M gB)).

#include <cstddef>
#include <optional>
#include <string>

#include "mcpert/analysis.hpp"
#include "mcpert/model.hpp"

namespace mcpert {

/// (1 + log(c/2)) eps / b. Throws InfeasibleError when b <= 0.
double uniform_bound(double c, double b, double eps);
double uniform_bound(const ErgodicityCertificate& cert, double eps);

/// S (1 + log(c/2)) eps / b: limiting-mean distance on states 0..S.
double uniform_mean_bound(double c, double b, double eps, std::size_t S);
double uniform_mean_bound(const ErgodicityCertificate& cert, double eps, std::size_t S);

/// Bound on ||p(s + dt) - p_bar(s + dt)|| given the distance at s.
double uniform_finite_time(double diff_at_s, double dt, double c, double b, double eps);
double uniform_finite_time(double diff_at_s, double dt, const ErgodicityCertificate& cert, double eps);

/// Weighted bound in the 1D norm. Throws InfeasibleError unless a > M gB.
double weighted_bound(double M, double a, double f_sup, double gap_B, double gap_f);
double weighted_bound(const ErgodicityCertificate& cert, double gap_B, double gap_f);

/// weighted_bound / W. Throws InfeasibleError when W <= 0.
double weighted_mean_bound(double bound_1D, double W);

/// (4 / d) bound_1D. Throws ValidationError when d <= 0.
double weighted_to_tv(double bound_1D, double d);

/// Grid suprema of the perturbation gaps between two chains of equal size.
struct PerturbationGaps {
  double B = 0.0;  ///< sup ||B - B_bar||_1D
  double f = 0.0;  ///< sup ||f - f_bar||_1D
  double A = 0.0;  ///< sup ||A - A_bar||_1 (the uniform eps-hat)
  bool weighted = false;  ///< B and f were computed (class I-IV with weights)
  std::size_t grid = 0;
  double grid_delta = 0.0;  ///< largest change of any gap under grid refinement

  // Cross-checks against the structural multipliers: with every rate moved
  // by at most rate_eps, |B gap| <= 5 rate_eps and |f gap| <= 5 rate_eps.
  std::optional<double> rate_eps;
  double B_over_eps = 0.0;
  double f_over_eps = 0.0;
  bool B_within_5eps = true;
  bool f_within_5eps = true;
};

/// Throws ValidationError when the chains differ in size.
PerturbationGaps structured_gaps(const ChainSpec& spec, const ChainSpec& perturbed, const WeightSequence* w,
                                 std::optional<double> rate_eps = std::nullopt, std::size_t grid = 4096);

/// Largest per-rate offset magnitude of a perturbation, when it has one.
std::optional<double> rate_epsilon(const Perturbation& p);

struct BoundReport {
  double epsilon = 0.0;  ///< nominal perturbation size
  PerturbationGaps gaps;

  bool uniform_available = false;
  std::string uniform_reason;
  double uniform_tv = 0.0;
  bool uniform_mean_available = false;
  double uniform_mean = 0.0;
  bool uniform_c_below_2 = false;

  bool weighted_available = false;
  std::string weighted_reason;
  bool weighted_feasible = false;
  double weighted_1D = 0.0;
  double weighted_tv = 0.0;
  bool weighted_mean_available = false;
  double weighted_mean = 0.0;
  double gap_B_critical = 0.0;  ///< a / M: the weighted bound needs gB below this
  double eps_max = 0.0;         ///< nominal eps at which gB reaches the critical value

  /// "uniform", "weighted", "tie" or "none"
  std::string smaller;
};

/// Either certificate may be null. `S` is the top state, used by the uniform
/// mean bound for finite chains.
BoundReport evaluate_bounds(const ErgodicityCertificate* weighted, const ErgodicityCertificate* uniform,
                            const PerturbationGaps& gaps, double epsilon, std::size_t S, bool countable);

}  // namespace mcpert
