#include <algorithm>
#include <cmath>

#include "mcpert/bounds.hpp"
#include "mcpert/errors.hpp"

namespace mcpert {

namespace {

void require_rate(double b) {
  if (!(b > 0.0)) throw InfeasibleError("uniform certificate has no positive decay rate");
}

void require_eps(double eps) {
  if (!(eps >= 0.0)) throw ValidationError("perturbation size must be nonnegative");
}

}  // namespace

double uniform_bound(double c, double b, double eps) {
  require_rate(b);
  require_eps(eps);
  return (1.0 + std::log(c / 2.0)) * eps / b;
}

double uniform_bound(const ErgodicityCertificate& cert, double eps) {
  if (!cert.certified) throw InfeasibleError("uniform certificate not available: " + cert.reason);
  return uniform_bound(cert.c, cert.b, eps);
}

double uniform_mean_bound(double c, double b, double eps, std::size_t S) {
  return static_cast<double>(S) * uniform_bound(c, b, eps);
}

double uniform_mean_bound(const ErgodicityCertificate& cert, double eps, std::size_t S) {
  return static_cast<double>(S) * uniform_bound(cert, eps);
}

double uniform_finite_time(double diff_at_s, double dt, double c, double b, double eps) {
  require_rate(b);
  require_eps(eps);
  if (!(dt >= 0.0)) throw ValidationError("elapsed time must be nonnegative");
  const double log_half_c = std::log(c / 2.0);
  if (dt < log_half_c / b) return diff_at_s + dt * eps;
  const double decay = std::exp(-b * dt);
  return 0.5 * c * decay * diff_at_s + (log_half_c + 1.0 - c * decay) * eps / b;
}

double uniform_finite_time(double diff_at_s, double dt, const ErgodicityCertificate& cert, double eps) {
  if (!cert.certified) throw InfeasibleError("uniform certificate not available: " + cert.reason);
  return uniform_finite_time(diff_at_s, dt, cert.c, cert.b, eps);
}

double weighted_bound(double M, double a, double f_sup, double gap_B, double gap_f) {
  if (!(a > 0.0)) throw InfeasibleError("weighted certificate has no positive decay rate");
  if (!(gap_B >= 0.0) || !(gap_f >= 0.0)) throw ValidationError("perturbation gaps must be nonnegative");
  const double margin = a - M * gap_B;
  if (!(margin > 0.0))
    throw InfeasibleError("weighted bound infeasible: a <= M |B - B_bar| (no bound at this perturbation size)");
  return M * (M * gap_B * f_sup + a * gap_f) / (a * margin);
}

double weighted_bound(const ErgodicityCertificate& cert, double gap_B, double gap_f) {
  if (!cert.certified) throw InfeasibleError("weighted certificate not available: " + cert.reason);
  return weighted_bound(cert.M, cert.a, cert.f_sup, gap_B, gap_f);
}

double weighted_mean_bound(double bound_1D, double W) {
  if (!(W > 0.0)) throw InfeasibleError("W = inf d_i / i is not positive; limiting means are not bounded");
  return bound_1D / W;
}

double weighted_to_tv(double bound_1D, double d) {
  if (!(d > 0.0)) throw ValidationError("d = inf d_i must be positive");
  return 4.0 / d * bound_1D;
}

BoundReport evaluate_bounds(const ErgodicityCertificate* weighted, const ErgodicityCertificate* uniform,
                            const PerturbationGaps& gaps, double epsilon, std::size_t S, bool countable) {
  BoundReport r;
  r.epsilon = epsilon;
  r.gaps = gaps;

  if (uniform == nullptr) {
    r.uniform_reason = "no uniform certificate";
  } else if (!uniform->certified) {
    r.uniform_reason = uniform->reason;
  } else {
    r.uniform_available = true;
    r.uniform_tv = uniform_bound(*uniform, gaps.A);
    r.uniform_c_below_2 = uniform->c < 2.0;
    if (!countable) {
      r.uniform_mean_available = true;
      r.uniform_mean = uniform_mean_bound(*uniform, gaps.A, S);
    }
  }

  if (weighted == nullptr) {
    r.weighted_reason = "no weighted certificate";
  } else if (!weighted->certified) {
    r.weighted_reason = weighted->reason;
  } else if (!gaps.weighted) {
    r.weighted_reason = "weighted gaps not computed";
  } else {
    r.weighted_available = true;
    r.gap_B_critical = weighted->a / weighted->M;
    const double ratio = epsilon > 0.0 && gaps.B > 0.0 ? gaps.B / epsilon : 5.0;
    r.eps_max = r.gap_B_critical / ratio;
    if (weighted->a > weighted->M * gaps.B) {
      r.weighted_feasible = true;
      r.weighted_1D = weighted_bound(*weighted, gaps.B, gaps.f);
      r.weighted_tv = weighted_to_tv(r.weighted_1D, weighted->d);
      if (weighted->W > 0.0) {
        r.weighted_mean_available = true;
        r.weighted_mean = weighted_mean_bound(r.weighted_1D, weighted->W);
      }
    } else {
      r.weighted_reason = "a <= M |B - B_bar|: no weighted bound at this perturbation size";
    }
  }

  const bool u = r.uniform_available;
  const bool w = r.weighted_available && r.weighted_feasible;
  if (u && w)
    r.smaller = r.uniform_tv < r.weighted_tv ? "uniform" : r.weighted_tv < r.uniform_tv ? "weighted" : "tie";
  else
    r.smaller = u ? "uniform" : w ? "weighted" : "none";
  return r;
}

}  // namespace mcpert
