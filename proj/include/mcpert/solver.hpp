#pragma once

// Fixed-step classical RK4 for the forward Kolmogorov system dp/dt = A(t) p.
// Conservation and nonnegativity are checked at output samples, never
// enforced.

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mcpert/model.hpp"

namespace mcpert {

struct ProbabilityVector {
  double t = 0.0;
  std::vector<double> p;
};

/// Probability mass at one state.
std::vector<double> delta_vector(std::size_t dim, std::size_t state);
double mean_of(std::span<const double> p);
inline double mean_of(const ProbabilityVector& v) { return mean_of(v.p); }

/// Default step: min(1e-3, 1/(4L)).
double default_step(const ChainSpec& spec);

class Propagator {
public:
  /// Throws ValidationError when step > 1/(2L) or step <= 0.
  Propagator(const ChainSpec& spec, double max_step);

  double max_step() const noexcept { return max_step_; }
  const ChainSpec& spec() const noexcept { return *spec_; }

  /// Advances p from t0 to t1 with ceil((t1 - t0) / max_step) equal steps.
  void advance(std::span<double> p, double t0, double t1);
  /// One RK4 step of size h from t.
  void step(std::span<double> p, double t, double h);

private:
  void slice_at(double t, GeneratorSlice& out);

  const ChainSpec* spec_;
  double max_step_;
  GeneratorSlice a0_, a_mid_, a1_;
  double t1_cached_ = -1.0;
  bool have_a1_ = false;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::string label;
  std::string initial;
  double step = 0.0;
  double max_conservation_error = 0.0;
  double min_probability = 0.0;

  std::size_t size() const noexcept { return times.size(); }
};

struct IntegrateOptions {
  std::optional<double> step;  ///< default_step(spec) when absent
  /// Output spacing; the full interval when 0.
  double stride = 0.0;
  double conservation_tolerance = 1e-8;
  double negativity_tolerance = 1e-10;
  std::string initial;  ///< provenance text
};

/// Throws ValidationError for an invalid p0, InvariantError (with the first
/// offending t) when a sample breaks conservation or nonnegativity.
Trajectory integrate(const ChainSpec& spec, const ProbabilityVector& p0, double t1, const IntegrateOptions& opts = {});

void check_probability(std::span<const double> p, double t, double conservation_tolerance = 1e-8,
                       double negativity_tolerance = 1e-10);

struct RegimeOptions {
  double tolerance = 1e-6;
  double max_horizon = 1000.0;
  /// T is at least this (period-aligned), e.g. to place the limit interval.
  double min_horizon = 0.0;
  std::optional<double> step;
  std::size_t samples_per_period = 100;
};

struct RegimeReport {
  double period = 1.0;
  double horizon = 0.0;  ///< T: first period boundary with distance below tolerance
  std::vector<double> boundary_times;
  std::vector<double> boundary_distances;  ///< ||p^0 - p^n||_1 at each period boundary
  Trajectory limit;                        ///< from state 0, over [T, T + P]
  std::vector<double> phi;                 ///< mean_of(limit.states[i])
  double phi_min = 0.0;
  double phi_max = 0.0;
};

/// Throws ConvergenceError when the horizon runs out first.
RegimeReport limiting_regime(const ChainSpec& spec, const RegimeOptions& opts = {});

/// 1/2 max_{i,j} ||U(t,s) e_i - U(t,s) e_j||_1. Throws ValidationError when
/// the dimension exceeds `cap`.
double empirical_beta(const ChainSpec& spec, double t, double s, std::optional<double> step = std::nullopt,
                      std::size_t cap = 512);

struct PerturbationDistance {
  std::vector<double> times;
  std::vector<double> distances;
  double final_period_sup = 0.0;
  double period = 1.0;
};

/// Integrates both chains from p0 over [p0.t, p0.t + horizon].
PerturbationDistance empirical_perturbation_distance(const ChainSpec& spec, const ChainSpec& perturbed,
                                                     const ProbabilityVector& p0, double horizon,
                                                     const IntegrateOptions& opts = {});

struct StationaryOptions {
  double residual_tolerance = 1e-13;  ///< on ||A p||_1
  double max_time = 1e5;
  std::optional<double> step;  ///< 1/(4L) when absent
};

struct StationaryResult {
  std::vector<double> p;
  double residual = 0.0;
  double time = 0.0;
};

/// Long-horizon integration of a time-homogeneous chain from state 0.
/// Throws ValidationError for time-dependent chains, ConvergenceError when
/// max_time passes first.
StationaryResult stationary_distribution(const ChainSpec& spec, const StationaryOptions& opts = {});

struct TailProbeRow {
  std::size_t level = 0;
  double p0 = 0.0;
  /// max over interior k of |mu p_{k+1} - lambda p_k - p_0 eps / (k + 1)|
  double recursion_residual = 0.0;
  std::vector<double> p;
};

/// Birth-death chain with constant lambda, mu and the mass-arrival
/// perturbation of size eps, truncated at each level. Throws InvariantError
/// when the balance recursion fails by more than `recursion_tolerance`.
std::vector<TailProbeRow> stationary_tail_probe(double lambda, double mu, double eps,
                                                const std::vector<std::size_t>& levels,
                                                double recursion_tolerance = 1e-6,
                                                const StationaryOptions& opts = {});

// CSV with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_mean_csv(std::ostream& os, const Trajectory& tr);
/// Selected states only: header t,p_<k>,...
void write_states_csv(std::ostream& os, const Trajectory& tr, const std::vector<std::size_t>& states);
/// Generic table: header line then rows.
void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
std::string format_double(double v);

}  // namespace mcpert
