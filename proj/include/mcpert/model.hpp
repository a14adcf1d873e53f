#pragma once

// Inhomogeneous continuous-time Markov chains of the five structural classes.
//
// Conventions: states are 0..n. A(t) is the transposed intensity matrix,
// A(i, j) = rate of the jump j -> i, and every column of A sums to zero, so the
// forward Kolmogorov system reads dp/dt = A(t) p.
//
// Countable chains are truncated at n. Jumps that would leave 0..n are dropped
// and the diagonal is recomputed, which keeps every slice a valid generator.

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcpert/linalg.hpp"
#include "mcpert/rates.hpp"

namespace mcpert {

enum class ChainClass { I, II, III, IV, V };

std::string_view to_string(ChainClass c);
/// Accepts "I".."V" (also "1".."5"); throws ValidationError otherwise.
ChainClass chain_class_from_string(std::string_view s);

struct StateSpace {
  std::size_t top = 0;  ///< highest state index: S when finite, n when truncated
  bool countable = false;

  static StateSpace finite(std::size_t S) { return {S, false}; }
  static StateSpace truncated(std::size_t n) { return {n, true}; }
  std::size_t dim() const noexcept { return top + 1; }

  friend bool operator==(const StateSpace&, const StateSpace&) = default;
};

/// A k-indexed family of rates: lambda_k, mu_k, a_k, b_k or catastrophe
/// intensities. Either one shared RateFunction times a per-k multiplier, or
/// an explicit list of RateFunctions.
class RateFamily {
public:
  /// What an index past the table means.
  enum class Tail { undefined, zero };

  /// The zero family.
  RateFamily();

  static RateFamily zero() { return {}; }
  /// The same rate at every index k >= first.
  static RateFamily uniform(RateFunction r, std::size_t first = 0);
  /// r(t) * multipliers[k - first].
  static RateFamily scaled(RateFunction r, std::vector<double> multipliers, std::size_t first = 1,
                           Tail tail = Tail::undefined);
  static RateFamily listed(std::vector<RateFunction> rates, std::size_t first = 1, Tail tail = Tail::undefined);

  bool defined(std::size_t k) const noexcept;
  /// One past the last index that can carry a nonzero rate; npos if unbounded.
  std::size_t support_end() const noexcept;
  std::size_t first_index() const noexcept { return first_; }
  bool is_uniform() const noexcept { return uniform_; }
  bool is_zero() const noexcept;

  /// Throws ValidationError if k is undefined, EvaluationError if negative.
  double eval(std::size_t k, double t) const;
  /// out[k - first] = value at k for k in [first, first + out.size()).
  /// Evaluates each distinct RateFunction once.
  void eval_range(std::size_t first, double t, std::span<double> out) const;

  /// Additive per-index offsets (offsets[k - first_index()]) applied inside the
  /// family's support. With clamp_at_zero the perturbed rate is max(0, .).
  RateFamily with_offsets(std::vector<double> offsets, bool clamp_at_zero) const;
  RateFamily scaled_by(double factor) const;
  RateFamily with_period(double period) const;

  /// Number of table entries (1 for uniform families).
  std::size_t table_size() const noexcept;
  const std::vector<RateFunction>& functions() const noexcept { return rates_; }
  const std::vector<double>& multipliers() const noexcept { return multipliers_; }
  const std::vector<double>& offsets() const noexcept { return offsets_; }
  Tail tail() const noexcept { return tail_; }
  double factor() const noexcept { return factor_; }
  bool clamps() const noexcept { return clamp_; }

private:
  std::vector<RateFunction> rates_;   // size 1 when shared
  std::vector<double> multipliers_;   // empty: all ones
  std::vector<double> offsets_;
  std::size_t first_ = 1;
  Tail tail_ = Tail::zero;
  bool uniform_ = false;
  bool clamp_ = false;
  double factor_ = 1.0;
};

/// A single extra transition from -> to (used for general class-V bases and
/// for perturbations that leave the class structure).
struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  RateFunction rate;
  double scale = 1.0;
};

/// Transposed intensity matrix at a fixed t. Entries outside the band may
/// live in the row-0 border (jumps into state 0) or the column-0 border
/// (jumps out of state 0).
class GeneratorSlice {
public:
  double t = 0.0;
  BandMatrix band;
  std::vector<double> row0;  ///< (0, j) entries not held by the band; empty if unused
  std::vector<double> col0;  ///< (i, 0) entries not held by the band; empty if unused

  std::size_t dim() const noexcept { return band.dim(); }
  double operator()(std::size_t i, std::size_t j) const;
  /// out = A p
  void apply(std::span<const double> p, std::span<double> out) const;
  DenseMatrix to_dense() const;
  double max_abs_diagonal() const;
  /// l1 operator norm.
  double norm1() const;

private:
  friend class ChainSpec;
  std::vector<double> scratch_;
};

/// B(t) (indices 1..n) and f(t) = (a_10, a_20, ...) of the reduced system
/// dz/dt = B z + f for z = (p_1, ..., p_n).
struct ReducedSystemSlice {
  double t = 0.0;
  DenseMatrix B;
  std::vector<double> f;
};

/// dp/dt = A* p + g with g = (beta*, 0, ...).
struct CatastropheReduction {
  double t = 0.0;
  double beta = 0.0;
  DenseMatrix A_star;
  std::vector<double> g;
};

struct BuildOptions {
  /// Uniform bound on |a_ii(t)|; validated on the grid. Computed when absent.
  std::optional<double> L;
  /// Validation samples per period (per unit time when aperiodic).
  std::size_t grid_samples = 4096;
  std::string label;
};

struct Perturbation;

class ChainSpec {
public:
  ChainClass chain_class() const noexcept { return class_; }
  /// For class V: the class of the base structure, or V for a general base.
  ChainClass base_class() const noexcept { return base_class_; }
  const StateSpace& space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return space_.dim(); }
  std::size_t top() const noexcept { return space_.top; }
  std::optional<double> period() const noexcept { return period_; }
  /// No rate depends on t.
  bool homogeneous() const noexcept { return homogeneous_; }
  double L() const noexcept { return L_; }
  std::size_t grid_samples() const noexcept { return grid_samples_; }
  const std::string& label() const noexcept { return label_; }

  const RateFamily& births() const noexcept { return births_; }
  const RateFamily& deaths() const noexcept { return deaths_; }
  const RateFamily& arrivals() const noexcept { return arrivals_; }
  const RateFamily& services() const noexcept { return services_; }
  const RateFamily& catastrophes() const noexcept { return catastrophes_; }
  const std::vector<Transition>& extra_transitions() const noexcept { return extra_; }

  /// True when the explicit weighted-matrix formulas of classes I-IV apply.
  bool has_class_structure() const noexcept { return class_ != ChainClass::V && extra_.empty(); }

  std::size_t lower_bandwidth() const noexcept { return lower_; }
  std::size_t upper_bandwidth() const noexcept { return upper_; }

  /// Fills `out` with A(t), reusing its storage. Throws EvaluationError.
  void assemble(double t, GeneratorSlice& out) const;

  /// Sample times of the validation grid (one period, or [0, 1)).
  std::vector<double> grid(std::size_t samples) const;

private:
  friend ChainSpec build_class_I(RateFamily, RateFamily, StateSpace, const BuildOptions&);
  friend ChainSpec build_class_II(RateFamily, RateFamily, StateSpace, const BuildOptions&);
  friend ChainSpec build_class_III(RateFamily, RateFamily, StateSpace, const BuildOptions&);
  friend ChainSpec build_class_IV(RateFamily, RateFamily, StateSpace, const BuildOptions&);
  friend ChainSpec build_class_V(const ChainSpec&, RateFamily, const BuildOptions&);
  friend ChainSpec build_class_V(StateSpace, std::vector<Transition>, RateFamily, const BuildOptions&);
  friend ChainSpec perturb_spec(const ChainSpec&, const Perturbation&);

  void finalize(const BuildOptions& opts);
  void require(const RateFamily& fam, std::size_t first, std::size_t last, const char* what) const;
  void add_family_entries(double t, GeneratorSlice& out) const;

  ChainClass class_ = ChainClass::I;
  ChainClass base_class_ = ChainClass::I;
  StateSpace space_;
  RateFamily births_, deaths_, arrivals_, services_, catastrophes_;
  std::vector<Transition> extra_;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
  bool row0_border_ = false;
  bool col0_border_ = false;
  double L_ = 0.0;
  std::optional<double> period_;
  bool homogeneous_ = true;
  std::size_t grid_samples_ = 4096;
  std::string label_;
};

/// Birth-death process: lambda_k for k = 0..S-1, mu_k for k = 1..S.
ChainSpec build_class_I(RateFamily birth, RateFamily death, StateSpace size, const BuildOptions& opts = {});
/// Group arrivals a_k (jump i -> i+k), single service mu_k (k -> k-1).
ChainSpec build_class_II(RateFamily group_arrivals, RateFamily service, StateSpace size,
                         const BuildOptions& opts = {});
/// Single arrivals lambda_k (k -> k+1), group service b_k (jump i+k -> i).
ChainSpec build_class_III(RateFamily arrivals, RateFamily group_service, StateSpace size,
                          const BuildOptions& opts = {});
/// Group arrivals a_k and group service b_k.
ChainSpec build_class_IV(RateFamily group_arrivals, RateFamily group_service, StateSpace size,
                         const BuildOptions& opts = {});
/// `base` overlaid with catastrophes k -> 0 at rate a_{0k}(t), k >= 1.
ChainSpec build_class_V(const ChainSpec& base, RateFamily catastrophes, const BuildOptions& opts = {});
/// General intensities given transition by transition, plus catastrophes.
ChainSpec build_class_V(StateSpace size, std::vector<Transition> intensities, RateFamily catastrophes,
                        const BuildOptions& opts = {});

GeneratorSlice generator_at(const ChainSpec& spec, double t);
/// Throws ValidationError when the state space has fewer than 2 states.
ReducedSystemSlice reduced_at(const ChainSpec& spec, double t);
/// beta* is the infimum of the catastrophe intensities a_{0k}(t), k = 1..n.
/// Throws ValidationError for non-class-V specs.
CatastropheReduction catastrophe_reduced_at(const ChainSpec& spec, double t);

enum class PerturbationMode { none, uniform, offsets, mass_arrival, multiplicative };

std::string_view to_string(PerturbationMode m);
PerturbationMode perturbation_mode_from_string(std::string_view s);

/// Per-index additive offsets for each rate family; indices start at the
/// family's first index. Empty vectors leave the family untouched.
struct RateOffsets {
  std::vector<double> births, deaths, arrivals, services, catastrophes;
  bool empty() const noexcept {
    return births.empty() && deaths.empty() && arrivals.empty() && services.empty() && catastrophes.empty();
  }
};

struct Perturbation {
  PerturbationMode mode = PerturbationMode::none;
  double epsilon = 0.0;
  RateOffsets offsets;  ///< uniform / offsets modes
  bool clamp_at_zero = false;
};

/// Modes:
///  - uniform / offsets: per-rate additive offsets within the same structure;
///  - mass_arrival: jumps 0 -> k at eps/(k(k+1)); the tail mass eps/(n+1) of
///    jumps beyond the truncation lands on n, so a_00 changes by exactly -eps;
///  - multiplicative: every rate scaled by (1 + eps).
/// Throws ValidationError if a perturbed rate would turn negative.
ChainSpec perturb_spec(const ChainSpec& spec, const Perturbation& perturbation);

/// Offsets uniform in [-magnitude, magnitude] for every family the chain uses,
/// over each family's in-range support.
RateOffsets random_offsets(const ChainSpec& spec, double magnitude, std::mt19937_64& rng);

}  // namespace mcpert
