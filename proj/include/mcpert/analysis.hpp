#pragma once

// Weighted-norm machinery and ergodicity certificates.
//
// For weights 1 <= d_1 <= d_2 <= ... the norm ||z||_1D = ||D z||_1 uses the
// upper-triangular D with D(i, j) = d_i for j >= i. B**(t) = D B(t) D^-1.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcpert/linalg.hpp"
#include "mcpert/model.hpp"
#include "mcpert/rates.hpp"

namespace mcpert {

class WeightSequence {
public:
  enum class Kind { unit, geometric, listed };

  static WeightSequence unit(std::size_t n);
  /// d_1 = 1, d_{k+1} = delta * d_k. Requires delta >= 1.
  static WeightSequence geometric(double delta, std::size_t n);
  /// Throws ValidationError unless positive, finite and nondecreasing.
  static WeightSequence listed(std::vector<double> d);

  Kind kind() const noexcept { return kind_; }
  double delta() const noexcept { return delta_; }
  std::size_t size() const noexcept { return d_.size(); }
  /// d_i, 1-based.
  double operator[](std::size_t i) const { return d_[i - 1]; }
  std::span<const double> values() const noexcept { return d_; }
  /// The first n weights; throws ValidationError when fewer are available.
  WeightSequence truncated(std::size_t n) const;

  /// inf d_i
  double d() const noexcept { return d_.empty() ? 1.0 : d_.front(); }
  /// inf d_i / i; positive W enables limiting-mean bounds.
  double W() const noexcept { return W_; }
  /// ||D||_1 = sum of all d_i (the last column of D).
  double norm1_of_D() const noexcept { return norm_; }

  /// out = D z, i.e. out_i = d_i * sum_{j >= i} z_j.
  void apply(std::span<const double> z, std::span<double> out) const;
  double norm1D(std::span<const double> z) const;

private:
  WeightSequence(Kind k, double delta, std::vector<double> d);
  Kind kind_ = Kind::unit;
  double delta_ = 1.0;
  std::vector<double> d_;
  double W_ = 0.0;
  double norm_ = 0.0;
};

/// B**(t) with its column measures. alpha_i[j - 1] belongs to column j:
/// alpha_j = -(b**_jj + sum_{i != j} |b**_ij|), alpha = min_j alpha_j.
struct WeightedSlice {
  double t = 0.0;
  DenseMatrix B_star;
  std::vector<double> alpha_i;
  double alpha = 0.0;
};

/// Explicit class I-IV formulas. Chains with extra transitions (perturbed
/// overlays) fall back to the direct similarity transform. Throws
/// ValidationError for class V or when the weights do not cover 1..n.
WeightedSlice weighted_matrix_at(const ChainSpec& spec, const WeightSequence& w, double t);
/// D B(t) D^-1 computed from reduced_at; defined for every class.
WeightedSlice weighted_matrix_direct(const ChainSpec& spec, const WeightSequence& w, double t);

/// t -> (alpha_i(t), alpha(t)) without materializing B**. Costs O(n * width)
/// per evaluation for class-structured chains.
class AlphaProfile {
public:
  AlphaProfile(const ChainSpec& spec, const WeightSequence& w);
  ~AlphaProfile();
  AlphaProfile(AlphaProfile&&) noexcept;
  AlphaProfile& operator=(AlphaProfile&&) noexcept;

  struct Sample {
    std::vector<double> alpha_i;
    double alpha = 0.0;
  };
  Sample at(double t) const;
  double alpha(double t) const;
  /// ||B(t)||_1D = ||B**(t)||_1
  double weighted_norm(double t) const;

private:
  struct State;
  std::unique_ptr<State> state_;
};

AlphaProfile alpha_profile(const ChainSpec& spec, const WeightSequence& w);

/// ||f(t)||_1D
double weighted_f_norm(const ChainSpec& spec, const WeightSequence& w, double t);

/// Literal sup over u in [0, P] of integral_0^u (f - mean). Throws
/// ValidationError when f has no declared period (constants are accepted).
double k_star(const RateFunction& f, double mean);

/// Running-integral extremes of an arbitrary P-periodic function.
struct KStar {
  double sup = 0.0;      ///< the literal sup (K*)
  double inf = 0.0;
  /// sup - inf: the constant for which e^{-int_s^t f} <= e^{K} e^{-mean (t-s)}
  /// holds for every s <= t.
  double oscillation = 0.0;
};
KStar k_star_of(const std::function<double(double)>& f, double mean, double period);

/// Sup over the grid, the grid refined once, and the change under refinement.
struct GridSup {
  double value = 0.0;
  double coarse = 0.0;
  double delta = 0.0;
  std::size_t samples = 0;  ///< samples of the refined grid
};
GridSup grid_sup(const std::function<double(double)>& f, double period, std::size_t samples);

enum class Approach { weighted, uniform };
std::string_view to_string(Approach a);

struct ErgodicityCertificate {
  Approach approach = Approach::weighted;
  bool certified = false;
  std::string reason;  ///< why not certified
  double period = 1.0;

  // weighted approach: ||U(t,s)||_1D <= M e^{-a (t-s)}
  double M = 1.0;
  double a = 0.0;
  double alpha_star = 0.0;

  // uniform approach: 2 beta(t,s) <= c e^{-b (t-s)}
  double c = 0.0;
  double b = 0.0;
  double beta_mean = 0.0;

  double K_star = 0.0;  ///< literal sup of the running integral
  double K_osc = 0.0;   ///< oscillation actually used for M or c

  double d = 1.0;
  double W = 0.0;
  double norm_D = 0.0;
  double B_sup = 0.0;  ///< grid sup of ||B(t)||_1D
  double f_sup = 0.0;  ///< grid sup of ||f(t)||_1D
  double L = 0.0;
  std::size_t grid = 0;
  double B_grid_delta = 0.0;
  double f_grid_delta = 0.0;
};

struct CertificateOptions {
  std::size_t grid = 4096;
};

/// Weighted certificate for class I-IV chains with a declared period.
/// Throws ValidationError for class V or aperiodic chains.
ErgodicityCertificate weighted_certificate(const ChainSpec& spec, const WeightSequence& w,
                                           const CertificateOptions& opts = {});

/// Uniform certificate from the catastrophe intensities of a class-V chain.
ErgodicityCertificate uniform_certificate_classV(const ChainSpec& spec, const CertificateOptions& opts = {});

/// c = 4 ||D||_1 M / d, b = a. Throws InfeasibleError for uncertified input.
ErgodicityCertificate uniform_from_weighted(const ErgodicityCertificate& weighted, const WeightSequence& w);

/// integral_s^t alpha(u) du for the profile's chain.
double alpha_integral(const AlphaProfile& profile, double s, double t);
/// integral_s^t beta*(u) du for a class-V chain.
double beta_integral(const ChainSpec& spec, double s, double t);
/// beta*(t) = min_k a_{0k}(t).
double beta_star(const ChainSpec& spec, double t);

}  // namespace mcpert
