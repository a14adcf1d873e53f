#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "mcpert/analysis.hpp"
#include "mcpert/errors.hpp"
#include "mcpert/model.hpp"

namespace mcpert::detail {

// Column-by-column access to B**(t) = D B(t) D^-1 (indices 1..n).
//
// Class-structured chains use the closed-form entries, so a column costs
// O(width). Other chains go through the dense similarity transform.
class WeightedColumns {
public:
  WeightedColumns(const ChainSpec& spec, const WeightSequence& w) : spec_(spec), w_(w), n_(spec.top()) {
    if (spec.chain_class() == ChainClass::V)
      throw ValidationError("B** is not defined for class-V chains; use the uniform approach");
    if (w.size() < n_)
      throw ValidationError("weight sequence has " + std::to_string(w.size()) + " entries but the chain needs " +
                            std::to_string(n_));
    direct_ = !spec.has_class_structure();
  }

  std::size_t n() const noexcept { return n_; }
  bool direct() const noexcept { return direct_; }

  void prepare(double t);

  // Calls emit(i, value) for the nonzero pattern of column j (1-based),
  // including the diagonal.
  template <class F>
  void column(std::size_t j, F&& emit) const {
    if (direct_) {
      for (std::size_t i = 1; i <= n_; ++i) emit(i, dense_(i - 1, j - 1));
      return;
    }
    const ChainClass c = spec_.chain_class();
    const bool single_up = c == ChainClass::I || c == ChainClass::III;
    const bool single_down = c == ChainClass::I || c == ChainClass::II;
    const bool group_up = c == ChainClass::II || c == ChainClass::IV;
    const bool group_down = c == ChainClass::III || c == ChainClass::IV;
    const std::size_t S = n_;
    auto ratio = [&](std::size_t i) { return w_[i] / w_[j]; };

    double diag = 0.0;
    if (single_up) diag -= lam_[j - 1];
    if (single_down) diag -= mu_[j];
    if (group_up) diag -= a_prefix_[S - j + 1];
    if (group_down) diag -= b_prefix_[j];
    emit(j, diag);

    if (single_down && j >= 2) emit(j - 1, ratio(j - 1) * mu_[j - 1]);
    if (group_down) {
      const std::size_t lo = j > wb_ ? j - wb_ : 1;
      for (std::size_t i = lo; i < j; ++i) emit(i, ratio(i) * (b_[j - i] - b_[j]));
    }
    if (single_up && j + 1 <= S) emit(j + 1, ratio(j + 1) * lam_[j]);
    if (group_up) {
      const std::size_t hi = std::min(S, j + wa_);
      const double tail = a_[S - j + 1];
      for (std::size_t i = j + 1; i <= hi; ++i) emit(i, ratio(i) * (a_[i - j] - tail));
    }
  }

private:
  const ChainSpec& spec_;
  const WeightSequence& w_;
  std::size_t n_;
  bool direct_ = false;
  std::size_t wa_ = 0;
  std::size_t wb_ = 0;
  std::vector<double> lam_;       // lambda_k, k = 0..n-1
  std::vector<double> mu_;        // mu_k at index k, k = 1..n
  std::vector<double> a_, b_;     // a_m, b_m at index m, m = 1..n (zero past the support)
  std::vector<double> a_prefix_;  // sum_{m <= x} a_m
  std::vector<double> b_prefix_;
  DenseMatrix dense_;
};

}  // namespace mcpert::detail
