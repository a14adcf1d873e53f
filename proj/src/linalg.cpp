#include "mcpert/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "mcpert/kernels.hpp"

namespace mcpert {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  assert(x.size() == cols_ && y.size() == rows_);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = kernels::dot(row(i), x);
}

BandMatrix::BandMatrix(std::size_t dim, std::size_t lower, std::size_t upper)
    : dim_(dim),
      lower_(dim == 0 ? 0 : std::min(lower, dim - 1)),
      upper_(dim == 0 ? 0 : std::min(upper, dim - 1)),
      data_((lower_ + upper_ + 1) * dim, 0.0) {}

double BandMatrix::at(std::size_t i, std::size_t j) const noexcept {
  if (i >= dim_ || j >= dim_ || !in_band(i, j)) return 0.0;
  return data_[(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i) +
                static_cast<std::ptrdiff_t>(lower_)) * dim_ + i];
}

std::span<double> BandMatrix::diagonal(std::ptrdiff_t k) {
  return {data_.data() + (k + static_cast<std::ptrdiff_t>(lower_)) * static_cast<std::ptrdiff_t>(dim_), dim_};
}

std::span<const double> BandMatrix::diagonal(std::ptrdiff_t k) const {
  return {data_.data() + (k + static_cast<std::ptrdiff_t>(lower_)) * static_cast<std::ptrdiff_t>(dim_), dim_};
}

void BandMatrix::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

void BandMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  assert(x.size() == dim_ && y.size() == dim_);
  std::fill(y.begin(), y.end(), 0.0);
  const auto& kt = kernels::active();
  const auto lo = -static_cast<std::ptrdiff_t>(lower_);
  const auto hi = static_cast<std::ptrdiff_t>(upper_);
  for (std::ptrdiff_t k = lo; k <= hi; ++k) {
    const std::size_t r0 = first_row(k);
    const std::size_t r1 = end_row(k);
    if (r1 <= r0) continue;
    kt.mul_add(diagonal(k).data() + r0, x.data() + r0 + k, y.data() + r0, r1 - r0);
  }
}

void BandMatrix::accumulate_offdiag_column_abs(std::span<double> acc) const {
  assert(acc.size() == dim_);
  const auto& kt = kernels::active();
  const auto lo = -static_cast<std::ptrdiff_t>(lower_);
  const auto hi = static_cast<std::ptrdiff_t>(upper_);
  for (std::ptrdiff_t k = lo; k <= hi; ++k) {
    if (k == 0) continue;
    const std::size_t r0 = first_row(k);
    const std::size_t r1 = end_row(k);
    if (r1 <= r0) continue;
    // entry (i, i+k) belongs to column i+k
    kt.abs_accumulate(diagonal(k).data() + r0, acc.data() + r0 + k, r1 - r0);
  }
}

DenseMatrix BandMatrix::to_dense() const {
  DenseMatrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = (i > lower_ ? i - lower_ : 0); j < dim_ && j <= i + upper_; ++j) m(i, j) = at(i, j);
  return m;
}

double norm1(const DenseMatrix& m) {
  std::vector<double> acc(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) kernels::abs_accumulate(m.row(i), acc);
  double best = 0.0;
  for (double v : acc) best = std::max(best, v);
  return best;
}

double log_norm(const DenseMatrix& m) {
  assert(m.rows() == m.cols());
  if (m.rows() == 0) return 0.0;
  const std::size_t n = m.cols();
  std::vector<double> acc(n, 0.0);
  const std::span<double> all(acc);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = m.row(i);
    kernels::abs_accumulate(r.first(i), all.first(i));
    kernels::abs_accumulate(r.subspan(i + 1), all.subspan(i + 1));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) best = std::max(best, m(j, j) + acc[j]);
  return best;
}

double log_norm(const BandMatrix& m) {
  if (m.dim() == 0) return 0.0;
  std::vector<double> acc(m.dim(), 0.0);
  m.accumulate_offdiag_column_abs(acc);
  const auto diag = m.diagonal(0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.dim(); ++j) best = std::max(best, diag[j] + acc[j]);
  return best;
}

}  // namespace mcpert
