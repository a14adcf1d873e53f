#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcpert {

/// Row-major dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  /// y = M x
  void multiply(std::span<const double> x, std::span<double> y) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square band matrix stored by diagonals. Diagonal `k` (column minus row,
/// -lower <= k <= upper) holds entry (i, i+k) at position i.
class BandMatrix {
public:
  BandMatrix() = default;
  BandMatrix(std::size_t dim, std::size_t lower, std::size_t upper);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t lower() const noexcept { return lower_; }
  std::size_t upper() const noexcept { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return j + lower_ >= i && i + upper_ >= j;
  }
  /// Zero outside the band.
  double at(std::size_t i, std::size_t j) const noexcept;
  /// Precondition: in_band(i, j).
  double& ref(std::size_t i, std::size_t j) noexcept {
    return data_[(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i) +
                  static_cast<std::ptrdiff_t>(lower_)) * dim_ + i];
  }

  std::span<double> diagonal(std::ptrdiff_t k);
  std::span<const double> diagonal(std::ptrdiff_t k) const;
  /// Rows i for which (i, i+k) lies inside the matrix.
  static std::size_t first_row(std::ptrdiff_t k) noexcept { return k < 0 ? static_cast<std::size_t>(-k) : 0; }
  std::size_t end_row(std::ptrdiff_t k) const noexcept {
    return k > 0 ? dim_ - static_cast<std::size_t>(k) : dim_;
  }

  void set_zero();
  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// acc[j] += sum over off-diagonal i of |a_ij|
  void accumulate_offdiag_column_abs(std::span<double> acc) const;

  DenseMatrix to_dense() const;

private:
  std::size_t dim_ = 0;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
  std::vector<double> data_;
};

/// Operator norm induced by l1: max over columns of sum_i |m_ij|.
double norm1(const DenseMatrix& m);

/// l1 logarithmic norm: max over columns j of m_jj + sum_{i != j} |m_ij|.
double log_norm(const DenseMatrix& m);
double log_norm(const BandMatrix& m);

}  // namespace mcpert
