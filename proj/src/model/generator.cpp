#include <algorithm>
#include <cmath>
#include <limits>

#include "mcpert/errors.hpp"
#include "mcpert/kernels.hpp"
#include "mcpert/model.hpp"

namespace mcpert {

double GeneratorSlice::operator()(std::size_t i, std::size_t j) const {
  if (band.in_band(i, j)) return band.at(i, j);
  if (i == 0 && !row0.empty()) return row0[j];
  if (j == 0 && !col0.empty()) return col0[i];
  return 0.0;
}

void GeneratorSlice::apply(std::span<const double> p, std::span<double> out) const {
  band.multiply(p, out);
  if (!row0.empty()) out[0] += kernels::dot(row0, p);
  if (!col0.empty()) kernels::axpy(p[0], col0, out);
}

DenseMatrix GeneratorSlice::to_dense() const {
  DenseMatrix m = band.to_dense();
  for (std::size_t j = 0; j < row0.size(); ++j) m(0, j) += row0[j];
  for (std::size_t i = 0; i < col0.size(); ++i) m(i, 0) += col0[i];
  return m;
}

double GeneratorSlice::max_abs_diagonal() const {
  double m = 0.0;
  for (double v : band.diagonal(0)) m = std::max(m, std::fabs(v));
  return m;
}

double GeneratorSlice::norm1() const {
  const std::size_t n = dim();
  std::vector<double> acc(n, 0.0);
  band.accumulate_offdiag_column_abs(acc);
  for (std::size_t j = 0; j < row0.size(); ++j) acc[j] += std::fabs(row0[j]);
  for (std::size_t i = 0; i < col0.size(); ++i) acc[0] += std::fabs(col0[i]);
  const auto diag = band.diagonal(0);
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) best = std::max(best, acc[j] + std::fabs(diag[j]));
  return best;
}

GeneratorSlice generator_at(const ChainSpec& spec, double t) {
  GeneratorSlice g;
  spec.assemble(t, g);
  return g;
}

ReducedSystemSlice reduced_at(const ChainSpec& spec, double t) {
  if (spec.dim() < 2) throw ValidationError("reduced system needs at least two states");
  const GeneratorSlice a = generator_at(spec, t);
  const std::size_t n = spec.top();
  ReducedSystemSlice r{t, DenseMatrix(n, n), std::vector<double>(n)};
  for (std::size_t i = 1; i <= n; ++i) {
    const double ai0 = a(i, 0);
    r.f[i - 1] = ai0;
    for (std::size_t j = 1; j <= n; ++j) r.B(i - 1, j - 1) = a(i, j) - ai0;
  }
  return r;
}

CatastropheReduction catastrophe_reduced_at(const ChainSpec& spec, double t) {
  if (spec.chain_class() != ChainClass::V) throw ValidationError("catastrophe reduction requires a class-V chain");
  const std::size_t n = spec.top();
  double beta = 0.0;
  if (n > 0) {
    std::vector<double> c(n);
    spec.catastrophes().eval_range(1, t, c);
    beta = *std::min_element(c.begin(), c.end());
  }
  CatastropheReduction r{t, beta, generator_at(spec, t).to_dense(), std::vector<double>(spec.dim(), 0.0)};
  for (std::size_t j = 0; j < spec.dim(); ++j) r.A_star(0, j) -= beta;
  r.g[0] = beta;
  return r;
}

}  // namespace mcpert
