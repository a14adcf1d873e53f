#include <cmath>
#include <limits>

#include "mcpert/analysis.hpp"
#include "mcpert/errors.hpp"
#include "weighted_columns.hpp"

namespace mcpert {

namespace detail {

namespace {

// D B D^-1 via column suffix sums: entry (i, j) = (d_i/d_j) (T(i,j) - T(i,j-1))
// with T(i,j) = sum_{k >= i} b_kj.
DenseMatrix similarity(const DenseMatrix& B, const WeightSequence& w) {
  const std::size_t n = B.rows();
  DenseMatrix T(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      acc += B(i, j);
      T(i, j) = acc;
    }
  }
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = j == 0 ? T(i, 0) : T(i, j) - T(i, j - 1);
      out(i, j) = w[i + 1] / w[j + 1] * diff;
    }
  return out;
}

std::size_t width_of(const RateFamily& fam, std::size_t n) {
  if (fam.is_zero()) return 0;
  const std::size_t end = fam.support_end();
  if (end == std::numeric_limits<std::size_t>::max() || end - 1 >= n) return n;
  return end - 1;
}

}  // namespace

void WeightedColumns::prepare(double t) {
  if (direct_) {
    dense_ = similarity(reduced_at(spec_, t).B, w_);
    return;
  }
  const std::size_t n = n_;
  const ChainClass c = spec_.chain_class();
  lam_.assign(n, 0.0);
  mu_.assign(n + 1, 0.0);
  a_.assign(n + 2, 0.0);
  b_.assign(n + 2, 0.0);
  if (n == 0) return;
  if (c == ChainClass::I || c == ChainClass::III) spec_.births().eval_range(0, t, lam_);
  if (c == ChainClass::I || c == ChainClass::II) spec_.deaths().eval_range(1, t, std::span(mu_).subspan(1, n));
  wa_ = wb_ = 0;
  if (c == ChainClass::II || c == ChainClass::IV) {
    wa_ = width_of(spec_.arrivals(), n);
    if (wa_ > 0) spec_.arrivals().eval_range(1, t, std::span(a_).subspan(1, wa_));
  }
  if (c == ChainClass::III || c == ChainClass::IV) {
    wb_ = width_of(spec_.services(), n);
    if (wb_ > 0) spec_.services().eval_range(1, t, std::span(b_).subspan(1, wb_));
  }
  a_prefix_.assign(n + 2, 0.0);
  b_prefix_.assign(n + 2, 0.0);
  for (std::size_t m = 1; m <= n + 1; ++m) {
    a_prefix_[m] = a_prefix_[m - 1] + a_[m];
    b_prefix_[m] = b_prefix_[m - 1] + b_[m];
  }
}

}  // namespace detail

namespace {

WeightedSlice slice_from_dense(DenseMatrix m, double t) {
  WeightedSlice s;
  s.t = t;
  const std::size_t n = m.rows();
  s.alpha_i.resize(n);
  s.alpha = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) off += std::fabs(m(i, j));
    s.alpha_i[j] = -(m(j, j) + off);
    s.alpha = std::min(s.alpha, s.alpha_i[j]);
  }
  s.B_star = std::move(m);
  return s;
}

}  // namespace

WeightedSlice weighted_matrix_at(const ChainSpec& spec, const WeightSequence& w, double t) {
  detail::WeightedColumns cols(spec, w);
  cols.prepare(t);
  const std::size_t n = cols.n();
  DenseMatrix m(n, n);
  for (std::size_t j = 1; j <= n; ++j) cols.column(j, [&](std::size_t i, double v) { m(i - 1, j - 1) += v; });
  return slice_from_dense(std::move(m), t);
}

WeightedSlice weighted_matrix_direct(const ChainSpec& spec, const WeightSequence& w, double t) {
  if (w.size() < spec.top()) throw ValidationError("weight sequence does not cover the state space");
  return slice_from_dense(detail::similarity(reduced_at(spec, t).B, w), t);
}

struct AlphaProfile::State {
  ChainSpec spec;
  WeightSequence w;
};

AlphaProfile::AlphaProfile(const ChainSpec& spec, const WeightSequence& w)
    : state_(std::make_unique<State>(State{spec, w})) {
  detail::WeightedColumns check(state_->spec, state_->w);
  (void)check;
}
AlphaProfile::~AlphaProfile() = default;
AlphaProfile::AlphaProfile(AlphaProfile&&) noexcept = default;
AlphaProfile& AlphaProfile::operator=(AlphaProfile&&) noexcept = default;

namespace {

// Per column: diagonal entry and the sum of off-diagonal magnitudes.
template <class F>
void column_measures(const ChainSpec& spec, const WeightSequence& w, double t, F&& visit) {
  detail::WeightedColumns cols(spec, w);
  cols.prepare(t);
  for (std::size_t j = 1; j <= cols.n(); ++j) {
    double diag = 0.0;
    double off = 0.0;
    cols.column(j, [&](std::size_t i, double v) {
      if (i == j)
        diag += v;
      else
        off += std::fabs(v);
    });
    visit(j, diag, off);
  }
}

}  // namespace

AlphaProfile::Sample AlphaProfile::at(double t) const {
  Sample s;
  s.alpha_i.resize(state_->spec.top());
  s.alpha = s.alpha_i.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  column_measures(state_->spec, state_->w, t, [&](std::size_t j, double diag, double off) {
    s.alpha_i[j - 1] = -(diag + off);
    s.alpha = std::min(s.alpha, s.alpha_i[j - 1]);
  });
  return s;
}

double AlphaProfile::alpha(double t) const {
  double a = state_->spec.top() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  column_measures(state_->spec, state_->w, t,
                  [&](std::size_t, double diag, double off) { a = std::min(a, -(diag + off)); });
  return a;
}

double AlphaProfile::weighted_norm(double t) const {
  double m = 0.0;
  column_measures(state_->spec, state_->w, t,
                  [&](std::size_t, double diag, double off) { m = std::max(m, std::fabs(diag) + off); });
  return m;
}

AlphaProfile alpha_profile(const ChainSpec& spec, const WeightSequence& w) { return AlphaProfile(spec, w); }

double weighted_f_norm(const ChainSpec& spec, const WeightSequence& w, double t) {
  const std::size_t n = spec.top();
  if (w.size() < n) throw ValidationError("weight sequence does not cover the state space");
  const GeneratorSlice a = generator_at(spec, t);
  std::vector<double> f(n);
  for (std::size_t i = 1; i <= n; ++i) f[i - 1] = a(i, 0);
  return w.norm1D(f);
}

}  // namespace mcpert
