#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mcpert/analysis.hpp"
#include "mcpert/errors.hpp"
#include "mcpert/model.hpp"

namespace mcpert {
namespace {

RateFunction c(double v) { return RateFunction::constant(v); }

ChainSpec bdp(double lambda, double mu, StateSpace space) {
  return build_class_I(RateFamily::uniform(c(lambda), 0), RateFamily::uniform(c(mu), 1), space);
}

void expect_generator(const ChainSpec& spec, double t) {
  const DenseMatrix a = generator_at(spec, t).to_dense();
  double max_diag = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      col += a(i, j);
      if (i != j) {
        EXPECT_GE(a(i, j), 0.0);
      }
    }
    EXPECT_NEAR(col, 0.0, 1e-12 * (1.0 + std::abs(a(j, j))));
    max_diag = std::max(max_diag, std::abs(a(j, j)));
  }
  EXPECT_NEAR(norm1(a), 2.0 * max_diag, 1e-9 * (1.0 + max_diag));
}

void expect_same_generator(const ChainSpec& x, const ChainSpec& y, double t) {
  const DenseMatrix a = generator_at(x, t).to_dense(), b = generator_at(y, t).to_dense();
  ASSERT_EQ(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_NEAR(a(i, j), b(i, j), 1e-14) << i << "," << j;
}

TEST(ClassI, ThreeStateBirthDeath) {
  const auto spec = bdp(1.0, 4.0, StateSpace::finite(2));
  const DenseMatrix a = generator_at(spec, 3.7).to_dense();
  const double want[3][3] = {{-1, 4, 0}, {1, -5, 4}, {0, 1, -4}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(a(i, j), want[i][j]);
  expect_generator(spec, 0.0);
}

TEST(ClassI, PeriodicArrivalsAndLinearDeaths) {
  std::vector<double> k(299);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i + 1);
  const auto spec = build_class_I(RateFamily::uniform(parse_rate("200*(1+sin(2*pi*t))").with_period(1.0), 0),
                                  RateFamily::scaled(c(1.0), k, 1), StateSpace::finite(299));
  EXPECT_EQ(spec.dim(), 300u);
  EXPECT_EQ(spec.period(), 1.0);
  EXPECT_FALSE(spec.homogeneous());
  const auto g = generator_at(spec, 0.25);
  EXPECT_NEAR(g(0, 0), -400.0, 1e-12);
  EXPECT_NEAR(g(299, 299), -299.0, 1e-12);
  EXPECT_NEAR(g(298, 299), 299.0, 1e-12);
  for (double t : {0.0, 0.1, 0.25, 0.6}) expect_generator(spec, t);
  EXPECT_GE(spec.L(), 400.0 + 298.0 - 1e-9);
}

TEST(ClassI, AbsorbingPair) {
  const auto spec = bdp(0.0, 0.0, StateSpace::finite(1));
  const DenseMatrix a = generator_at(spec, 1.0).to_dense();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(a(i, j), 0.0);
}

TEST(ClassII, PairArrivalsAndTwoServers) {
  const auto lambda = parse_rate("1+sin(2*pi*t)").with_period(1.0);
  const auto spec = build_class_II(RateFamily::scaled(lambda, {1.0, 0.5}, 1, RateFamily::Tail::zero),
                                   RateFamily::scaled(c(3.0), {1.0, 2.0, 2.0, 2.0, 2.0}, 1, RateFamily::Tail::undefined),
                                   StateSpace::finite(5));
  const double t = 0.1, l = lambda(t);
  const auto g = generator_at(spec, t);
  EXPECT_NEAR(g(1, 0), l, 1e-14);
  EXPECT_NEAR(g(2, 0), 0.5 * l, 1e-14);
  EXPECT_NEAR(g(0, 0), -1.5 * l, 1e-14);
  EXPECT_NEAR(g(0, 1), 3.0, 1e-14);
  EXPECT_NEAR(g(1, 2), 6.0, 1e-14);
  // the pair jump from 4 overshoots the finite top and is dropped
  EXPECT_NEAR(g(4, 4), -(l + 6.0), 1e-14);
  EXPECT_NEAR(g(5, 5), -6.0, 1e-14);
  for (double s : {0.0, 0.3, 0.75}) expect_generator(spec, s);
}

TEST(ClassII, NoArrivalsIsPureDeath) {
  const auto d = RateFamily::uniform(c(2.0), 1);
  expect_same_generator(build_class_II(RateFamily::zero(), d, StateSpace::finite(4)),
                        build_class_I(RateFamily::zero(), d, StateSpace::finite(4)), 0.0);
}

TEST(ClassII, TwoStateByHand) {
  const auto spec = build_class_II(RateFamily::uniform(c(1.0), 1), RateFamily::uniform(c(1.0), 1), StateSpace::finite(1));
  const DenseMatrix a = generator_at(spec, 0.0).to_dense();
  EXPECT_EQ(a(0, 0), -1.0);
  EXPECT_EQ(a(1, 0), 1.0);
  EXPECT_EQ(a(0, 1), 1.0);
  EXPECT_EQ(a(1, 1), -1.0);
}

TEST(ClassIII, SingleGroupSizeIsBirthDeath) {
  const auto spec = build_class_III(RateFamily::uniform(c(1.0), 0),
                                    RateFamily::scaled(c(2.0), {1.0}, 1, RateFamily::Tail::zero), StateSpace::finite(6));
  expect_same_generator(spec, bdp(1.0, 2.0, StateSpace::finite(6)), 0.0);
}

TEST(ClassIII, NoServiceIsPureBirth) {
  const auto b = RateFamily::uniform(c(1.5), 0);
  expect_same_generator(build_class_III(b, RateFamily::zero(), StateSpace::finite(4)),
                        build_class_I(b, RateFamily::zero(), StateSpace::finite(4)), 0.0);
}

TEST(ClassIV, ReducesToClassesIIAndIII) {
  const auto a = RateFamily::scaled(parse_rate("1+sin(2*pi*t)").with_period(1.0), {1.0, 0.5, 0.25}, 1, RateFamily::Tail::zero);
  const auto b = RateFamily::scaled(c(3.0), {1.0, 0.3}, 1, RateFamily::Tail::zero);
  const auto space = StateSpace::truncated(12);
  for (double t : {0.0, 0.2, 0.7}) {
    expect_same_generator(build_class_IV(a, RateFamily::zero(), space),
                          build_class_II(a, RateFamily::zero(), space), t);
    expect_same_generator(build_class_IV(RateFamily::zero(), b, space),
                          build_class_III(RateFamily::zero(), b, space), t);
    expect_generator(build_class_IV(a, b, space), t);
  }
  const DenseMatrix z = generator_at(build_class_IV(RateFamily::zero(), RateFamily::zero(), space), 0.0).to_dense();
  EXPECT_EQ(norm1(z), 0.0);
}

TEST(ClassV, CatastrophesOverlayBase) {
  const auto base = bdp(1.0, 4.0, StateSpace::truncated(20));
  const auto spec = build_class_V(base, RateFamily::uniform(c(0.3), 1));
  EXPECT_EQ(spec.chain_class(), ChainClass::V);
  const auto g = generator_at(spec, 0.0);
  EXPECT_NEAR(g(0, 5), 0.3, 1e-15);
  EXPECT_NEAR(g(0, 1), 4.3, 1e-15);
  EXPECT_NEAR(g(5, 5), -5.3, 1e-15);
  expect_generator(spec, 0.0);
  EXPECT_DOUBLE_EQ(beta_star(spec, 0.4), 0.3);

  const auto none = build_class_V(base, RateFamily::zero());
  expect_same_generator(none, base, 0.0);
}

TEST(ClassV, CatastropheReduction) {
  const auto base = bdp(1.0, 4.0, StateSpace::truncated(6));
  const auto spec = build_class_V(base, RateFamily::uniform(c(0.3), 1));
  const auto r = catastrophe_reduced_at(spec, 0.0);
  const DenseMatrix a = generator_at(spec, 0.0).to_dense();
  EXPECT_DOUBLE_EQ(r.beta, 0.3);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    EXPECT_DOUBLE_EQ(r.g[i], i == 0 ? 0.3 : 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_NEAR(r.A_star(i, j), a(i, j) - (i == 0 ? 0.3 : 0.0), 1e-15);
  }
  EXPECT_DOUBLE_EQ(r.A_star(0, 3), 0.0);
  EXPECT_NEAR(log_norm(r.A_star), -0.3, 1e-12);

  const auto zero = catastrophe_reduced_at(build_class_V(base, RateFamily::zero()), 0.0);
  EXPECT_EQ(zero.beta, 0.0);
  EXPECT_EQ(zero.A_star, generator_at(base, 0.0).to_dense());
  EXPECT_THROW(catastrophe_reduced_at(base, 0.0), ValidationError);
}

TEST(ClassV, BetaStarIsInfimumOverTruncatedRange) {
  std::vector<RateFunction> cats;
  for (std::size_t k = 1; k <= 100; ++k) cats.push_back(c(0.3 + 1.0 / static_cast<double>(k)));
  const auto spec = build_class_V(bdp(1.0, 4.0, StateSpace::truncated(100)), RateFamily::listed(cats, 1));
  EXPECT_NEAR(beta_star(spec, 0.0), 0.31, 1e-15);
}

TEST(ClassV, GeneralTransitions) {
  std::vector<Transition> tr{{0, 2, c(1.0)}, {2, 1, c(0.5)}, {1, 0, c(2.0)}};
  const auto spec = build_class_V(StateSpace::finite(2), tr, RateFamily::uniform(c(0.1), 1));
  const auto g = generator_at(spec, 0.0);
  EXPECT_DOUBLE_EQ(g(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(g(0, 1), 2.1);
  EXPECT_DOUBLE_EQ(g(0, 2), 0.1);
  expect_generator(spec, 0.0);
}

TEST(Reduced, TwoStateByHand) {
  const auto r = reduced_at(bdp(1.0, 4.0, StateSpace::finite(1)), 0.0);
  ASSERT_EQ(r.B.rows(), 1u);
  EXPECT_DOUBLE_EQ(r.B(0, 0), -5.0);
  ASSERT_EQ(r.f.size(), 1u);
  EXPECT_DOUBLE_EQ(r.f[0], 1.0);
}

TEST(Reduced, ZeroChainAndTooSmall) {
  const auto r = reduced_at(bdp(0.0, 0.0, StateSpace::finite(3)), 0.0);
  EXPECT_EQ(norm1(r.B), 0.0);
  for (double x : r.f) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(reduced_at(bdp(1.0, 1.0, StateSpace::finite(0)), 0.0), ValidationError);
}

TEST(Reduced, ReproducesForwardEquation) {
  // with p_0 = 1 - sum z, dz/dt = B z + f must equal rows 1..n of A p
  const auto lambda = parse_rate("1+sin(2*pi*t)").with_period(1.0);
  const auto spec = build_class_IV(RateFamily::scaled(lambda, {1.0, 0.5}, 1, RateFamily::Tail::zero),
                                   RateFamily::scaled(c(3.0), {1.0, 0.7}, 1, RateFamily::Tail::zero),
                                   StateSpace::truncated(8));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(9);
  double s = 0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  const auto r = reduced_at(spec, 0.3);
  const auto g = generator_at(spec, 0.3);
  std::vector<double> ap(9);
  g.apply(p, ap);
  for (std::size_t i = 0; i < 8; ++i) {
    double v = r.f[i];
    for (std::size_t j = 0; j < 8; ++j) v += r.B(i, j) * p[j + 1];
    EXPECT_NEAR(v, ap[i + 1], 1e-13);
  }
}

TEST(Perturb, ZeroEpsilonIsIdentity) {
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(10));
  for (auto mode : {PerturbationMode::none, PerturbationMode::uniform, PerturbationMode::mass_arrival,
                    PerturbationMode::multiplicative})
    expect_same_generator(perturb_spec(spec, {mode, 0.0, {}, false}), spec, 0.0);
}

TEST(Perturb, MassArrivals) {
  const std::size_t n = 30;
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(n));
  const auto pert = perturb_spec(spec, {PerturbationMode::mass_arrival, 0.1, {}, false});
  const auto a = generator_at(spec, 0.0), b = generator_at(pert, 0.0);
  EXPECT_NEAR(b(0, 0) - a(0, 0), -0.1, 1e-15);
  for (std::size_t k = 2; k < n; ++k) EXPECT_NEAR(b(k, 0), 0.1 / static_cast<double>(k * (k + 1)), 1e-16) << k;
  EXPECT_NEAR(b(1, 0) - a(1, 0), 0.1 / 2.0, 1e-16);
  EXPECT_NEAR(b(n, 0), 0.1 / static_cast<double>(n * (n + 1)) + 0.1 / static_cast<double>(n + 1), 1e-16);
  expect_generator(pert, 0.0);
}

TEST(Perturb, MultiplicativeScalesEveryRate) {
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(5));
  const auto pert = perturb_spec(spec, {PerturbationMode::multiplicative, 0.5, {}, false});
  const auto g = generator_at(pert, 0.0);
  EXPECT_DOUBLE_EQ(g(1, 0), 1.5);
  EXPECT_DOUBLE_EQ(g(0, 1), 6.0);
}

TEST(Perturb, OffsetsAndClamp) {
  const auto spec = bdp(1.0, 4.0, StateSpace::finite(3));
  RateOffsets off;
  off.births = {0.01, -0.02, 0.03};
  off.deaths = {-0.01, 0.0, 0.02};
  const auto g = generator_at(perturb_spec(spec, {PerturbationMode::offsets, 0.03, off, false}), 0.0);
  EXPECT_DOUBLE_EQ(g(1, 0), 1.01);
  EXPECT_DOUBLE_EQ(g(2, 1), 0.98);
  EXPECT_DOUBLE_EQ(g(0, 1), 3.99);
  EXPECT_DOUBLE_EQ(g(2, 3), 4.02);

  const auto small = bdp(0.01, 4.0, StateSpace::finite(3));
  RateOffsets neg;
  neg.births = {-0.05, -0.05, -0.05};
  EXPECT_THROW(perturb_spec(small, {PerturbationMode::offsets, 0.05, neg, false}), ValidationError);
  const auto clamped = generator_at(perturb_spec(small, {PerturbationMode::offsets, 0.05, neg, true}), 0.0);
  EXPECT_EQ(clamped(1, 0), 0.0);
}

TEST(Perturb, RandomOffsetsStayInRange) {
  std::mt19937_64 rng(4);
  const auto spec = bdp(1.0, 4.0, StateSpace::finite(10));
  const auto off = random_offsets(spec, 0.01, rng);
  ASSERT_FALSE(off.births.empty());
  ASSERT_FALSE(off.deaths.empty());
  for (double x : off.births) EXPECT_LE(std::abs(x), 0.01);
  for (double x : off.deaths) EXPECT_LE(std::abs(x), 0.01);
}

TEST(GeneratorProperties, RandomChainsOfEveryClass) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 4.0), t(0.0, 3.0);
  auto family = [&](std::size_t first, std::size_t count) {
    std::vector<RateFunction> r;
    for (std::size_t k = 0; k < count; ++k)
      r.push_back(k % 2 ? c(u(rng)) : parse_rate(std::to_string(u(rng)) + "*(1+sin(2*pi*t))").with_period(1.0));
    return RateFamily::listed(r, first, RateFamily::Tail::zero);
  };
  for (int draw = 0; draw < 20; ++draw) {
    const std::size_t n = 3 + static_cast<std::size_t>(draw);
    const auto space = draw % 2 ? StateSpace::truncated(n) : StateSpace::finite(n);
    std::vector<ChainSpec> specs{build_class_I(family(0, n), family(1, n), space),
                                 build_class_II(family(1, 4), family(1, n), space),
                                 build_class_III(family(0, n), family(1, 3), space),
                                 build_class_IV(family(1, 3), family(1, 2), space)};
    specs.push_back(build_class_V(specs[draw % 4], family(1, n)));
    specs.push_back(perturb_spec(specs[0], {PerturbationMode::mass_arrival, 0.2, {}, false}));
    for (const auto& spec : specs)
      for (int k = 0; k < 5; ++k) {
        const double at = t(rng);
        expect_generator(spec, at);
        EXPECT_LE(generator_at(spec, at).max_abs_diagonal(), spec.L() * (1 + 1e-12));
      }
  }
}

TEST(Model, RejectsUndefinedRates) {
  EXPECT_THROW(build_class_I(RateFamily::scaled(c(1.0), {1.0, 1.0}, 0), RateFamily::uniform(c(1.0), 1),
                             StateSpace::finite(5)),
               ValidationError);
  EXPECT_THROW(chain_class_from_string("VI"), ValidationError);
  EXPECT_EQ(chain_class_from_string("3"), ChainClass::III);
}

}  // namespace
}  // namespace mcpert
