#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <sstream>

#include "mcpert/analysis.hpp"
#include "mcpert/errors.hpp"
#include "mcpert/kernels.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {
namespace {

RateFunction c(double v) { return RateFunction::constant(v); }

ChainSpec bdp(double lambda, double mu, StateSpace space) {
  return build_class_I(RateFamily::uniform(c(lambda), 0), RateFamily::uniform(c(mu), 1), space);
}

TEST(MeanOf, SmallCases) {
  EXPECT_EQ(mean_of(delta_vector(10, 0)), 0.0);
  EXPECT_EQ(mean_of(delta_vector(10, 5)), 5.0);
  EXPECT_DOUBLE_EQ(mean_of(std::vector<double>(5, 0.2)), 2.0);
}

TEST(Integrate, ZeroGeneratorKeepsInitialLaw) {
  const auto spec = bdp(0.0, 0.0, StateSpace::finite(3));
  const std::vector<double> p0{0.1, 0.2, 0.3, 0.4};
  IntegrateOptions o;
  o.stride = 0.5;
  const auto tr = integrate(spec, {0.0, p0}, 3.0, o);
  ASSERT_EQ(tr.size(), 7u);
  for (const auto& p : tr.states) EXPECT_EQ(p, p0);
}

TEST(Integrate, TwoStateClosedForm) {
  const double a = 2.0, b = 3.0;
  const auto spec = bdp(a, b, StateSpace::finite(1));
  IntegrateOptions o;
  o.stride = 0.1;
  o.step = 1e-3;
  const auto tr = integrate(spec, {0.0, {1.0, 0.0}}, 2.0, o);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    EXPECT_NEAR(tr.states[i][1], a / (a + b) * (1 - std::exp(-(a + b) * t)), 1e-12) << t;
  }
  EXPECT_LE(tr.max_conservation_error, 1e-13);
}

TEST(Integrate, MatchesMatrixExponential) {
  const auto spec = build_class_IV(RateFamily::scaled(c(1.0), {1.0, 0.5, 0.2}, 1, RateFamily::Tail::zero),
                                   RateFamily::scaled(c(2.0), {1.0, 0.4}, 1, RateFamily::Tail::zero),
                                   StateSpace::truncated(12));
  const DenseMatrix a = generator_at(spec, 0.0).to_dense();
  Eigen::MatrixXd e(13, 13);
  for (int i = 0; i < 13; ++i)
    for (int j = 0; j < 13; ++j) e(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(13);
  p0(4) = 1.0;
  const Eigen::VectorXd want = (e * 1.5).exp() * p0;
  const auto tr = integrate(spec, {0.0, delta_vector(13, 4)}, 1.5);
  for (int i = 0; i < 13; ++i) EXPECT_NEAR(tr.states.back()[static_cast<std::size_t>(i)], want(i), 1e-11);
}

TEST(Integrate, TimeDependentRatesAgainstFineReference) {
  const auto spec = build_class_I(RateFamily::uniform(parse_rate("2*(1+sin(2*pi*t))").with_period(1.0), 0),
                                  RateFamily::uniform(c(3.0), 1), StateSpace::finite(6));
  IntegrateOptions coarse, fine;
  coarse.step = 1e-2;
  fine.step = 1e-3;
  const auto x = integrate(spec, {0.0, delta_vector(7, 0)}, 2.0, coarse);
  const auto y = integrate(spec, {0.0, delta_vector(7, 0)}, 2.0, fine);
  EXPECT_LE(kernels::l1_distance(x.states.back(), y.states.back()), 1e-7);
}

TEST(Integrate, RejectsBadInputs) {
  const auto spec = bdp(1.0, 1.0, StateSpace::finite(2));
  EXPECT_THROW(integrate(spec, {0.0, {0.5, 0.5}}, 1.0), ValidationError);
  EXPECT_THROW(integrate(spec, {0.0, {0.5, 0.6, -0.1}}, 1.0), ValidationError);
  IntegrateOptions o;
  o.step = 1.0;  // above 1/(2L)
  EXPECT_THROW(integrate(spec, {0.0, delta_vector(3, 0)}, 1.0, o), ValidationError);
  EXPECT_THROW(check_probability(std::vector<double>{0.5, 0.4}, 0.0), InvariantError);
  EXPECT_THROW(check_probability(std::vector<double>{1.1, -0.1}, 0.0), InvariantError);
}

TEST(Integrate, DefaultStep) {
  EXPECT_EQ(default_step(bdp(0.1, 0.1, StateSpace::finite(2))), 1e-3);
  EXPECT_DOUBLE_EQ(default_step(bdp(300.0, 400.0, StateSpace::finite(2))), 1.0 / (4 * 700.0));
}

TEST(Integrate, BackendsAgree) {
  const auto spec = build_class_I(RateFamily::uniform(parse_rate("20*(1+sin(2*pi*t))").with_period(1.0), 0),
                                  RateFamily::uniform(c(15.0), 1), StateSpace::finite(40));
  std::vector<double> ref;
  {
    kernels::ScopedBackend s(kernels::Backend::scalar);
    ref = integrate(spec, {0.0, delta_vector(41, 0)}, 1.0).states.back();
  }
  for (auto b : {kernels::Backend::avx2, kernels::Backend::neon}) {
    if (!kernels::supported(b)) continue;
    kernels::ScopedBackend s(b);
    const auto got = integrate(spec, {0.0, delta_vector(41, 0)}, 1.0).states.back();
    EXPECT_LE(kernels::l1_distance(ref, got), 1e-12);
  }
}

TEST(Regime, GeometricStationaryLaw) {
  const std::size_t n = 100;
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(n));
  const auto r = limiting_regime(spec);
  EXPECT_LT(r.boundary_distances.back(), 1e-6);
  const auto& p = r.limit.states.back();
  const double norm = (1 - std::pow(0.25, n + 1)) / 0.75;
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(p[k], std::pow(0.25, k) / norm, 1e-6);
  EXPECT_NEAR(r.phi_min, r.phi_max, 1e-6);
  EXPECT_NEAR(r.phi_max, 1.0 / 3.0, 1e-6);
}

TEST(Regime, ZeroChainNeverMixes) {
  RegimeOptions o;
  o.max_horizon = 5.0;
  EXPECT_THROW(limiting_regime(bdp(0.0, 0.0, StateSpace::finite(3)), o), ConvergenceError);
}

TEST(EmpiricalBeta, EqualTimesAndDecay) {
  const auto spec = bdp(1.0, 4.0, StateSpace::finite(5));
  EXPECT_DOUBLE_EQ(empirical_beta(spec, 0.7, 0.7), 1.0);
  const double b1 = empirical_beta(spec, 1.0, 0.0), b2 = empirical_beta(spec, 2.0, 0.0);
  EXPECT_LT(b1, 1.0);
  EXPECT_LT(b2, b1);
  EXPECT_THROW(empirical_beta(spec, 1.0, 0.0, std::nullopt, 3), ValidationError);
}

TEST(EmpiricalBeta, CatastrophesForceDecay) {
  const auto spec = build_class_V(bdp(1.0, 0.5, StateSpace::truncated(15)),
                                  RateFamily::uniform(parse_rate("0.3*(1+sin(2*pi*t))").with_period(1.0), 1));
  for (auto [s, t] : {std::pair{0.0, 1.0}, {0.2, 2.5}, {1.1, 4.0}})
    EXPECT_LE(2 * empirical_beta(spec, t, s), 2 * std::exp(-beta_integral(spec, s, t)) * (1 + 1e-6));
}

TEST(PerturbationDistance, IdenticalChainsStayTogether) {
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(20));
  const auto d = empirical_perturbation_distance(spec, spec, {0.0, delta_vector(21, 3)}, 5.0);
  for (double x : d.distances) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(d.final_period_sup, 0.0);
}

TEST(PerturbationDistance, ScaledRatesShareTheLimit) {
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(40));
  const auto pert = perturb_spec(spec, {PerturbationMode::multiplicative, 0.1, {}, false});
  const auto d = empirical_perturbation_distance(spec, pert, {0.0, delta_vector(41, 0)}, 40.0);
  EXPECT_LT(d.final_period_sup, 1e-8);
  EXPECT_GT(*std::max_element(d.distances.begin(), d.distances.end()), 1e-3);
}

TEST(Stationary, MultiplicativeScalingKeepsStationaryLaw) {
  const auto spec = bdp(1.0, 4.0, StateSpace::truncated(60));
  const auto a = stationary_distribution(spec);
  const auto b = stationary_distribution(perturb_spec(spec, {PerturbationMode::multiplicative, 0.1, {}, false}));
  EXPECT_LT(kernels::l1_distance(a.p, b.p), 1e-8);
  EXPECT_LE(a.residual, 1e-13);
  EXPECT_THROW(stationary_distribution(build_class_I(RateFamily::uniform(parse_rate("1+sin(2*pi*t)").with_period(1.0), 0),
                                                     RateFamily::uniform(c(4.0), 1), StateSpace::finite(5))),
               ValidationError);
}

TEST(TailProbe, UnperturbedIsGeometric) {
  const auto rows = stationary_tail_probe(1.0, 4.0, 0.0, {10, 50});
  for (const auto& r : rows)
    EXPECT_NEAR(r.p0, 0.75 / (1 - std::pow(0.25, static_cast<double>(r.level + 1))), 1e-10);
}

TEST(TailProbe, MassArrivalsDrainStateZero) {
  const auto rows = stationary_tail_probe(1.0, 4.0, 0.1, {100, 200, 400});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].p0, rows[1].p0);
  EXPECT_GT(rows[1].p0, rows[2].p0);
  for (const auto& r : rows) EXPECT_LE(r.recursion_residual, 1e-6);
}

TEST(Csv, FormatsAndHeaders) {
  Trajectory tr;
  tr.times = {0.0, 0.5};
  tr.states = {{1.0, 0.0, 0.0}, {0.25, 0.5, 0.25}};
  std::ostringstream a, b, s, t;
  write_trajectory_csv(a, tr);
  write_mean_csv(b, tr);
  write_states_csv(s, tr, {2});
  write_table_csv(t, {"x", "y"}, {{1.0, 0.1}});
  EXPECT_EQ(a.str(), "t,p_0,p_1,p_2\n0,1,0,0\n0.5,0.25,0.5,0.25\n");
  EXPECT_EQ(b.str(), "t,mean\n0,0\n0.5,1\n");
  EXPECT_EQ(s.str(), "t,p_2\n0,0\n0.5,0.25\n");
  EXPECT_EQ(t.str(), "x,y\n1,0.10000000000000001\n");
  std::ostringstream bad;
  EXPECT_THROW(write_states_csv(bad, tr, {3}), ValidationError);
}

}  // namespace
}  // namespace mcpert
