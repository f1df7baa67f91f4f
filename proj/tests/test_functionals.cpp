#include "oracles.hpp"
#include "qrob/functionals.hpp"
#include "qrob/robustness.hpp"
#include "qrob/serialization.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qrob;

namespace {
DiscreteMeasure line(std::vector<double> x, std::vector<double> w) { return DiscreteMeasure(x, w); }
}  // namespace

TEST(Moments, MeanAndAbsMoment) {
  const auto mu = line({-1.0, 2.0}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(mean(mu), 0.5);
  EXPECT_DOUBLE_EQ(abs_moment(mu, 2.0), 2.5);
  EXPECT_THROW(abs_moment(mu, 0.0), std::invalid_argument);
}

TEST(Moments, AdversarialFamilyHasUnitMoment) {
  for (double p : {1.0, 2.0, 3.0})
    for (double m : {1.0, 4.0, 1024.0, 1e9}) EXPECT_NEAR(abs_moment(adversarial_family(p, m), p), 1.0, 1e-12);
}

TEST(ValueAtRisk, LowerQuantile) {
  const auto mu = line({0.0, 1.0, 2.0}, {0.25, 0.5, 0.25});
  EXPECT_EQ(var_level(mu, 0.5), 1.0);
  EXPECT_EQ(var_level(mu, 0.1), 2.0);
  EXPECT_EQ(var_level(mu, 0.25), 1.0);
}

TEST(Avar, TwoPointExample) {
  // top 10% of {0: 0.8, 10: 0.2} is all at 10
  const auto mu = line({0.0, 10.0}, {0.8, 0.2});
  EXPECT_DOUBLE_EQ(avar(mu, 0.1), 10.0);
  EXPECT_DOUBLE_EQ(avar(mu, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(avar(mu, 0.5, AvarMethod::DistributionForm), 4.0);
  EXPECT_THROW(avar(mu, 1.0), std::invalid_argument);
  EXPECT_THROW(avar(mu, 0.0), std::invalid_argument);
}

TEST(Avar, RepresentationsAgreeWithRiemannOracle) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int t = 0; t < 100; ++t) {
    const auto mu = oracle::random_measure(gen, 10, 5.0);
    const double alpha = u(gen);
    const double q = avar(mu, alpha, AvarMethod::QuantileAverage);
    EXPECT_NEAR(q, avar(mu, alpha, AvarMethod::DistributionForm), 1e-9);
    // midpoint rule error is at most (jumps * range * h / alpha)
    EXPECT_NEAR(q, oracle::avar_riemann(mu, alpha, 200000), 5e-3);
  }
}

TEST(Avar, UniformGridHalfLevel) {
  const auto grid = uniform_grid(0.0, 1.0, 10000);
  EXPECT_NEAR(avar(grid, 0.5), 0.75, 2e-4);
}

TEST(Avar, ScaleAndTranslationEquivariance) {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 50; ++t) {
    const auto mu = oracle::random_measure(gen, 8);
    EXPECT_NEAR(avar(scale(mu, 3.0), 0.3), 3.0 * avar(mu, 0.3), 1e-12);
    EXPECT_NEAR(avar(shift(mu, -2.0), 0.3), avar(mu, 0.3) - 2.0, 1e-12);
  }
}

TEST(Premium, DiracAndCoin) {
  EXPECT_DOUBLE_EQ(premium(dirac(2.0), 0.5, 7), 2.0);
  // two fair coins: sums {0, 1, 2} w.p. 1/4, 1/2, 1/4; top half averages (2/4 + 1/4) / 0.5 = 1.5
  EXPECT_DOUBLE_EQ(premium(line({0.0, 1.0}, {0.5, 0.5}), 0.5, 2), 0.75);
  EXPECT_THROW(premium(dirac(0.0), 0.5, 0), std::invalid_argument);
}

TEST(FunctionalVariant, EvaluateAndValidate) {
  const auto mu = line({0.0, 2.0}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(evaluate(functional::Mean{}, mu), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(functional::AbsMoment{2.0}, mu), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(functional::VaR{0.4}, mu), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(functional::AVaR{0.5}, mu), 2.0);
  EXPECT_THROW(validate(functional::VaR{1.5}), std::invalid_argument);
  EXPECT_THROW(validate(functional::Premium{0.5, 0}), std::invalid_argument);
  EXPECT_EQ(describe(functional::AbsMoment{2.0}), "AbsMoment{p=2}");
}
