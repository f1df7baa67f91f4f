#include "qrob/estimators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qrob;

TEST(Mle, ClosedForms) {
  const std::vector<double> coin{1, 0, 1, 1};
  EXPECT_DOUBLE_EQ(mle(ParametricFamily::bernoulli(), coin).value, 0.75);
  EXPECT_DOUBLE_EQ(mle(ParametricFamily::poisson(), std::vector<double>{1, 2, 6}).value, 3.0);
  EXPECT_DOUBLE_EQ(mle(ParametricFamily::exponential(), std::vector<double>{0.5, 1.5}).value, 1.0);
  EXPECT_DOUBLE_EQ(mle(ParametricFamily::normal(3.0), std::vector<double>{-1, 4}).value, 1.5);
}

TEST(Mle, BoundaryAndDegenerateSamples) {
  const auto e = mle(ParametricFamily::bernoulli(), std::vector<double>{0, 0, 0});
  EXPECT_TRUE(e.boundary);
  EXPECT_DOUBLE_EQ(e.value, 0.0);
  EXPECT_THROW(mle(ParametricFamily::exponential(), std::vector<double>{0, 0}), std::domain_error);
  EXPECT_THROW(mle(ParametricFamily::bernoulli(), std::vector<double>{0.5}), std::invalid_argument);
  EXPECT_THROW(mle(ParametricFamily::poisson(), std::vector<double>{}), std::invalid_argument);
}

TEST(YuleWalker, HandComputed) {
  // lag-one: (1*2 + 2*3) / 2 = 4; second moment (1 + 4 + 9) / 3
  const std::vector<double> xs{1, 2, 3};
  EXPECT_DOUBLE_EQ(yule_walker(xs), 4.0 / (14.0 / 3.0));
  EXPECT_DOUBLE_EQ(yule_walker(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_THROW(yule_walker(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(YuleWalker, AlternatingSignsGiveNegativeEstimate) {
  const std::vector<double> xs{1, -1, 1, -1, 1};
  EXPECT_DOUBLE_EQ(yule_walker(xs), -1.0 / 1.0);
}

TEST(PremiumEstimator, ExactPath) {
  const std::vector<double> xs{0.0, 1.0};
  const auto e = premium_estimator(xs, 0.5);
  EXPECT_FALSE(e.fallback);
  // two draws of a fair coin: top half of {0, 1, 2} w.p. 1/4, 1/2, 1/4
  EXPECT_DOUBLE_EQ(e.value, 0.75);
}

TEST(PremiumEstimator, MonteCarloFallback) {
  std::vector<double> xs(40);
  for (int i = 0; i < 40; ++i) xs[i] = i % 5;
  // integer atoms keep the 40-fold convolution at 161 atoms
  const auto exact = premium_estimator(xs, 0.5);
  const auto mc = premium_estimator(xs, 0.5, 100, 200000, SeedSpec{1, 2});
  const auto again = premium_estimator(xs, 0.5, 100, 200000, SeedSpec{1, 2});
  EXPECT_FALSE(exact.fallback);
  EXPECT_TRUE(mc.fallback);
  EXPECT_EQ(mc.value, again.value);
  EXPECT_NEAR(mc.value, exact.value, 0.01);
}

TEST(EstimatorVariant, ApplyAndValidate) {
  const std::vector<double> xs{1, 2, 3};
  EXPECT_DOUBLE_EQ(qrob::apply(estimator::PlugIn{functional::Mean{}}, xs).value, 2.0);
  EXPECT_DOUBLE_EQ(qrob::apply(estimator::Mle{ParametricFamily::poisson()}, xs).value, 2.0);
  EXPECT_DOUBLE_EQ(qrob::apply(estimator::YuleWalker{}, xs).value, yule_walker(xs));
  EXPECT_THROW(validate(estimator::Premium{1.5}), std::invalid_argument);
  EXPECT_THROW(validate(estimator::Premium{0.5, 10, 0}), std::invalid_argument);
}
