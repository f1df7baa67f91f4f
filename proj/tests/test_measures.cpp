#include "oracles.hpp"
#include "qrob/measures.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace qrob;

namespace {

DiscreteMeasure line(std::vector<double> x, std::vector<double> w) { return DiscreteMeasure(x, w); }

}  // namespace

TEST(DiscreteMeasure, SortsAndMergesAtoms) {
  const auto mu = line({2.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
  ASSERT_EQ(mu.size(), 2);
  EXPECT_EQ(mu.support()(0), 0.0);
  EXPECT_EQ(mu.support()(1), 2.0);
  EXPECT_DOUBLE_EQ(mu.mass(1), 0.5);
}

TEST(DiscreteMeasure, RejectsInvalidMasses) {
  EXPECT_THROW(line({0.0, 1.0}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(line({0.0, 1.0}, {1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(line({0.0}, {}), std::invalid_argument);
  EXPECT_THROW(line({std::nan("")}, {1.0}), std::invalid_argument);
  EXPECT_THROW(line({}, {}), std::invalid_argument);
}

TEST(DiscreteMeasure, ToleratesRoundingInMassSum) {
  // ten times 0.1 is not 1 in binary
  std::vector<double> x(10), w(10, 0.1);
  for (int i = 0; i < 10; ++i) x[i] = i;
  EXPECT_NO_THROW(DiscreteMeasure(x, w));
}

TEST(DiscreteMeasure, MultiDimensionalLexicographicOrder) {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 0,
       0, 2, 1;
  const DiscreteMeasure mu(a, Eigen::Vector3d(0.2, 0.3, 0.5));
  EXPECT_EQ(mu.atom(0)(1), 1.0);
  EXPECT_EQ(mu.atom(1)(1), 2.0);
  EXPECT_EQ(mu.atom(2)(0), 1.0);
  EXPECT_THROW(mu.support(), std::invalid_argument);
}

TEST(Constructors, EmpiricalAndDirac) {
  const std::vector<double> xs{3.0, 1.0, 3.0, 2.0};
  const auto m = empirical(xs);
  EXPECT_DOUBLE_EQ(m.mass_at(Eigen::VectorXd::Constant(1, 3.0)), 0.5);
  EXPECT_EQ(dirac(1.5).size(), 1);
  EXPECT_THROW(empirical(std::vector<double>{}), std::invalid_argument);
}

TEST(Constructors, MixEndpointsReturnInputs) {
  const auto a = line({0.0, 1.0}, {0.5, 0.5});
  const auto b = dirac(4.0);
  EXPECT_TRUE(mix(a, b, 0.0).approx_equal(a, 0.0));
  EXPECT_TRUE(mix(a, b, 1.0).approx_equal(b, 0.0));
  const auto m = mix(a, b, 0.25);
  EXPECT_DOUBLE_EQ(m.mass_at(Eigen::VectorXd::Constant(1, 4.0)), 0.25);
  EXPECT_THROW(mix(a, b, 1.5), std::invalid_argument);
}

TEST(Convolution, DiracPlusBernoulli) {
  const auto c = convolve(dirac(1.0), line({0.0, 1.0}, {0.3, 0.7}));
  EXPECT_TRUE(c.approx_equal(line({1.0, 2.0}, {0.3, 0.7}), 1e-15));
}

TEST(Convolution, FairCoinPowerIsBinomial) {
  const auto c = convolve_power(line({0.0, 1.0}, {0.5, 0.5}), 4);
  EXPECT_TRUE(c.approx_equal(line({0, 1, 2, 3, 4}, {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0}), 1e-15));
}

TEST(Convolution, AtomCapIsEnforced) {
  std::vector<double> x(100), w(100, 0.01);
  for (int i = 0; i < 100; ++i) x[i] = i * 0.001;
  const DiscreteMeasure mu(x, w);
  EXPECT_THROW(convolve(mu, mu, 9999), AtomCapExceeded);
  EXPECT_NO_THROW(convolve(mu, mu, 10000));
}

TEST(Convolution, MatchesNaiveOracleAndCommutes) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 50; ++t) {
    const auto a = oracle::random_measure(gen, 6, 2.0, true);
    const auto b = oracle::random_measure(gen, 6, 2.0, true);
    const auto c = oracle::random_measure(gen, 6, 2.0, true);
    EXPECT_TRUE(convolve(a, b).approx_equal(oracle::convolve(a, b), 1e-14));
    EXPECT_TRUE(convolve(a, b).approx_equal(convolve(b, a), 1e-14));
    // integer grid keeps sums exact, so associativity is exact in the atoms
    EXPECT_TRUE(convolve(convolve(a, b), c).approx_equal(convolve(a, convolve(b, c)), 1e-14));
  }
}

TEST(Quantiles, LowerQuantileAndCdf) {
  const auto mu = line({0.0, 1.0, 2.0}, {0.25, 0.5, 0.25});
  EXPECT_DOUBLE_EQ(cdf(mu, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(cdf(mu, 1.0), 0.75);
  EXPECT_DOUBLE_EQ(cdf(mu, 5.0), 1.0);
  EXPECT_EQ(quantile(mu, 0.25), 0.0);
  EXPECT_EQ(quantile(mu, 0.26), 1.0);
  EXPECT_EQ(quantile(mu, 1.0), 2.0);
  EXPECT_THROW(quantile(mu, 0.0), std::invalid_argument);
}

TEST(Gauge, ValuesAndIntegrals) {
  EXPECT_DOUBLE_EQ(GaugeFunction(0.0)(123.0), 1.0);
  EXPECT_DOUBLE_EQ(GaugeFunction(2.0)(-1.0), 4.0);
  EXPECT_THROW(GaugeFunction(-1.0), std::invalid_argument);
  const auto mu = line({0.0, 2.0}, {0.75, 0.25});
  EXPECT_DOUBLE_EQ(gauge_integral(mu, GaugeFunction(1.0)), 0.75 + 0.25 * 3.0);
  EXPECT_DOUBLE_EQ(gauge_tail(mu, GaugeFunction(1.0), 2.0), 0.75);
  EXPECT_DOUBLE_EQ(gauge_tail(mu, GaugeFunction(1.0), 3.5), 0.0);
  Eigen::Vector2d x(3.0, 4.0);
  EXPECT_DOUBLE_EQ(GaugeFunction(1.0)(x), 6.0);
}

TEST(Transforms, ShiftScaleCoarsen) {
  const auto mu = line({0.0, 1.0}, {0.5, 0.5});
  EXPECT_TRUE(shift(mu, 2.0).approx_equal(line({2.0, 3.0}, {0.5, 0.5}), 0.0));
  EXPECT_TRUE(scale(mu, -1.0).approx_equal(line({-1.0, 0.0}, {0.5, 0.5}), 0.0));
  const auto c = coarsen(line({0.1, 0.12, 0.9}, {0.2, 0.3, 0.5}), 0.5);
  EXPECT_EQ(c.size(), 2);
  EXPECT_DOUBLE_EQ(c.mass(0), 0.5);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  const std::vector<double> v{1.0, 1e-17, -1.0, 1e-17};
  EXPECT_DOUBLE_EQ(compensated_sum(v), 2e-17);
}
