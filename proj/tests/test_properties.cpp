// Randomised invariants. Generators are seeded, so failures reproduce.

#include "oracles.hpp"
#include "qrob/estimators.hpp"
#include "qrob/functionals.hpp"
#include "qrob/metrics.hpp"
#include "qrob/robustness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace qrob;

TEST(Properties, ProhorovIsAMetric) {
  std::mt19937_64 gen(101);
  for (int t = 0; t < 100; ++t) {
    const auto a = oracle::random_measure(gen, 8);
    const auto b = oracle::random_measure(gen, 8);
    const auto c = oracle::random_measure(gen, 8);
    const double ab = prohorov(a, b), ba = prohorov(b, a);
    EXPECT_EQ(prohorov(a, a), 0.0);
    EXPECT_NEAR(ab, ba, 3e-9);
    EXPECT_LE(prohorov(a, c), ab + prohorov(b, c) + 3e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Properties, StrassenThresholdMatchesProhorov) {
  std::mt19937_64 gen(102);
  for (int t = 0; t < 100; ++t) {
    const auto a = oracle::random_measure(gen, 8);
    const auto b = oracle::random_measure(gen, 8);
    const double p = prohorov(a, b);
    if (p >= 1.0) continue;
    EXPECT_TRUE(strassen_feasible(a, b, p + 1e-9, p + 1e-9).feasible);
    if (p > 1e-6) EXPECT_FALSE(strassen_feasible(a, b, p - 1e-6, p - 1e-6).feasible);
  }
}

TEST(Properties, ProhorovBelowWassersteinRoot) {
  // rho^2 <= W1 on the line
  std::mt19937_64 gen(103);
  for (int t = 0; t < 100; ++t) {
    const auto a = oracle::random_measure(gen, 8);
    const auto b = oracle::random_measure(gen, 8);
    const double p = prohorov(a, b);
    EXPECT_LE(p * p, wasserstein1(a, b) + 1e-12);
  }
}

TEST(Properties, WassersteinSubadditiveUnderConvolution) {
  std::mt19937_64 gen(104);
  for (int t = 0; t < 40; ++t) {
    const auto a = oracle::random_measure(gen, 4);
    const auto b = oracle::random_measure(gen, 4);
    const double w = wasserstein1(a, b);
    for (int n = 2; n <= 4; ++n) EXPECT_LE(wasserstein1(convolve_power(a, n), convolve_power(b, n)), n * w + 1e-9);
  }
}

TEST(Properties, AvarLipschitzInWasserstein) {
  std::mt19937_64 gen(105);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_measure(gen, 10);
    const auto b = oracle::random_measure(gen, 10);
    const double alpha = u(gen);
    EXPECT_LE(std::abs(avar(a, alpha) - avar(b, alpha)), wasserstein1(a, b) / alpha + 1e-12);
  }
}

TEST(Properties, AvarMonotoneInLevel) {
  std::mt19937_64 gen(106);
  for (int t = 0; t < 100; ++t) {
    const auto mu = oracle::random_measure(gen, 10);
    double last = std::numeric_limits<double>::infinity();
    for (double alpha : {0.05, 0.2, 0.5, 0.8, 0.99}) {
      const double v = avar(mu, alpha);
      EXPECT_LE(v, last + 1e-12);
      last = v;
    }
    EXPECT_GE(avar(mu, 0.999), mean(mu) - 1e-12);
  }
}

TEST(Properties, PlugInIgnoresSampleOrder) {
  std::mt19937_64 gen(107);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> xs(25);
    for (double& x : xs) x = z(gen);
    auto ys = xs;
    std::shuffle(ys.begin(), ys.end(), gen);
    for (const Functional& f : {Functional{functional::Mean{}}, Functional{functional::AVaR{0.3}},
                                Functional{functional::VaR{0.1}}, Functional{functional::AbsMoment{1.5}}}) {
      EXPECT_EQ(plug_in(f, xs), plug_in(f, ys));
    }
  }
}

TEST(Properties, YuleWalkerScaleInvariant) {
  std::mt19937_64 gen(108);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> xs(30);
    for (double& x : xs) x = z(gen);
    auto ys = xs;
    for (double& y : ys) y *= -4.0;
    EXPECT_NEAR(yule_walker(xs), yule_walker(ys), 1e-12);
  }
}

TEST(Properties, WassersteinTranslationAndScale) {
  std::mt19937_64 gen(109);
  for (int t = 0; t < 50; ++t) {
    const auto a = oracle::random_measure(gen, 6);
    const auto b = oracle::random_measure(gen, 6);
    EXPECT_NEAR(wasserstein1(shift(a, 1.5), shift(b, 1.5)), wasserstein1(a, b), 1e-12);
    EXPECT_NEAR(wasserstein1(scale(a, 2.0), scale(b, 2.0)), 2.0 * wasserstein1(a, b), 1e-12);
  }
}

TEST(Properties, SamplingLawIsSeedDeterministic) {
  const ModelSpec m = model::IIDParametric{ParametricFamily::exponential(), 1.5};
  const Estimator e = estimator::PlugIn{functional::AVaR{0.25}};
  for (std::uint64_t seed : {1ULL, 2ULL, 0xFFFFFFFFFFFFULL}) {
    EXPECT_TRUE(sampling_law(m, e, 20, 200, seed, 1).law.approx_equal(sampling_law(m, e, 20, 200, seed, 2).law, 0.0));
  }
}

TEST(Properties, NoiseFloorShrinksWithReplications) {
  const ModelSpec m = model::IIDParametric{ParametricFamily::normal(), 0.0};
  const Estimator e = estimator::Mle{ParametricFamily::normal()};
  auto median_floor = [&](int R) {
    std::vector<double> floors;
    for (std::uint64_t s = 0; s < 10; ++s) {
      floors.push_back(prohorov(sampling_law(m, e, 10, R, child_seed(s, 1)).law,
                                sampling_law(m, e, 10, R, child_seed(s, 2)).law));
    }
    std::nth_element(floors.begin(), floors.begin() + 5, floors.end());
    return floors[5];
  };
  EXPECT_LT(median_floor(10000), median_floor(1000));
}
