#include "oracles.hpp"
#include "qrob/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace qrob;

TEST(Rng, CounterStreamsAreReproducible) {
  CounterRng a(SeedSpec{42, 7}), b(SeedSpec{42, 7}), c(SeedSpec{42, 8});
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  EXPECT_EQ(a.counter(), 100u);
}

TEST(Rng, ChildSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 10000; ++r) seen.insert(child_seed(1, r));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_EQ((SeedSpec{3, 4}.nested(5)), (SeedSpec{child_seed(3, 4), 5}));
}

TEST(Rng, TransformsHaveRightMoments) {
  CounterRng rng(99);
  const int N = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0, sp = 0;
  for (int i = 0; i < N; ++i) {
    const double u = rng.uniform();
    ASSERT_TRUE(u >= 0.0 && u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential(2.0);
    sp += rng.poisson(3.5);
  }
  EXPECT_NEAR(su / N, 0.5, 4 * std::sqrt(1.0 / 12 / N));
  EXPECT_NEAR(sn / N, 0.0, 4 / std::sqrt(N));
  EXPECT_NEAR(sn2 / N, 1.0, 4 * std::sqrt(2.0 / N));
  EXPECT_NEAR(se / N, 0.5, 4 * 0.5 / std::sqrt(N));
  EXPECT_NEAR(sp / N, 3.5, 4 * std::sqrt(3.5 / N));
}

TEST(Families, FisherInformationClosedForms) {
  EXPECT_DOUBLE_EQ(fisher_info(ParametricFamily::bernoulli(), 0.5), 4.0);
  EXPECT_DOUBLE_EQ(fisher_info(ParametricFamily::bernoulli(), 0.2), 1.0 / (0.2 * 0.8));
  EXPECT_DOUBLE_EQ(fisher_info(ParametricFamily::poisson(), 3.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(fisher_info(ParametricFamily::exponential(), 2.0), 0.25);
  EXPECT_DOUBLE_EQ(fisher_info(ParametricFamily::normal(4.0), -7.0), 0.25);
  EXPECT_THROW(fisher_info(ParametricFamily::bernoulli(), 1.0), std::invalid_argument);
  EXPECT_THROW(fisher_info(ParametricFamily::poisson(), 0.0), std::invalid_argument);
  EXPECT_THROW(ParametricFamily::normal(0.0), std::invalid_argument);
}

TEST(Families, ScoreIsDerivativeOfLogLikelihood) {
  const std::vector<std::pair<ParametricFamily, std::pair<double, double>>> cases{
      {ParametricFamily::bernoulli(), {0.3, 1.0}},
      {ParametricFamily::poisson(), {2.0, 4.0}},
      {ParametricFamily::exponential(), {1.5, 0.7}},
      {ParametricFamily::normal(2.0), {0.4, -1.0}}};
  for (const auto& [f, tx] : cases) {
    const auto [theta, x] = tx;
    const double h = 1e-6;
    const std::vector<double> xs{x};
    const double numeric = (log_likelihood(f, theta + h, xs) - log_likelihood(f, theta - h, xs)) / (2 * h);
    EXPECT_NEAR(score(f, theta, x), numeric, 1e-6) << f.name();
  }
}

TEST(Families, L1DistanceAgainstDirectSums) {
  // Poisson: sum over k of |p1 - p2|
  auto pois = [](double r, int k) { return std::exp(k * std::log(r) - r - std::lgamma(k + 1.0)); };
  double direct = 0.0;
  for (int k = 0; k < 200; ++k) direct += std::abs(pois(3.0, k) - pois(3.4, k));
  EXPECT_NEAR(l1_density_distance(ParametricFamily::poisson(), 3.0, 3.4), direct, 1e-12);

  // Exponential: trapezoid over a long interval
  const double t = oracle::trapezoid(
      [](double x) { return std::abs(1.0 * std::exp(-1.0 * x) - 1.3 * std::exp(-1.3 * x)); }, 0.0, 60.0, 600000);
  EXPECT_NEAR(l1_density_distance(ParametricFamily::exponential(), 1.0, 1.3), t, 1e-8);

  // Normal: trapezoid
  const double pi = std::acos(-1.0);
  const double s2 = 2.0;
  auto phi = [&](double x, double m) { return std::exp(-(x - m) * (x - m) / (2 * s2)) / std::sqrt(2 * pi * s2); };
  const double nt = oracle::trapezoid([&](double x) { return std::abs(phi(x, 0.0) - phi(x, 0.5)); }, -30.0, 30.0, 600000);
  EXPECT_NEAR(l1_density_distance(ParametricFamily::normal(s2), 0.0, 0.5), nt, 1e-8);

  EXPECT_DOUBLE_EQ(l1_density_distance(ParametricFamily::bernoulli(), 0.3, 0.45), 0.3);
  EXPECT_DOUBLE_EQ(l1_density_distance(ParametricFamily::normal(), 1.0, 1.0), 0.0);
}

TEST(Families, L1DistanceShrinksWithShift) {
  for (const auto& f : {ParametricFamily::bernoulli(), ParametricFamily::poisson(), ParametricFamily::exponential(),
                        ParametricFamily::normal()}) {
    const double a = l1_density_distance(f, 0.5, 0.6), b = l1_density_distance(f, 0.5, 0.51);
    EXPECT_GT(a, b) << f.name();
    EXPECT_GT(b, 0.0) << f.name();
  }
}

TEST(Models, SamplingIsDeterministic) {
  const ModelSpec m = model::IIDParametric{ParametricFamily::poisson(), 2.0};
  EXPECT_EQ(sample(m, 50, {5, 1}), sample(m, 50, {5, 1}));
  EXPECT_NE(sample(m, 50, {5, 1}), sample(m, 50, {5, 2}));
  const ModelSpec degenerate = model::IIDNonparametric{dirac(3.0)};
  for (double x : sample(degenerate, 20, {1, 1})) EXPECT_EQ(x, 3.0);
}

TEST(Models, LinearProcessStationaryMoments) {
  const ModelSpec m = model::LinearProcess{{0.5, InnovationLaw{}}};
  const auto xs = sample(m, 200000, {8, 0});
  const double mu = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double v = 0.0;
  for (double x : xs) v += (x - mu) * (x - mu);
  v /= xs.size();
  EXPECT_NEAR(mu, 0.0, 0.02);
  EXPECT_NEAR(v, 1.0 / (1.0 - 0.25), 0.03);
}

TEST(Models, BurnInLength) {
  EXPECT_EQ(burn_in_length(0.0), 0);
  EXPECT_EQ(burn_in_length(0.5), static_cast<int>(std::ceil(std::log(0.5e-12) / std::log(0.5))));
  EXPECT_EQ(burn_in_length(0.9999999), 100000);
}

TEST(Models, InnovationValidation) {
  InnovationLaw skewed;
  skewed.base = DiscreteMeasure(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5});
  EXPECT_THROW(skewed.validate(), std::invalid_argument);
  InnovationLaw centred;
  centred.base = DiscreteMeasure(std::vector<double>{-1.0, 1.0}, std::vector<double>{0.5, 0.5});
  EXPECT_NO_THROW(centred.validate());
  EXPECT_FALSE(centred.absolutely_continuous());
  EXPECT_TRUE(InnovationLaw{}.absolutely_continuous());
  EXPECT_THROW(validate(ModelSpec{model::LinearProcess{{1.0, InnovationLaw{}}}}), std::invalid_argument);
  EXPECT_THROW(validate(ModelSpec{model::IIDParametric{ParametricFamily::bernoulli(), 1.2}}), std::invalid_argument);
}
