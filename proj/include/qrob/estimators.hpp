#pragma once

#include "qrob/functionals.hpp"
#include "qrob/models.hpp"
#include "qrob/rng.hpp"

#include <span>
#include <string>
#include <variant>

namespace qrob {

/// Value of an estimator together with the path that produced it.
struct Estimate {
  double value = 0.0;
  bool boundary = false;  ///< MLE hit the edge of the parameter set
  bool fallback = false;  ///< premium estimator used Monte Carlo
};

/// T(empirical(xs)).
double plug_in(const Functional& functional, std::span<const double> xs);

/// Closed-form maximum likelihood estimate. Boundary values (e.g. an all-zero
/// Bernoulli sample) are returned unclamped with `boundary` set.
Estimate mle(const ParametricFamily& family, std::span<const double> xs);

/// Lag-one sample autocovariance over sample second moment:
///   ((1/(n-1)) sum x_i x_{i+1}) / ((1/n) sum x_i^2),  0 if sum x_i^2 == 0.
double yule_walker(std::span<const double> xs);

inline constexpr std::size_t kDefaultMcFallbackSize = 100'000;

/// AVaR_alpha(m_n^{*n}) / n with m_n the empirical measure. When the exact
/// convolution exceeds atom_cap, switches to `mc_fallback_size` simulated
/// n-sums drawn from m_n under `seed`, and flags the result.
Estimate premium_estimator(std::span<const double> xs, double alpha,
                           std::size_t atom_cap = kDefaultAtomCap,
                           std::size_t mc_fallback_size = kDefaultMcFallbackSize,
                           const SeedSpec& seed = {});

namespace estimator {
struct PlugIn {
  Functional functional;
};
struct Mle {
  ParametricFamily family;
};
struct YuleWalker {};
struct Premium {
  double alpha = 0.5;
  std::size_t atom_cap = kDefaultAtomCap;
  std::size_t mc_fallback_size = kDefaultMcFallbackSize;
};
}  // namespace estimator

using Estimator = std::variant<estimator::PlugIn, estimator::Mle, estimator::YuleWalker,
                               estimator::Premium>;

void validate(const Estimator& est);

/// Applies the estimator; `seed` only feeds randomized fallbacks.
Estimate apply(const Estimator& est, std::span<const double> xs, const SeedSpec& seed = {});

std::string describe(const Estimator& est);

}  // namespace qrob
