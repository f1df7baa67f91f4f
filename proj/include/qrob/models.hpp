#pragma once

#include "qrob/measures.hpp"
#include "qrob/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qrob {

enum class Family { Bernoulli, Poisson, Exponential, Normal };

/// Dominated one-parameter families. Exponential uses the rate
/// parametrization theta * exp(-theta x); Normal has known variance sigma2
/// and unknown mean theta.
struct ParametricFamily {
  Family kind = Family::Normal;
  double sigma2 = 1.0;

  static ParametricFamily bernoulli() { return {Family::Bernoulli, 1.0}; }
  static ParametricFamily poisson() { return {Family::Poisson, 1.0}; }
  static ParametricFamily exponential() { return {Family::Exponential, 1.0}; }
  static ParametricFamily normal(double variance = 1.0);

  /// theta in the open parameter set: (0,1), (0,inf), (0,inf), R.
  bool in_range(double theta) const;
  void require_in_range(double theta) const;
  bool in_support(double x) const;
  std::string name() const;
};

double log_likelihood(const ParametricFamily& family, double theta, std::span<const double> xs);

/// d/dtheta log L_1(x; theta).
double score(const ParametricFamily& family, double theta, double x);

/// Fisher information of one observation.
double fisher_info(const ParametricFamily& family, double theta);

/// int |L_1(x; theta1) - L_1(x; theta2)| dx (counting measure for discrete
/// families), in closed form through the single crossing of the densities.
double l1_density_distance(const ParametricFamily& family, double theta1, double theta2);

double draw(const ParametricFamily& family, double theta, CounterRng& rng);

struct NormalInnovation {
  double sigma2 = 1.0;
};
struct UniformInnovation {
  double b = 1.0;  ///< uniform on [-b, b]
};

/// Innovation law of the linear process, optionally contaminated:
/// (1 - w) base + w contaminant with a centred discrete contaminant.
struct InnovationLaw {
  std::variant<NormalInnovation, UniformInnovation, DiscreteMeasure> base = NormalInnovation{};
  double contamination_weight = 0.0;
  std::optional<DiscreteMeasure> contaminant;

  double mean() const;
  double variance() const;
  /// False for discrete parts, which fall outside the absolutely continuous
  /// hypothesis of the Yule-Walker robustness result.
  bool absolutely_continuous() const;
  double draw(CounterRng& rng) const;
  void validate() const;
};

/// X_i = sum_{k >= 0} a^k Z_{i-k}, |a| < 1.
struct LinearProcessModel {
  double a = 0.0;
  InnovationLaw innovation;

  void validate() const;
};

/// Burn-in length ceil(ln(1e-12 (1 - |a|)) / ln|a|), capped at 1e5; 0 for a == 0.
int burn_in_length(double a);

namespace model {
struct IIDParametric {
  ParametricFamily family;
  double theta = 0.0;
};
struct IIDNonparametric {
  DiscreteMeasure law;
};
struct LinearProcess {
  LinearProcessModel process;
};
}  // namespace model

using ModelSpec = std::variant<model::IIDParametric, model::IIDNonparametric, model::LinearProcess>;

void validate(const ModelSpec& model);

/// Draws X_1..X_n. Deterministic in (model, n, seed).
std::vector<double> sample(const ModelSpec& model, int n, const SeedSpec& seed);

/// Inverse-cdf sampling from a one-dimensional discrete measure.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const DiscreteMeasure& mu);
  double operator()(CounterRng& rng) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> cumulative_;
};

}  // namespace qrob
