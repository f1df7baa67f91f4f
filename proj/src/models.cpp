#include "qrob/models.hpp"

#include "qrob/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qrob {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double poisson_cdf(double rate, double k) {
  double total = 0.0;
  for (double j = 0.0; j <= k; j += 1.0) {
    total += std::exp(j * std::log(rate) - rate - std::lgamma(j + 1.0));
  }
  return std::min(1.0, total);
}

}  // namespace

ParametricFamily ParametricFamily::normal(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("normal variance must be > 0");
  return {Family::Normal, variance};
}

bool ParametricFamily::in_range(double theta) const {
  if (!std::isfinite(theta)) return false;
  switch (kind) {
    case Family::Bernoulli:
      return theta > 0.0 && theta < 1.0;
    case Family::Poisson:
    case Family::Exponential:
      return theta > 0.0;
    case Family::Normal:
      return true;
  }
  return false;
}

void ParametricFamily::require_in_range(double theta) const {
  if (!in_range(theta)) throw std::invalid_argument(name() + ": parameter outside the open parameter set");
}

bool ParametricFamily::in_support(double x) const {
  if (!std::isfinite(x)) return false;
  switch (kind) {
    case Family::Bernoulli:
      return x == 0.0 || x == 1.0;
    case Family::Poisson:
      return x >= 0.0 && x == std::floor(x);
    case Family::Exponential:
      return x >= 0.0;
    case Family::Normal:
      return true;
  }
  return false;
}

std::string ParametricFamily::name() const {
  switch (kind) {
    case Family::Bernoulli:
      return "bernoulli";
    case Family::Poisson:
      return "poisson";
    case Family::Exponential:
      return "exponential";
    case Family::Normal:
      return "normal";
  }
  return "unknown";
}

double log_likelihood(const ParametricFamily& family, double theta, std::span<const double> xs) {
  family.require_in_range(theta);
  double total = 0.0;
  for (double x : xs) {
    if (!family.in_support(x)) throw std::invalid_argument(family.name() + ": observation outside support");
    switch (family.kind) {
      case Family::Bernoulli:
        total += x == 1.0 ? std::log(theta) : std::log1p(-theta);
        break;
      case Family::Poisson:
        total += x * std::log(theta) - theta - std::lgamma(x + 1.0);
        break;
      case Family::Exponential:
        total += std::log(theta) - theta * x;
        break;
      case Family::Normal:
        total += -0.5 * std::log(2.0 * std::numbers::pi * family.sigma2) -
                 0.5 * (x - theta) * (x - theta) / family.sigma2;
        break;
    }
  }
  return total;
}

double score(const ParametricFamily& family, double theta, double x) {
  switch (family.kind) {
    case Family::Bernoulli:
      return x / theta - (1.0 - x) / (1.0 - theta);
    case Family::Poisson:
      return x / theta - 1.0;
    case Family::Exponential:
      return 1.0 / theta - x;
    case Family::Normal:
      return (x - theta) / family.sigma2;
  }
  return 0.0;
}

double fisher_info(const ParametricFamily& family, double theta) {
  family.require_in_range(theta);
  switch (family.kind) {
    case Family::Bernoulli:
      return 1.0 / (theta * (1.0 - theta));
    case Family::Poisson:
      return 1.0 / theta;
    case Family::Exponential:
      return 1.0 / (theta * theta);
    case Family::Normal:
      return 1.0 / family.sigma2;
  }
  return 0.0;
}

double l1_density_distance(const ParametricFamily& family, double theta1, double theta2) {
  family.require_in_range(theta1);
  family.require_in_range(theta2);
  if (theta1 == theta2) return 0.0;
  const double lo = std::min(theta1, theta2);
  const double hi = std::max(theta1, theta2);
  switch (family.kind) {
    case Family::Bernoulli:
      return 2.0 * (hi - lo);
    case Family::Poisson: {
      // p_hi / p_lo increases in k; p_lo dominates on k <= crossing.
      const double crossing = (hi - lo) / std::log(hi / lo);
      const double k0 = std::floor(crossing);
      return 2.0 * (poisson_cdf(lo, k0) - poisson_cdf(hi, k0));
    }
    case Family::Exponential: {
      // The faster rate dominates left of the crossing.
      const double crossing = std::log(hi / lo) / (hi - lo);
      return 2.0 * (std::exp(-lo * crossing) - std::exp(-hi * crossing));
    }
    case Family::Normal: {
      const double half = (hi - lo) / (2.0 * std::sqrt(family.sigma2));
      return 2.0 * (2.0 * normal_cdf(half) - 1.0);
    }
  }
  return 0.0;
}

double draw(const ParametricFamily& family, double theta, CounterRng& rng) {
  switch (family.kind) {
    case Family::Bernoulli:
      return rng.uniform() < theta ? 1.0 : 0.0;
    case Family::Poisson:
      return rng.poisson(theta);
    case Family::Exponential:
      return rng.exponential(theta);
    case Family::Normal:
      return theta + std::sqrt(family.sigma2) * rng.normal();
  }
  return 0.0;
}

DiscreteSampler::DiscreteSampler(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw std::invalid_argument("discrete sampler requires d == 1");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    atoms_.push_back(mu.atoms()(0, i));
    acc += mu.mass(i);
    cumulative_.push_back(acc);
  }
}

double DiscreteSampler::operator()(CounterRng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
  return atoms_[idx];
}

double InnovationLaw::mean() const {
  const double base_mean = std::visit(
      [](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, DiscreteMeasure>) {
          return qrob::mean(b);
        } else {
          return 0.0;
        }
      },
      base);
  const double extra = contaminant ? qrob::mean(*contaminant) : 0.0;
  return (1.0 - contamination_weight) * base_mean + contamination_weight * extra;
}

double InnovationLaw::variance() const {
  auto second_moment = [](const auto& b) -> double {
    using T = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<T, NormalInnovation>) {
      return b.sigma2;
    } else if constexpr (std::is_same_v<T, UniformInnovation>) {
      return b.b * b.b / 3.0;
    } else {
      const Eigen::VectorXd x = b.atoms().row(0).transpose();
      return x.cwiseProduct(x).dot(b.masses());
    }
  };
  double m2 = (1.0 - contamination_weight) * std::visit(second_moment, base);
  if (contaminant) m2 += contamination_weight * second_moment(*contaminant);
  const double m = mean();
  return m2 - m * m;
}

bool InnovationLaw::absolutely_continuous() const {
  return !std::holds_alternative<DiscreteMeasure>(base) &&
         (contamination_weight == 0.0 || !contaminant.has_value());
}

double InnovationLaw::draw(CounterRng& rng) const {
  if (contamination_weight > 0.0 && contaminant) {
    if (rng.uniform() < contamination_weight) return DiscreteSampler(*contaminant)(rng);
  }
  return std::visit(
      [&](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, NormalInnovation>) {
          return std::sqrt(b.sigma2) * rng.normal();
        } else if constexpr (std::is_same_v<T, UniformInnovation>) {
          return b.b * (2.0 * rng.uniform() - 1.0);
        } else {
          return DiscreteSampler(b)(rng);
        }
      },
      base);
}

void InnovationLaw::validate() const {
  std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, NormalInnovation>) {
          if (!(b.sigma2 > 0.0)) throw std::invalid_argument("innovation variance must be > 0");
        } else if constexpr (std::is_same_v<T, UniformInnovation>) {
          if (!(b.b > 0.0)) throw std::invalid_argument("uniform innovation half-width must be > 0");
        } else {
          if (b.dim() != 1) throw std::invalid_argument("innovation law must be one-dimensional");
        }
      },
      base);
  if (!(contamination_weight >= 0.0 && contamination_weight <= 1.0)) {
    throw std::invalid_argument("contamination weight must lie in [0, 1]");
  }
  if (contamination_weight > 0.0 && !contaminant) {
    throw std::invalid_argument("contamination weight given without a contaminant");
  }
  if (std::abs(mean()) > 1e-12) throw std::invalid_argument("innovation law must have mean 0");
  if (!(variance() > 0.0)) throw std::invalid_argument("innovation variance must be > 0");
}

void LinearProcessModel::validate() const {
  if (!(std::abs(a) < 1.0)) throw std::invalid_argument("linear process coefficient must satisfy |a| < 1");
  innovation.validate();
}

int burn_in_length(double a) {
  const double abs_a = std::abs(a);
  if (abs_a == 0.0) return 0;
  const double k = std::ceil(std::log(1e-12 * (1.0 - abs_a)) / std::log(abs_a));
  return static_cast<int>(std::min(k, 1e5));
}

void validate(const ModelSpec& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, model::IIDParametric>) {
          m.family.require_in_range(m.theta);
        } else if constexpr (std::is_same_v<T, model::IIDNonparametric>) {
          if (m.law.dim() != 1) throw std::invalid_argument("nonparametric law must be one-dimensional");
        } else {
          m.process.validate();
        }
      },
      model);
}

std::vector<double> sample(const ModelSpec& model, int n, const SeedSpec& seed) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  CounterRng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, model::IIDParametric>) {
          for (double& x : xs) x = draw(m.family, m.theta, rng);
        } else if constexpr (std::is_same_v<T, model::IIDNonparametric>) {
          const DiscreteSampler sampler(m.law);
          for (double& x : xs) x = sampler(rng);
        } else {
          const auto& process = m.process;
          const int burn = burn_in_length(process.a);
          double state = 0.0;
          for (int t = 0; t < burn; ++t) state = process.a * state + process.innovation.draw(rng);
          for (double& x : xs) {
            state = process.a * state + process.innovation.draw(rng);
            x = state;
          }
        }
      },
      model);
  return xs;
}

}  // namespace qrob
