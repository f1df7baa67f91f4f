#include "qrob/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qrob {

double plug_in(const Functional& functional, std::span<const double> xs) {
  return evaluate(functional, empirical(xs));
}

Estimate mle(const ParametricFamily& family, std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mle of an empty sample");
  std::vector<double> values(xs.begin(), xs.end());
  for (double x : values) {
    if (!family.in_support(x)) throw std::invalid_argument(family.name() + ": observation outside support");
  }
  const double n = static_cast<double>(values.size());
  const double total = compensated_sum(values);

  Estimate est;
  if (family.kind == Family::Exponential) {
    if (total == 0.0) throw std::domain_error("exponential mle undefined for an all-zero sample");
    est.value = n / total;
  } else {
    est.value = total / n;
  }
  est.boundary = !family.in_range(est.value);
  return est;
}

double yule_walker(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("yule_walker needs at least two observations");
  std::vector<double> lagged(n - 1);
  std::vector<double> squares(n);
  for (std::size_t i = 0; i + 1 < n; ++i) lagged[i] = xs[i] * xs[i + 1];
  for (std::size_t i = 0; i < n; ++i) squares[i] = xs[i] * xs[i];
  const double denominator = compensated_sum(squares);
  if (!(denominator > 0.0)) return 0.0;
  const double numerator = compensated_sum(lagged);
  return (numerator / static_cast<double>(n - 1)) / (denominator / static_cast<double>(n));
}

Estimate premium_estimator(std::span<const double> xs, double alpha, std::size_t atom_cap,
                           std::size_t mc_fallback_size, const SeedSpec& seed) {
  if (xs.empty()) throw std::invalid_argument("premium estimator of an empty sample");
  const DiscreteMeasure m = empirical(xs);
  const int n = static_cast<int>(xs.size());
  try {
    return {premium(m, alpha, n, atom_cap), false, false};
  } catch (const AtomCapExceeded&) {
  }
  if (mc_fallback_size < 2) throw std::invalid_argument("mc_fallback_size must be >= 2");

  // Each n-sum draws n indices uniformly from the sample, i.e. from m_n.
  CounterRng rng(seed);
  std::vector<double> sums(mc_fallback_size);
  std::vector<double> parts(static_cast<std::size_t>(n));
  for (double& s : sums) {
    for (double& p : parts) {
      const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      p = xs[std::min(idx, xs.size() - 1)];
    }
    s = compensated_sum(parts);
  }
  return {avar(empirical(sums), alpha) / static_cast<double>(n), false, true};
}

void validate(const Estimator& est) {
  std::visit(
      [](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, estimator::PlugIn>) {
          validate(e.functional);
        } else if constexpr (std::is_same_v<T, estimator::Premium>) {
          if (!(e.alpha > 0.0 && e.alpha < 1.0)) throw std::invalid_argument("AVaR level must lie in (0, 1)");
          if (e.mc_fallback_size < 2) throw std::invalid_argument("mc_fallback_size must be >= 2");
        }
      },
      est);
}

Estimate apply(const Estimator& est, std::span<const double> xs, const SeedSpec& seed) {
  return std::visit(
      [&](const auto& e) -> Estimate {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, estimator::PlugIn>) {
          return {plug_in(e.functional, xs), false, false};
        } else if constexpr (std::is_same_v<T, estimator::Mle>) {
          return mle(e.family, xs);
        } else if constexpr (std::is_same_v<T, estimator::YuleWalker>) {
          return {yule_walker(xs), false, false};
        } else {
          return premium_estimator(xs, e.alpha, e.atom_cap, e.mc_fallback_size, seed);
        }
      },
      est);
}

std::string describe(const Estimator& est) {
  std::ostringstream os;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, estimator::PlugIn>) {
          os << "PlugIn{" << describe(e.functional) << "}";
        } else if constexpr (std::is_same_v<T, estimator::Mle>) {
          os << "MLE{" << e.family.name() << "}";
        } else if constexpr (std::is_same_v<T, estimator::YuleWalker>) {
          os << "YuleWalker";
        } else {
          os << "PremiumEstimator{alpha=" << e.alpha << "}";
        }
      },
      est);
  return os.str();
}

}  // namespace qrob
