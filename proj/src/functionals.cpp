#include "qrob/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qrob {

namespace {

void require_dim1(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw std::invalid_argument("functionals are defined for d == 1");
}

void require_level(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

double avar_quantile_average(const DiscreteMeasure& mu, double alpha) {
  // int_{1-alpha}^1 q(u) du, consuming atoms from the top.
  const auto& x = mu.atoms();
  std::vector<double> terms;
  double remaining = alpha;
  for (Eigen::Index i = mu.size() - 1; i >= 0 && remaining > 0.0; --i) {
    const double take = std::min(mu.mass(i), remaining);
    terms.push_back(take * x(0, i));
    remaining -= take;
  }
  // Rounding in the masses can leave a sliver; it belongs to the lowest atom.
  if (remaining > 0.0) terms.push_back(remaining * x(0, 0));
  return compensated_sum(terms) / alpha;
}

double avar_distribution_form(const DiscreteMeasure& mu, double alpha) {
  const auto& x = mu.atoms();
  const Eigen::Index k = mu.size();
  // tail(j) = mu((x_j, inf)), accumulated from the top for accuracy.
  Eigen::VectorXd tail(k);
  double acc = 0.0;
  for (Eigen::Index j = k - 1; j >= 0; --j) {
    tail(j) = acc;
    acc += mu.mass(j);
  }

  std::vector<double> terms;
  terms.push_back(std::max(0.0, x(0, 0)));   // (-inf, x_1): F = 0
  terms.push_back(std::min(0.0, x(0, k - 1)));  // [x_k, inf): F = 1
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    const double a = x(0, j);
    const double b = x(0, j + 1);
    const double upper = std::min(1.0, tail(j) / alpha);  // 1 - g(F)
    const double g = 1.0 - upper;
    const double neg = std::max(0.0, std::min(b, 0.0) - a);
    const double pos = std::max(0.0, b - std::max(a, 0.0));
    if (neg > 0.0) terms.push_back(-g * neg);
    if (pos > 0.0) terms.push_back(upper * pos);
  }
  return compensated_sum(terms);
}

}  // namespace

double mean(const DiscreteMeasure& mu) {
  require_dim1(mu);
  const Eigen::VectorXd terms = mu.atoms().row(0).transpose().cwiseProduct(mu.masses());
  return compensated_sum({terms.data(), static_cast<std::size_t>(terms.size())});
}

double abs_moment(const DiscreteMeasure& mu, double p) {
  require_dim1(mu);
  if (!(p > 0.0)) throw std::invalid_argument("moment order must be > 0");
  const Eigen::VectorXd terms =
      mu.atoms().row(0).transpose().cwiseAbs().array().pow(p).matrix().cwiseProduct(mu.masses());
  return compensated_sum({terms.data(), static_cast<std::size_t>(terms.size())});
}

double var_level(const DiscreteMeasure& mu, double s) {
  require_dim1(mu);
  require_level(s, "VaR level");
  return quantile(mu, 1.0 - s);
}

double avar(const DiscreteMeasure& mu, double alpha, AvarMethod method) {
  require_dim1(mu);
  require_level(alpha, "AVaR level");
  return method == AvarMethod::QuantileAverage ? avar_quantile_average(mu, alpha)
                                               : avar_distribution_form(mu, alpha);
}

double premium(const DiscreteMeasure& mu, double alpha, int n, std::size_t atom_cap) {
  require_level(alpha, "AVaR level");
  return avar(convolve_power(mu, n, atom_cap), alpha) / static_cast<double>(n);
}

void validate(const Functional& f) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, functional::AbsMoment>) {
          if (!(g.p > 0.0)) throw std::invalid_argument("moment order must be > 0");
        } else if constexpr (std::is_same_v<T, functional::VaR>) {
          require_level(g.s, "VaR level");
        } else if constexpr (std::is_same_v<T, functional::AVaR>) {
          require_level(g.alpha, "AVaR level");
        } else if constexpr (std::is_same_v<T, functional::Premium>) {
          require_level(g.alpha, "AVaR level");
          if (g.n < 1) throw std::invalid_argument("collective size must be >= 1");
        }
      },
      f);
}

double evaluate(const Functional& f, const DiscreteMeasure& mu) {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, functional::Mean>) {
          return mean(mu);
        } else if constexpr (std::is_same_v<T, functional::AbsMoment>) {
          return abs_moment(mu, g.p);
        } else if constexpr (std::is_same_v<T, functional::VaR>) {
          return var_level(mu, g.s);
        } else if constexpr (std::is_same_v<T, functional::AVaR>) {
          return avar(mu, g.alpha);
        } else {
          return premium(mu, g.alpha, g.n, g.atom_cap);
        }
      },
      f);
}

std::string describe(const Functional& f) {
  std::ostringstream os;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, functional::Mean>) {
          os << "Mean";
        } else if constexpr (std::is_same_v<T, functional::AbsMoment>) {
          os << "AbsMoment{p=" << g.p << "}";
        } else if constexpr (std::is_same_v<T, functional::VaR>) {
          os << "VaR{s=" << g.s << "}";
        } else if constexpr (std::is_same_v<T, functional::AVaR>) {
          os << "AVaR{alpha=" << g.alpha << "}";
        } else {
          os << "Premium{alpha=" << g.alpha << ", n=" << g.n << "}";
        }
      },
      f);
  return os.str();
}

}  // namespace qrob
