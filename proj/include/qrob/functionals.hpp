#pragma once

#include "qrob/measures.hpp"

#include <string>
#include <variant>

namespace qrob {

// Statistical functionals on one-dimensional discrete measures. Atoms are
// read as losses: larger is worse, no sign flip in VaR / AVaR.

double mean(const DiscreteMeasure& mu);

/// int |x|^p dmu, p > 0.
double abs_moment(const DiscreteMeasure& mu, double p);

/// Value at Risk at level s: the lower (1 - s)-quantile.
double var_level(const DiscreteMeasure& mu, double s);

enum class AvarMethod {
  QuantileAverage,   ///< (1/alpha) int_0^alpha VaR_s ds
  DistributionForm,  ///< -int_{-inf}^0 g(F) dx + int_0^inf (1 - g(F)) dx
};

/// Average Value at Risk at level alpha in (0, 1), evaluated in closed form
/// over the atom grid.
double avar(const DiscreteMeasure& mu, double alpha,
            AvarMethod method = AvarMethod::QuantileAverage);

/// Collective premium AVaR_alpha(mu^{*n}) / n. Propagates AtomCapExceeded.
double premium(const DiscreteMeasure& mu, double alpha, int n,
               std::size_t atom_cap = kDefaultAtomCap);

namespace functional {
struct Mean {};
struct AbsMoment {
  double p;
};
struct VaR {
  double s;
};
struct AVaR {
  double alpha;
};
struct Premium {
  double alpha;
  int n;
  std::size_t atom_cap = kDefaultAtomCap;
};
}  // namespace functional

using Functional = std::variant<functional::Mean, functional::AbsMoment, functional::VaR,
                                functional::AVaR, functional::Premium>;

/// Throws std::invalid_argument on out-of-range parameters.
void validate(const Functional& f);

double evaluate(const Functional& f, const DiscreteMeasure& mu);

std::string describe(const Functional& f);

}  // namespace qrob
