#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qrob {

using Point = Eigen::VectorXd;

inline constexpr std::size_t kDefaultAtomCap = 1'000'000;
inline constexpr double kMassTolerance = 1e-12;

/// Thrown when a convolution would produce more candidate atoms than allowed.
/// Callers that can approximate (e.g. the premium estimator) catch this and
/// switch to Monte Carlo explicitly.
class AtomCapExceeded : public std::runtime_error {
 public:
  AtomCapExceeded(std::size_t requested, std::size_t cap);
  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

/// Finitely supported probability measure on R^d.
///
/// Atoms are stored column-wise in a d x k matrix, sorted lexicographically,
/// pairwise distinct under exact coordinate equality. Masses are strictly
/// positive and sum to one within kMassTolerance. Instances are immutable.
class DiscreteMeasure {
 public:
  /// Validates, sorts and merges exactly-equal atoms.
  DiscreteMeasure(Eigen::MatrixXd atoms, Eigen::VectorXd masses);

  /// One-dimensional convenience constructor.
  DiscreteMeasure(std::span<const double> atoms, std::span<const double> masses);

  int dim() const noexcept { return static_cast<int>(atoms_.rows()); }
  Eigen::Index size() const noexcept { return masses_.size(); }

  const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
  const Eigen::VectorXd& masses() const noexcept { return masses_; }

  /// Atom coordinates for d == 1 (sorted ascending). Throws otherwise.
  Eigen::VectorXd support() const;

  double mass(Eigen::Index i) const { return masses_(i); }
  auto atom(Eigen::Index i) const { return atoms_.col(i); }

  /// Mass sitting exactly at x (0 when x is not an atom).
  double mass_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Compares atoms exactly and masses within tol.
  bool approx_equal(const DiscreteMeasure& other, double tol) const;

  /// Builds a one-dimensional measure from (atom, mass) pairs, merging equal
  /// atoms. With `renormalize`, masses are rescaled to sum to one first
  /// (used after products of masses accumulate rounding).
  static DiscreteMeasure from_pairs(std::vector<std::pair<double, double>> pairs,
                                    bool renormalize = false);

 private:
  struct Trusted {};
  DiscreteMeasure(Trusted, Eigen::MatrixXd atoms, Eigen::VectorXd masses);

  Eigen::MatrixXd atoms_;
  Eigen::VectorXd masses_;
};

/// Gauge psi_p(x) = (1 + |x|_2)^p. psi_0 is identically one.
struct GaugeFunction {
  double p = 0.0;

  explicit GaugeFunction(double exponent);

  double operator()(double x) const;
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

DiscreteMeasure empirical(std::span<const double> xs);
/// Columns of `points` are the observations.
DiscreteMeasure empirical(const Eigen::MatrixXd& points);

DiscreteMeasure dirac(double x);
DiscreteMeasure dirac(const Point& x);

/// (1 - t) mu1 + t mu2.
DiscreteMeasure mix(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double t);

/// Translate every atom by c (d == 1).
DiscreteMeasure shift(const DiscreteMeasure& mu, double c);
/// Multiply every atom by c (d == 1).
DiscreteMeasure scale(const DiscreteMeasure& mu, double c);

/// Exact convolution on the real line. Throws AtomCapExceeded when
/// |supp mu1| * |supp mu2| > atom_cap.
DiscreteMeasure convolve(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                         std::size_t atom_cap = kDefaultAtomCap);

/// n-fold convolution mu^{*n}; n == 1 returns mu.
DiscreteMeasure convolve_power(const DiscreteMeasure& mu, int n,
                               std::size_t atom_cap = kDefaultAtomCap);

/// Rounds coordinates to the grid width * Z and merges. width == 0 is a no-op.
DiscreteMeasure coarsen(const DiscreteMeasure& mu, double grid_width);

/// Right-continuous distribution function (d == 1).
double cdf(const DiscreteMeasure& mu, double x);

/// Lower quantile inf{x : F(x) >= q}, q in (0, 1].
double quantile(const DiscreteMeasure& mu, double q);

double gauge_integral(const DiscreteMeasure& mu, const GaugeFunction& psi);

/// Sum of mass * psi(atom) over atoms with psi(atom) >= a.
double gauge_tail(const DiscreteMeasure& mu, const GaugeFunction& psi, double a);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace qrob
