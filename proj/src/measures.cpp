#include "qrob/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace qrob {

namespace {

bool column_less(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m(r, a) < m(r, b)) return true;
    if (m(r, b) < m(r, a)) return false;
  }
  return false;
}

bool column_equal(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
  return (m.col(a).array() == m.col(b).array()).all();
}

void check_mass_sum(const Eigen::VectorXd& masses) {
  const double total = compensated_sum({masses.data(), static_cast<std::size_t>(masses.size())});
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "masses must sum to 1 (got " << total << ")";
    throw std::invalid_argument(os.str());
  }
}

void require_dim1(const DiscreteMeasure& mu, const char* what) {
  if (mu.dim() != 1) {
    throw std::invalid_argument(std::string(what) + " requires a one-dimensional measure");
  }
}

}  // namespace

AtomCapExceeded::AtomCapExceeded(std::size_t requested, std::size_t cap)
    : std::runtime_error("convolution needs " + std::to_string(requested) +
                         " candidate atoms, cap is " + std::to_string(cap)),
      requested_(requested),
      cap_(cap) {}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

DiscreteMeasure::DiscreteMeasure(Trusted, Eigen::MatrixXd atoms, Eigen::VectorXd masses)
    : atoms_(std::move(atoms)), masses_(std::move(masses)) {}

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd atoms, Eigen::VectorXd masses) {
  if (atoms.cols() == 0) throw std::invalid_argument("measure needs at least one atom");
  if (atoms.rows() < 1) throw std::invalid_argument("atom dimension must be >= 1");
  if (atoms.cols() != masses.size()) {
    throw std::invalid_argument("atom count and mass count differ");
  }
  if (!atoms.allFinite()) throw std::invalid_argument("atom coordinates must be finite");
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    if (!(masses(i) > 0.0) || !std::isfinite(masses(i))) {
      throw std::invalid_argument("masses must be strictly positive");
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(atoms.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return column_less(atoms, a, b); });

  std::vector<Eigen::Index> keep;
  std::vector<double> merged;
  for (Eigen::Index idx : order) {
    if (!keep.empty() && column_equal(atoms, keep.back(), idx)) {
      merged.back() += masses(idx);
    } else {
      keep.push_back(idx);
      merged.push_back(masses(idx));
    }
  }

  atoms_.resize(atoms.rows(), static_cast<Eigen::Index>(keep.size()));
  masses_.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    atoms_.col(static_cast<Eigen::Index>(j)) = atoms.col(keep[j]);
    masses_(static_cast<Eigen::Index>(j)) = merged[j];
  }
  check_mass_sum(masses_);
}

DiscreteMeasure::DiscreteMeasure(std::span<const double> atoms, std::span<const double> masses)
    : DiscreteMeasure(Eigen::Map<const Eigen::RowVectorXd>(atoms.data(),
                                                           static_cast<Eigen::Index>(atoms.size())),
                      Eigen::Map<const Eigen::VectorXd>(masses.data(),
                                                        static_cast<Eigen::Index>(masses.size()))) {}

DiscreteMeasure DiscreteMeasure::from_pairs(std::vector<std::pair<double, double>> pairs,
                                            bool renormalize) {
  if (pairs.empty()) throw std::invalid_argument("measure needs at least one atom");
  for (const auto& [x, w] : pairs) {
    if (!std::isfinite(x)) throw std::invalid_argument("atom coordinates must be finite");
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("masses must be strictly positive");
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> xs;
  std::vector<double> ws;
  xs.reserve(pairs.size());
  ws.reserve(pairs.size());
  for (const auto& [x, w] : pairs) {
    if (!xs.empty() && xs.back() == x) {
      ws.back() += w;
    } else {
      xs.push_back(x);
      ws.push_back(w);
    }
  }

  Eigen::VectorXd masses = Eigen::Map<Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  if (renormalize) masses /= compensated_sum(ws);
  check_mass_sum(masses);
  Eigen::MatrixXd atoms = Eigen::Map<Eigen::RowVectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  return DiscreteMeasure(Trusted{}, std::move(atoms), std::move(masses));
}

Eigen::VectorXd DiscreteMeasure::support() const {
  require_dim1(*this, "support()");
  return atoms_.row(0).transpose();
}

double DiscreteMeasure::mass_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != atoms_.rows()) return 0.0;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if ((atoms_.col(i).array() == x.array()).all()) return masses_(i);
  }
  return 0.0;
}

bool DiscreteMeasure::approx_equal(const DiscreteMeasure& other, double tol) const {
  if (dim() != other.dim() || size() != other.size()) return false;
  if ((atoms_.array() != other.atoms_.array()).any()) return false;
  return ((masses_ - other.masses_).cwiseAbs().array() <= tol).all();
}

GaugeFunction::GaugeFunction(double exponent) : p(exponent) {
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("gauge exponent must be finite and >= 0");
  }
}

double GaugeFunction::operator()(double x) const {
  if (p == 0.0) return 1.0;
  return std::pow(1.0 + std::abs(x), p);
}

double GaugeFunction::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (p == 0.0) return 1.0;
  return std::pow(1.0 + x.norm(), p);
}

DiscreteMeasure empirical(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("empirical measure of an empty sample");
  const double w = 1.0 / static_cast<double>(xs.size());
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    pairs.emplace_back(sorted[i], static_cast<double>(j - i) * w);
    i = j;
  }
  return DiscreteMeasure::from_pairs(std::move(pairs));
}

DiscreteMeasure empirical(const Eigen::MatrixXd& points) {
  if (points.cols() == 0) throw std::invalid_argument("empirical measure of an empty sample");
  const double w = 1.0 / static_cast<double>(points.cols());
  return DiscreteMeasure(points, Eigen::VectorXd::Constant(points.cols(), w));
}

DiscreteMeasure dirac(double x) {
  return DiscreteMeasure::from_pairs({{x, 1.0}});
}

DiscreteMeasure dirac(const Point& x) {
  return DiscreteMeasure(Eigen::MatrixXd(x), Eigen::VectorXd::Ones(1));
}

DiscreteMeasure mix(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("mixing weight must lie in [0, 1]");
  if (mu1.dim() != mu2.dim()) throw std::invalid_argument("mix: dimension mismatch");
  if (t == 0.0) return mu1;
  if (t == 1.0) return mu2;
  Eigen::MatrixXd atoms(mu1.dim(), mu1.size() + mu2.size());
  atoms << mu1.atoms(), mu2.atoms();
  Eigen::VectorXd masses(mu1.size() + mu2.size());
  masses << (1.0 - t) * mu1.masses(), t * mu2.masses();
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

DiscreteMeasure shift(const DiscreteMeasure& mu, double c) {
  require_dim1(mu, "shift");
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) pairs.emplace_back(mu.atoms()(0, i) + c, mu.mass(i));
  return DiscreteMeasure::from_pairs(std::move(pairs));
}

DiscreteMeasure scale(const DiscreteMeasure& mu, double c) {
  require_dim1(mu, "scale");
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) pairs.emplace_back(mu.atoms()(0, i) * c, mu.mass(i));
  return DiscreteMeasure::from_pairs(std::move(pairs));
}

DiscreteMeasure convolve(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                         std::size_t atom_cap) {
  require_dim1(mu1, "convolve");
  require_dim1(mu2, "convolve");
  const auto n1 = static_cast<std::size_t>(mu1.size());
  const auto n2 = static_cast<std::size_t>(mu2.size());
  if (n1 * n2 > atom_cap) throw AtomCapExceeded(n1 * n2, atom_cap);

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(n1 * n2);
  const auto& a = mu1.atoms();
  const auto& b = mu2.atoms();
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    for (Eigen::Index j = 0; j < mu2.size(); ++j) {
      pairs.emplace_back(a(0, i) + b(0, j), mu1.mass(i) * mu2.mass(j));
    }
  }
  return DiscreteMeasure::from_pairs(std::move(pairs), /*renormalize=*/true);
}

DiscreteMeasure convolve_power(const DiscreteMeasure& mu, int n, std::size_t atom_cap) {
  if (n < 1) throw std::invalid_argument("convolution power must be >= 1");
  require_dim1(mu, "convolve_power");
  DiscreteMeasure acc = mu;
  for (int k = 1; k < n; ++k) acc = convolve(acc, mu, atom_cap);
  return acc;
}

DiscreteMeasure coarsen(const DiscreteMeasure& mu, double grid_width) {
  if (grid_width < 0.0) throw std::invalid_argument("grid width must be >= 0");
  if (grid_width == 0.0) return mu;
  Eigen::MatrixXd atoms = (mu.atoms().array() / grid_width).round() * grid_width;
  return DiscreteMeasure(std::move(atoms), mu.masses());
}

double cdf(const DiscreteMeasure& mu, double x) {
  require_dim1(mu, "cdf");
  const auto& a = mu.atoms();
  std::vector<double> below;
  for (Eigen::Index i = 0; i < mu.size() && a(0, i) <= x; ++i) below.push_back(mu.mass(i));
  return std::min(1.0, compensated_sum(below));
}

double quantile(const DiscreteMeasure& mu, double q) {
  require_dim1(mu, "quantile");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1]");
  const auto& a = mu.atoms();
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    cumulative += mu.mass(i);
    if (cumulative >= q) return a(0, i);
  }
  return a(0, mu.size() - 1);
}

double gauge_integral(const DiscreteMeasure& mu, const GaugeFunction& psi) {
  std::vector<double> terms(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    terms[static_cast<std::size_t>(i)] = mu.mass(i) * psi(mu.atom(i));
  }
  return compensated_sum(terms);
}

double gauge_tail(const DiscreteMeasure& mu, const GaugeFunction& psi, double a) {
  std::vector<double> terms;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double g = psi(mu.atom(i));
    if (g >= a) terms.push_back(mu.mass(i) * g);
  }
  return compensated_sum(terms);
}

}  // namespace qrob
