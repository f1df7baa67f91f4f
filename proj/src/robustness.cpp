#include "qrob/robustness.hpp"

#include "qrob/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qrob {

double round_output(double x) {
  if (!std::isfinite(x) || std::abs(x) >= 1e3) return x;
  return std::nearbyint(x * 1e12) / 1e12;
}

SamplingLaw sampling_law(const ModelSpec& model, const Estimator& estimator, int n, int replications,
                         std::uint64_t master_seed, int threads) {
  if (replications < 2) throw std::invalid_argument("sampling law needs R >= 2");
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  validate(model);
  validate(estimator);

  std::vector<Estimate> estimates(static_cast<std::size_t>(replications));
  parallel_for(estimates.size(), threads, [&](std::size_t r) {
    const SeedSpec seed{master_seed, r};
    const std::vector<double> xs = sample(model, n, seed);
    estimates[r] = apply(estimator, xs, seed.nested(1));
  });

  SamplingLaw out{dirac(0.0), n, replications, master_seed, 0, 0};
  std::vector<double> values;
  values.reserve(estimates.size());
  for (const Estimate& e : estimates) {
    if (!std::isfinite(e.value)) throw std::runtime_error("estimator produced a non-finite value");
    values.push_back(round_output(e.value));
    out.boundary_hits += e.boundary ? 1 : 0;
    out.fallbacks += e.fallback ? 1 : 0;
  }
  out.law = empirical(values);
  return out;
}

ModelSpec ContaminationPath::at(double delta) const {
  if (!(delta >= 0.0)) throw std::invalid_argument("path parameter delta must be >= 0");
  return std::visit(
      [&](const auto& p) -> ModelSpec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, path::ParamShift>) {
          return model::IIDParametric{p.family, p.theta1 + p.direction * delta};
        } else if constexpr (std::is_same_v<T, path::MixtureDirac>) {
          if (delta == 0.0) return model::IIDNonparametric{p.base};
          if (delta > 1.0) throw std::invalid_argument("mixture weight delta must be <= 1");
          const double location = p.inverse_in_delta ? p.c / delta : p.c;
          return model::IIDNonparametric{mix(p.base, dirac(location), delta)};
        } else {
          LinearProcessModel m = p.base;
          m.a += p.direction * delta;
          if (p.innovation_contaminant && delta > 0.0) {
            m.innovation.contaminant = p.innovation_contaminant;
            m.innovation.contamination_weight = delta;
          }
          return model::LinearProcess{m};
        }
      },
      kind);
}

std::string ContaminationPath::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, path::ParamShift>) {
          os << "ParamShift{" << p.family.name() << ", theta1=" << p.theta1
             << ", direction=" << p.direction << "}";
        } else if constexpr (std::is_same_v<T, path::MixtureDirac>) {
          os << "MixtureDirac{atoms=" << p.base.size() << ", c(delta)=" << p.c
             << (p.inverse_in_delta ? "/delta}" : "}");
        } else {
          os << "ArShift{a=" << p.base.a << ", direction=" << p.direction
             << (p.innovation_contaminant ? ", contaminated innovations" : "") << "}";
        }
      },
      kind);
  return os.str();
}

std::uint64_t surface_law_tag(int kind, std::size_t n_index, std::size_t delta_index) {
  return (static_cast<std::uint64_t>(kind) << 48) | (static_cast<std::uint64_t>(n_index) << 24) |
         static_cast<std::uint64_t>(delta_index);
}

RobustnessSurface robustness_surface(const ContaminationPath& path, const Estimator& estimator,
                                     std::span<const double> deltas, std::span<const int> ns,
                                     int replications, std::uint64_t master_seed, int threads) {
  if (deltas.empty() || ns.empty()) throw std::invalid_argument("surface grids must be nonempty");
  if (std::find(deltas.begin(), deltas.end(), 0.0) == deltas.end()) {
    throw std::invalid_argument("delta grid must contain 0");
  }

  RobustnessSurface s;
  s.deltas.assign(deltas.begin(), deltas.end());
  s.ns.assign(ns.begin(), ns.end());
  s.eps_hat.resize(static_cast<Eigen::Index>(deltas.size()), static_cast<Eigen::Index>(ns.size()));
  s.noise_floor.resize(static_cast<Eigen::Index>(ns.size()));
  s.replications = replications;
  s.master_seed = master_seed;
  s.path_label = path.describe();
  s.estimator_label = describe(estimator);

  const ModelSpec base = path.at(0.0);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const int n = ns[j];
    auto law_for = [&](const ModelSpec& m, int kind, std::size_t i) {
      return sampling_law(m, estimator, n, replications,
                          child_seed(master_seed, surface_law_tag(kind, j, i)), threads)
          .law;
    };
    const DiscreteMeasure reference = law_for(base, 1, 0);
    const DiscreteMeasure floor_a = law_for(base, 3, 0);
    const DiscreteMeasure floor_b = law_for(base, 4, 0);
    s.noise_floor(static_cast<Eigen::Index>(j)) = prohorov(floor_a, floor_b);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      const DiscreteMeasure law = law_for(path.at(deltas[i]), 2, i);
      s.eps_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = prohorov(law, reference);
    }
  }
  return s;
}

RobustnessVerdict classify(const RobustnessSurface& surface, double eps_target, int n0) {
  const double max_floor = surface.noise_floor.size() > 0 ? surface.noise_floor.maxCoeff() : 0.0;
  if (!(eps_target > max_floor)) {
    throw std::invalid_argument("eps_target must exceed the largest noise floor");
  }
  RobustnessVerdict v;
  v.eps_target = eps_target;
  v.n0 = n0;
  v.margin = eps_target - max_floor;

  const auto nd = static_cast<Eigen::Index>(surface.deltas.size());
  const auto nn = static_cast<Eigen::Index>(surface.ns.size());
  // A path sampled only at delta = 0 never leaves the base model; its row is
  // then the only witness there is.
  const bool degenerate = std::none_of(surface.deltas.begin(), surface.deltas.end(),
                                       [](double d) { return d > 0.0; });
  for (Eigen::Index i = 0; i < nd; ++i) {
    const double delta = surface.deltas[static_cast<std::size_t>(i)];
    if (!(delta > 0.0) && !degenerate) continue;

    bool all_small = true;
    for (Eigen::Index j = 0; j < nn; ++j) {
      if (surface.ns[static_cast<std::size_t>(j)] <= n0 && surface.eps_hat(i, j) > eps_target) all_small = false;
    }
    if (all_small && (!v.finite_sample_delta || delta > *v.finite_sample_delta)) {
      v.finite_sample_ok = true;
      v.finite_sample_delta = delta;
    }

    // Smallest grid n* from which the row stays below target.
    std::optional<int> n_star;
    for (Eigen::Index j = nn - 1; j >= 0; --j) {
      if (surface.eps_hat(i, j) > eps_target) break;
      n_star = surface.ns[static_cast<std::size_t>(j)];
    }
    if (n_star && (!v.asymptotic_delta || delta > *v.asymptotic_delta)) {
      v.asymptotic_ok = true;
      v.asymptotic_delta = delta;
      v.asymptotic_n_star = n_star;
    }
  }

  std::ostringstream os;
  os << "path-relative verdict over delta grid [";
  for (std::size_t i = 0; i < surface.deltas.size(); ++i) os << (i ? "," : "") << surface.deltas[i];
  os << "] and n grid [";
  for (std::size_t j = 0; j < surface.ns.size(); ++j) os << (j ? "," : "") << surface.ns[j];
  os << "]; no extrapolation beyond the grids";
  v.scope = os.str();
  return v;
}

std::optional<double> uniform_integrability_check(std::span<const DiscreteMeasure> measures,
                                                  const GaugeFunction& psi, double eps) {
  for (int k = 0; k <= 64; ++k) {
    const double a = std::ldexp(1.0, k);
    double worst = 0.0;
    for (const auto& mu : measures) worst = std::max(worst, gauge_tail(mu, psi, a));
    if (worst <= eps) return a;
  }
  return std::nullopt;
}

DiscreteMeasure adversarial_family(double p, double m) {
  if (!(p > 0.0)) throw std::invalid_argument("adversarial family needs p > 0");
  if (!(m >= 1.0)) throw std::invalid_argument("adversarial family needs m >= 1");
  return mix(dirac(0.0), dirac(std::pow(m, 1.0 / p)), 1.0 / m);
}

ContinuityReport continuity_probe(const FunctionalFn& functional,
                                  std::span<const DiscreteMeasure> sequence,
                                  const DiscreteMeasure& limit, const GaugeFunction& psi) {
  if (sequence.empty()) throw std::invalid_argument("continuity probe needs a nonempty sequence");
  ContinuityReport report;
  const double at_limit = functional(limit);
  for (const auto& mu : sequence) {
    report.distances.push_back(psi_distance(mu, limit, psi));
    report.gaps.push_back(std::abs(functional(mu) - at_limit));
  }

  const std::size_t m = sequence.size();
  const std::size_t tail = (m + 1) / 2;
  const std::size_t first = m - tail;
  bool decreasing = true;
  for (std::size_t k = first + 1; k < m; ++k) {
    if (!(report.distances[k] < report.distances[k - 1])) decreasing = false;
  }
  const double final_distance = report.distances.back();
  const double min_gap = *std::min_element(report.gaps.begin() + static_cast<std::ptrdiff_t>(first),
                                           report.gaps.end());
  report.discontinuity = decreasing && tail >= 2 && min_gap > 0.0 && min_gap >= 10.0 * final_distance;
  return report;
}

ContinuityReport continuity_probe(const Functional& functional,
                                  std::span<const DiscreteMeasure> sequence,
                                  const DiscreteMeasure& limit, const GaugeFunction& psi) {
  validate(functional);
  return continuity_probe([&](const DiscreteMeasure& mu) { return evaluate(functional, mu); },
                          sequence, limit, psi);
}

std::vector<double> default_ior_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 16; ++k) grid.push_back(0.25 * k);
  return grid;
}

IorResult ior_estimate(const FunctionalFn& functional, std::span<const double> grid,
                       const DiscreteMeasure& base, int depth_log2) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("ior grid must be ascending");
  if (depth_log2 < 1 || depth_log2 > 60) throw std::invalid_argument("probe depth must lie in [1, 60]");

  // One probe sequence per family exponent r > 0 in the grid.
  std::vector<double> exponents;
  std::vector<std::vector<DiscreteMeasure>> sequences;
  for (double r : grid) {
    if (!(r > 0.0)) continue;
    std::vector<DiscreteMeasure> seq;
    for (int k = 0; k <= depth_log2; ++k) {
      const double m = std::ldexp(1.0, k);
      seq.push_back(mix(base, dirac(std::pow(m, 1.0 / r)), 1.0 / m));
    }
    exponents.push_back(r);
    sequences.push_back(std::move(seq));
  }

  IorResult result;
  result.grid.assign(grid.begin(), grid.end());
  for (double q : grid) {
    const GaugeFunction psi(q);
    bool flagged = false;
    for (std::size_t f = 0; f < exponents.size() && !flagged; ++f) {
      if (exponents[f] <= q) continue;
      flagged = continuity_probe(functional, sequences[f], base, psi).discontinuity;
    }
    result.flagged.push_back(flagged);
  }

  for (std::size_t k = 0; k < result.grid.size(); ++k) {
    if (!result.flagged[k]) {
      result.p_star = result.grid[k];
      break;
    }
  }
  if (std::isinf(result.p_star)) {
    result.ior = 0.0;
  } else if (result.p_star == 0.0) {
    result.ior = std::numeric_limits<double>::infinity();
  } else {
    result.ior = 1.0 / result.p_star;
  }
  return result;
}

IorResult ior_estimate(const Functional& functional, std::span<const double> grid,
                       const DiscreteMeasure& base, int depth_log2) {
  validate(functional);
  return ior_estimate([&](const DiscreteMeasure& mu) { return evaluate(functional, mu); }, grid, base,
                      depth_log2);
}

CramerRaoReport cramer_rao_check(const ParametricFamily& family, double theta, int n,
                                 int replications, std::uint64_t master_seed, int threads) {
  family.require_in_range(theta);
  if (replications < 2) throw std::invalid_argument("cramer_rao_check needs R >= 2");
  const ModelSpec model = model::IIDParametric{family, theta};
  std::vector<Estimate> estimates(static_cast<std::size_t>(replications));
  parallel_for(estimates.size(), threads, [&](std::size_t r) {
    estimates[r] = mle(family, sample(model, n, SeedSpec{master_seed, r}));
  });

  CramerRaoReport report;
  std::vector<double> values;
  for (const Estimate& e : estimates) {
    values.push_back(e.value);
    report.boundary_hits += e.boundary ? 1 : 0;
  }
  const double R = static_cast<double>(replications);
  report.mean_estimate = compensated_sum(values) / R;
  std::vector<double> sq;
  std::vector<double> quart;
  for (double v : values) {
    const double d = v - report.mean_estimate;
    sq.push_back(d * d);
    quart.push_back(d * d * d * d);
  }
  const double m2 = compensated_sum(sq) / R;
  const double m4 = compensated_sum(quart) / R;
  report.variance = compensated_sum(sq) / (R - 1.0);
  report.bound = 1.0 / (static_cast<double>(n) * fisher_info(family, theta));
  report.ratio = report.variance / report.bound;
  report.ratio_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / R) / report.bound;
  return report;
}

ScoreVarianceReport score_variance_mc(const ParametricFamily& family, double theta, int draws,
                                      std::uint64_t master_seed) {
  family.require_in_range(theta);
  if (draws < 2) throw std::invalid_argument("score_variance_mc needs at least two draws");
  CounterRng rng(SeedSpec{master_seed, 0});
  std::vector<double> squares(static_cast<std::size_t>(draws));
  for (double& s : squares) {
    const double u = score(family, theta, draw(family, theta, rng));
    s = u * u;
  }
  const double R = static_cast<double>(draws);
  ScoreVarianceReport report;
  report.estimate = compensated_sum(squares) / R;
  std::vector<double> dev;
  for (double s : squares) dev.push_back((s - report.estimate) * (s - report.estimate));
  report.se = std::sqrt(compensated_sum(dev) / (R - 1.0) / R);
  report.exact = fisher_info(family, theta);
  return report;
}

}  // namespace qrob
