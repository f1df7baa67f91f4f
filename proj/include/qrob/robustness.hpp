#pragma once

#include "qrob/estimators.hpp"
#include "qrob/functionals.hpp"
#include "qrob/measures.hpp"
#include "qrob/metrics.hpp"
#include "qrob/models.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qrob {

/// Monte-Carlo proxy for the law of the estimator under a model: the
/// empirical measure of R replicated estimates.
struct SamplingLaw {
  DiscreteMeasure law;
  int n = 0;
  int replications = 0;
  std::uint64_t master_seed = 0;
  std::size_t boundary_hits = 0;
  std::size_t fallbacks = 0;
};

/// Estimator outputs are snapped to a 1e-12 grid before forming the law.
double round_output(double x);

/// Replication r draws its sample under SeedSpec{master_seed, r}, i.e. child
/// seed mix(master ^ r * gamma). Estimator failures surface as TaskError
/// carrying the replication index.
SamplingLaw sampling_law(const ModelSpec& model, const Estimator& estimator, int n, int replications,
                         std::uint64_t master_seed, int threads = 1);

namespace path {
/// theta(delta) = theta1 + direction * delta.
struct ParamShift {
  ParametricFamily family;
  double theta1 = 0.0;
  double direction = 1.0;
};
/// (1 - delta) base + delta * dirac(c(delta)), c(delta) = c or c / delta.
struct MixtureDirac {
  DiscreteMeasure base;
  double c = 1.0;
  bool inverse_in_delta = false;
};
/// a(delta) = a + direction * delta; with a contaminant, the innovation law
/// also becomes (1 - delta) mu + delta * contaminant.
struct ArShift {
  LinearProcessModel base;
  double direction = 1.0;
  std::optional<DiscreteMeasure> innovation_contaminant;
};
}  // namespace path

struct ContaminationPath {
  std::variant<path::ParamShift, path::MixtureDirac, path::ArShift> kind;

  /// Model at distance delta along the path; delta == 0 gives the base model.
  ModelSpec at(double delta) const;
  std::string describe() const;
};

/// eps_hat(delta, n) = prohorov(law at delta, law at 0) on a grid, with the
/// noise floor(n) = prohorov between two further independent delta = 0 laws.
/// Verdicts built on it are relative to the sampled path and grids.
struct RobustnessSurface {
  std::vector<double> deltas;
  std::vector<int> ns;
  Eigen::MatrixXd eps_hat;      ///< rows: deltas, cols: ns
  Eigen::VectorXd noise_floor;  ///< per n
  int replications = 0;
  std::uint64_t master_seed = 0;
  std::string path_label;
  std::string estimator_label;
};

/// Seed tags of the laws inside a surface; each law uses
/// child_seed(master, tag) as its own master.
std::uint64_t surface_law_tag(int kind, std::size_t n_index, std::size_t delta_index);

RobustnessSurface robustness_surface(const ContaminationPath& path, const Estimator& estimator,
                                     std::span<const double> deltas, std::span<const int> ns,
                                     int replications, std::uint64_t master_seed, int threads = 1);

struct RobustnessVerdict {
  bool finite_sample_ok = false;
  bool asymptotic_ok = false;
  double margin = 0.0;  ///< eps_target - max noise floor
  double eps_target = 0.0;
  int n0 = 0;
  std::optional<double> finite_sample_delta;  ///< largest grid delta witnessing it
  std::optional<double> asymptotic_delta;
  std::optional<int> asymptotic_n_star;
  std::string scope;  ///< grid ranges the verdict speaks about
};

/// finite_sample_ok: some grid delta > 0 has eps_hat <= target for all grid n <= n0.
/// asymptotic_ok: some grid delta > 0 and grid n* have eps_hat <= target for all grid n >= n*.
/// Throws when eps_target does not exceed the largest noise floor.
RobustnessVerdict classify(const RobustnessSurface& surface, double eps_target, int n0);

/// Smallest a in {2^0, ..., 2^64} with sup_mu gauge_tail(mu, psi, a) <= eps.
std::optional<double> uniform_integrability_check(std::span<const DiscreteMeasure> measures,
                                                  const GaugeFunction& psi, double eps);

/// mix(dirac(0), dirac(m^{1/p}), 1/m): vanishing mass, p-th moment pinned at 1.
DiscreteMeasure adversarial_family(double p, double m);

using FunctionalFn = std::function<double(const DiscreteMeasure&)>;

struct ContinuityReport {
  std::vector<double> distances;  ///< psi_distance(mu_m, limit)
  std::vector<double> gaps;       ///< |T(mu_m) - T(limit)|
  bool discontinuity = false;
};

/// Flags a discontinuity when, over the last ceil(M/2) elements, distances
/// decrease strictly while every gap stays >= 10x the final distance.
ContinuityReport continuity_probe(const FunctionalFn& functional,
                                  std::span<const DiscreteMeasure> sequence,
                                  const DiscreteMeasure& limit, const GaugeFunction& psi);
ContinuityReport continuity_probe(const Functional& functional,
                                  std::span<const DiscreteMeasure> sequence,
                                  const DiscreteMeasure& limit, const GaugeFunction& psi);

/// Default ior gauge grid {0, 0.25, ..., 4}.
std::vector<double> default_ior_grid();

inline constexpr int kDefaultProbeDepthLog2 = 48;

struct IorResult {
  double p_star = std::numeric_limits<double>::infinity();  ///< inf: every gauge flagged
  double ior = 0.0;                                          ///< 1 / p_star; inf when p_star == 0
  std::vector<double> grid;
  std::vector<bool> flagged;
};

/// Probe sequences mix(base, dirac(m^{1/r}), 1/m), m = 2^0..2^depth, for every
/// grid r > q converge psi_q-weakly to base; gauge q is flagged when one of
/// them exposes a discontinuity. p* is the smallest unflagged grid gauge.
IorResult ior_estimate(const FunctionalFn& functional, std::span<const double> grid,
                       const DiscreteMeasure& base, int depth_log2 = kDefaultProbeDepthLog2);
IorResult ior_estimate(const Functional& functional, std::span<const double> grid,
                       const DiscreteMeasure& base, int depth_log2 = kDefaultProbeDepthLog2);

struct CramerRaoReport {
  double mean_estimate = 0.0;
  double variance = 0.0;  ///< empirical variance of the MLE over replications
  double bound = 0.0;     ///< 1 / (n I_1(theta))
  double ratio = 0.0;     ///< variance / bound
  double ratio_se = 0.0;  ///< Monte-Carlo standard error of ratio
  std::size_t boundary_hits = 0;
};

CramerRaoReport cramer_rao_check(const ParametricFamily& family, double theta, int n,
                                 int replications, std::uint64_t master_seed, int threads = 1);

struct ScoreVarianceReport {
  double estimate = 0.0;  ///< mean of squared scores
  double se = 0.0;
  double exact = 0.0;     ///< fisher_info
};

/// Monte-Carlo estimate of E[(d/dtheta log L_1)^2] from `draws` observations.
ScoreVarianceReport score_variance_mc(const ParametricFamily& family, double theta, int draws,
                                      std::uint64_t master_seed);

}  // namespace qrob
