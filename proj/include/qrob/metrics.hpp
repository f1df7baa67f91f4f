#pragma once

#include "qrob/measures.hpp"

#include <optional>
#include <vector>

namespace qrob {

/// Joint law on supp(mu1) x supp(mu2) witnessing the coupling form of
/// Strassen's condition: marginals mu1 and mu2, and at least 1 - alpha of the
/// mass on pairs at distance <= beta.
struct CouplingCertificate {
  Eigen::MatrixXd joint;
  double alpha = 0.0;
  double beta = 0.0;
};

struct StrassenResult {
  bool feasible = false;
  std::optional<CouplingCertificate> certificate;
};

enum class FlowSolver {
  Auto,      ///< interval greedy for d == 1, Dinic otherwise
  Interval,  ///< d == 1 only: neighbourhoods are contiguous in sorted order
  Dinic,
};

struct Transfer {
  Eigen::Index from;
  Eigen::Index to;
  double mass;
};

/// Maximum flow from mu1 to mu2 along edges joining atoms at distance <= beta,
/// node capacities equal to the atom masses.
struct NearFlow {
  double unmatched = 0.0;  ///< 1 - max flow, summed from residual supplies
  std::vector<Transfer> transfers;
};

NearFlow max_near_flow(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double beta,
                       FlowSolver solver = FlowSolver::Auto);

/// Distance between atom i of mu1 and atom j of mu2; every metric routine
/// goes through this so thresholds compare identically everywhere.
double atom_distance(const DiscreteMeasure& mu1, Eigen::Index i, const DiscreteMeasure& mu2,
                     Eigen::Index j);

inline constexpr double kFeasibilitySlack = 1e-12;

/// Decides whether some coupling puts mass >= 1 - alpha within distance beta.
StrassenResult strassen_feasible(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                 double alpha, double beta);

/// Prohorov distance. Bisection on eps over [0, 1] with the flow criterion,
/// followed by an exact snap onto the breakpoint structure inside the final
/// bracket, so the returned value is the infimum itself up to floating point.
double prohorov(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double tol = 1e-9);

/// Direct evaluation of the defining infimum by enumerating subsets of
/// supp(mu1). Exponential; limited to 12 atoms in mu1.
double prohorov_bruteforce(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// L1-Wasserstein distance on the line, integral of |F1 - F2|.
double wasserstein1(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// Signed difference  int psi dmu1 - int psi dmu2, summed jointly to limit
/// cancellation when both integrals are close to one.
double gauge_difference(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                        const GaugeFunction& psi);

/// d_psi = prohorov + |int psi dmu1 - int psi dmu2|.
double psi_distance(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                    const GaugeFunction& psi);

}  // namespace qrob
