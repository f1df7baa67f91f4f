#include "qrob/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace qrob {

namespace {

void require_same_dim(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  if (mu1.dim() != mu2.dim()) throw std::invalid_argument("measures live in different dimensions");
}

double residual_total(const std::vector<double>& residual) {
  return compensated_sum(residual);
}

// Neighbourhoods {j : |x_i - y_j| <= beta} are contiguous in sorted order and
// both of their ends move right with i, so filling the leftmost open demand
// first is optimal.
NearFlow interval_flow(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double beta) {
  const auto n1 = mu1.size();
  const auto n2 = mu2.size();
  const auto& x = mu1.atoms();
  const auto& y = mu2.atoms();

  std::vector<double> supply(mu1.masses().data(), mu1.masses().data() + n1);
  std::vector<double> demand(mu2.masses().data(), mu2.masses().data() + n2);
  NearFlow flow;

  Eigen::Index left = 0;   // first j not excluded on the left for the current i
  Eigen::Index open = 0;   // first j with demand left (among j >= left)
  for (Eigen::Index i = 0; i < n1; ++i) {
    while (left < n2 && y(0, left) < x(0, i) && std::abs(x(0, i) - y(0, left)) > beta) ++left;
    open = std::max(open, left);
    Eigen::Index j = open;
    double& a = supply[static_cast<std::size_t>(i)];
    while (a > 0.0 && j < n2 && std::abs(x(0, i) - y(0, j)) <= beta) {
      double& b = demand[static_cast<std::size_t>(j)];
      if (b > 0.0) {
        const double t = std::min(a, b);
        flow.transfers.push_back({i, j, t});
        if (t == a) {
          a = 0.0;
          b -= t;
        } else {
          b = 0.0;
          a -= t;
        }
      }
      if (b == 0.0) {
        if (j == open) ++open;
        ++j;
      }
    }
  }
  flow.unmatched = residual_total(supply);
  return flow;
}

class Dinic {
 public:
  explicit Dinic(int nodes) : graph_(static_cast<std::size_t>(nodes)) {}

  int add_edge(int u, int v, double cap) {
    graph_[static_cast<std::size_t>(u)].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap});
    graph_[static_cast<std::size_t>(v)].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, 0.0});
    return static_cast<int>(edges_.size()) - 2;
  }

  void run(int s, int t) {
    while (bfs(s, t)) {
      iter_.assign(graph_.size(), 0);
      while (dfs(s, t, std::numeric_limits<double>::infinity()) > 0.0) {
      }
    }
  }

  double flow_on(int edge) const { return edges_[static_cast<std::size_t>(edge ^ 1)].cap; }
  double residual_on(int edge) const { return edges_[static_cast<std::size_t>(edge)].cap; }

 private:
  struct Edge {
    int to;
    double cap;
  };

  bool bfs(int s, int t) {
    level_.assign(graph_.size(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e : graph_[static_cast<std::size_t>(u)]) {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        if (edge.cap > 0.0 && level_[static_cast<std::size_t>(edge.to)] < 0) {
          level_[static_cast<std::size_t>(edge.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(edge.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    auto& it = iter_[static_cast<std::size_t>(u)];
    const auto& adj = graph_[static_cast<std::size_t>(u)];
    for (; it < adj.size(); ++it) {
      const int e = adj[it];
      Edge& edge = edges_[static_cast<std::size_t>(e)];
      if (edge.cap <= 0.0 ||
          level_[static_cast<std::size_t>(edge.to)] != level_[static_cast<std::size_t>(u)] + 1) {
        continue;
      }
      const double got = dfs(edge.to, t, std::min(pushed, edge.cap));
      if (got > 0.0) {
        edge.cap = (got == edge.cap) ? 0.0 : edge.cap - got;
        edges_[static_cast<std::size_t>(e ^ 1)].cap += got;
        return got;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<int>> graph_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

NearFlow dinic_flow(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double beta) {
  const int n1 = static_cast<int>(mu1.size());
  const int n2 = static_cast<int>(mu2.size());
  const int source = n1 + n2;
  const int sink = source + 1;
  Dinic g(n1 + n2 + 2);

  std::vector<int> source_edges(static_cast<std::size_t>(n1));
  for (int i = 0; i < n1; ++i) source_edges[static_cast<std::size_t>(i)] = g.add_edge(source, i, mu1.mass(i));
  for (int j = 0; j < n2; ++j) g.add_edge(n1 + j, sink, mu2.mass(j));

  struct Arc {
    int i, j, edge;
  };
  std::vector<Arc> arcs;
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if (atom_distance(mu1, i, mu2, j) <= beta) arcs.push_back({i, j, g.add_edge(i, n1 + j, inf)});
    }
  }
  g.run(source, sink);

  NearFlow flow;
  for (const Arc& arc : arcs) {
    const double f = g.flow_on(arc.edge);
    if (f > 0.0) flow.transfers.push_back({arc.i, arc.j, f});
  }
  std::vector<double> residual(static_cast<std::size_t>(n1));
  for (int i = 0; i < n1; ++i) residual[static_cast<std::size_t>(i)] = g.residual_on(source_edges[static_cast<std::size_t>(i)]);
  flow.unmatched = residual_total(residual);
  return flow;
}

// Unmatched mass as a function of the distance threshold. Right-continuous and
// non-increasing; jumps only at pairwise atom distances.
double unmatched(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double eps) {
  return max_near_flow(mu1, mu2, eps).unmatched;
}

}  // namespace

double atom_distance(const DiscreteMeasure& mu1, Eigen::Index i, const DiscreteMeasure& mu2,
                     Eigen::Index j) {
  if (mu1.dim() == 1) return std::abs(mu1.atoms()(0, i) - mu2.atoms()(0, j));
  return (mu1.atom(i) - mu2.atom(j)).norm();
}

NearFlow max_near_flow(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double beta,
                       FlowSolver solver) {
  require_same_dim(mu1, mu2);
  if (solver == FlowSolver::Auto) solver = mu1.dim() == 1 ? FlowSolver::Interval : FlowSolver::Dinic;
  if (solver == FlowSolver::Interval) {
    if (mu1.dim() != 1) throw std::invalid_argument("interval flow requires d == 1");
    return interval_flow(mu1, mu2, beta);
  }
  return dinic_flow(mu1, mu2, beta);
}

StrassenResult strassen_feasible(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                 double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("alpha and beta must be > 0");
  NearFlow flow = max_near_flow(mu1, mu2, beta);
  StrassenResult result;
  result.feasible = flow.unmatched <= alpha + kFeasibilitySlack;
  if (!result.feasible) return result;

  CouplingCertificate cert;
  cert.alpha = alpha;
  cert.beta = beta;
  cert.joint = Eigen::MatrixXd::Zero(mu1.size(), mu2.size());
  Eigen::VectorXd supply = mu1.masses();
  Eigen::VectorXd demand = mu2.masses();
  for (const Transfer& t : flow.transfers) {
    cert.joint(t.from, t.to) += t.mass;
    supply(t.from) -= t.mass;
    demand(t.to) -= t.mass;
  }
  // Leftover mass (at most alpha) is coupled arbitrarily: north-west corner.
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  while (i < supply.size() && j < demand.size()) {
    if (supply(i) <= 0.0) {
      ++i;
      continue;
    }
    if (demand(j) <= 0.0) {
      ++j;
      continue;
    }
    const double t = std::min(supply(i), demand(j));
    cert.joint(i, j) += t;
    supply(i) -= t;
    demand(j) -= t;
  }
  result.certificate = std::move(cert);
  return result;
}

double prohorov(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, double tol) {
  require_same_dim(mu1, mu2);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  auto feasible = [&](double eps) { return unmatched(mu1, mu2, eps) <= eps; };
  if (feasible(0.0)) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  const int iterations = std::max(40, static_cast<int>(std::ceil(std::log2(1.0 / tol))) + 1);
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }

  // Inside (lo, hi] the unmatched mass is a step function. On each step
  // starting at s the smallest admissible eps is max(s, unmatched(s)).
  std::vector<double> breaks;
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    for (Eigen::Index j = 0; j < mu2.size(); ++j) {
      const double d = atom_distance(mu1, i, mu2, j);
      if (d > lo && d <= hi) breaks.push_back(d);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double best = std::min(hi, unmatched(mu1, mu2, lo));
  for (double s : breaks) best = std::min(best, std::max(s, unmatched(mu1, mu2, s)));
  return best;
}

double prohorov_bruteforce(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  require_same_dim(mu1, mu2);
  const auto n1 = mu1.size();
  const auto n2 = mu2.size();
  if (n1 > 12) throw std::invalid_argument("prohorov_bruteforce supports at most 12 atoms");

  double worst = 0.0;
  std::vector<double> dist(static_cast<std::size_t>(n2));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n2));
  for (unsigned subset = 1; subset < (1u << n1); ++subset) {
    double mass_a = 0.0;
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < n1; ++i) {
      if (!(subset & (1u << i))) continue;
      mass_a += mu1.mass(i);
      for (Eigen::Index j = 0; j < n2; ++j) {
        dist[static_cast<std::size_t>(j)] =
            std::min(dist[static_cast<std::size_t>(j)], atom_distance(mu1, i, mu2, j));
      }
    }
    for (Eigen::Index j = 0; j < n2; ++j) order[static_cast<std::size_t>(j)] = j;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
    });

    // mu2[A^t] as t runs over 0 and the sorted distances.
    double inf_a = std::max(0.0, mass_a);
    double covered = 0.0;
    std::size_t k = 0;
    auto absorb = [&](double t) {
      while (k < order.size() && dist[static_cast<std::size_t>(order[k])] <= t) {
        covered += mu2.mass(order[k]);
        ++k;
      }
    };
    absorb(0.0);
    inf_a = std::min(inf_a, std::max(0.0, mass_a - covered));
    while (k < order.size()) {
      const double t = dist[static_cast<std::size_t>(order[k])];
      absorb(t);
      inf_a = std::min(inf_a, std::max(t, mass_a - covered));
    }
    worst = std::max(worst, inf_a);
  }
  return std::min(1.0, worst);
}

double wasserstein1(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  if (mu1.dim() != 1 || mu2.dim() != 1) throw std::invalid_argument("wasserstein1 requires d == 1");
  const auto& x = mu1.atoms();
  const auto& y = mu2.atoms();
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double f1 = 0.0;
  double f2 = 0.0;
  std::vector<double> pieces;
  double prev = std::min(x(0, 0), y(0, 0));
  while (i < mu1.size() || j < mu2.size()) {
    const double next = (j >= mu2.size() || (i < mu1.size() && x(0, i) <= y(0, j))) ? x(0, i) : y(0, j);
    pieces.push_back(std::abs(f1 - f2) * (next - prev));
    while (i < mu1.size() && x(0, i) == next) f1 += mu1.mass(i++);
    while (j < mu2.size() && y(0, j) == next) f2 += mu2.mass(j++);
    prev = next;
  }
  return compensated_sum(pieces);
}

double gauge_difference(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                        const GaugeFunction& psi) {
  require_same_dim(mu1, mu2);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(mu1.size() + mu2.size()));
  for (Eigen::Index i = 0; i < mu1.size(); ++i) terms.push_back(mu1.mass(i) * psi(mu1.atom(i)));
  for (Eigen::Index j = 0; j < mu2.size(); ++j) terms.push_back(-mu2.mass(j) * psi(mu2.atom(j)));
  return compensated_sum(terms);
}

double psi_distance(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                    const GaugeFunction& psi) {
  return prohorov(mu1, mu2) + std::abs(gauge_difference(mu1, mu2, psi));
}

}  // namespace qrob
