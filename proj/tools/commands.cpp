#include "commands.hpp"

#include "qrob/estimators.hpp"
#include "qrob/functionals.hpp"
#include "qrob/metrics.hpp"
#include "qrob/models.hpp"
#include "qrob/robustness.hpp"
#include "qrob/serialization.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace qrob::cli {

using nlohmann::json;

namespace {

// Keys every command accepts besides its own.
constexpr std::string_view kCommonKeys[] = {"command", "master_seed"};

void check_keys(const json& config, std::initializer_list<std::string_view> own) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    const bool common = std::find(std::begin(kCommonKeys), std::end(kCommonKeys), key) != std::end(kCommonKeys);
    const bool listed = std::find(own.begin(), own.end(), key) != own.end();
    if (!common && !listed) throw ConfigError("unknown key " + key);
  }
}

std::uint64_t seed_of(const json& config) {
  if (!config.contains("master_seed")) return 0;
  const json& v = config.at("master_seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError("master_seed must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string hash_text(const json& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

std::string csv_header(const json& config, std::uint64_t seed) {
  return "# config_hash=" + hash_text(config) + " master_seed=" + std::to_string(seed) + "\n";
}

std::string real_or_inf(double x) {
  return std::isfinite(x) ? format_real(x) : json(format_real(x)).dump();
}

// Flat JSON object with fields in insertion order and 17-digit reals.
class JsonOut {
 public:
  JsonOut(const json& config, std::uint64_t seed) {
    raw("config_hash", json(hash_text(config)).dump());
    raw("master_seed", std::to_string(seed));
  }
  JsonOut& raw(std::string key, std::string value) {
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  JsonOut& real(std::string key, double x) { return raw(std::move(key), real_or_inf(x)); }
  JsonOut& real(std::string key, std::optional<double> x) {
    return raw(std::move(key), x ? real_or_inf(*x) : "null");
  }
  JsonOut& integer(std::string key, long long x) { return raw(std::move(key), std::to_string(x)); }
  JsonOut& flag(std::string key, bool b) { return raw(std::move(key), b ? "true" : "false"); }
  JsonOut& text(std::string key, const std::string& s) { return raw(std::move(key), json(s).dump()); }
  JsonOut& reals(std::string key, const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + real_or_inf(xs[i]);
    return raw(std::move(key), out + "]");
  }
  std::string str() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      out += "  " + json(fields_[i].first).dump() + ": " + fields_[i].second;
      out += i + 1 < fields_.size() ? ",\n" : "\n";
    }
    return out + "}\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

DiscreteMeasure load_measure(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_string()) return measure_from_json(j);
  const std::filesystem::path file = base_dir / j.get<std::string>();
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open measure file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("measure file " + file.string() + ": " + e.what());
  }
  return measure_from_json(doc);
}

int positive_int(const json& config, std::string_view key, std::int64_t fallback, int minimum = 1) {
  const auto v = integer_or(config, key, fallback, "");
  if (v < minimum || v > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string(key) + " must be an integer >= " + std::to_string(minimum));
  }
  return static_cast<int>(v);
}

std::vector<double> delta_grid(const json& config, std::string_view key) {
  std::vector<double> deltas = number_array(config, key, "");
  if (deltas.empty()) throw ConfigError(std::string(key) + " must be nonempty");
  for (double d : deltas) {
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError(std::string(key) + " entries must lie in [0, 1]");
  }
  if (std::find(deltas.begin(), deltas.end(), 0.0) == deltas.end()) {
    throw ConfigError(std::string(key) + " must contain 0");
  }
  return deltas;
}

std::vector<int> n_grid(const json& config, std::string_view key) {
  std::vector<int> ns = integer_array(config, key, "");
  if (ns.empty()) throw ConfigError(std::string(key) + " must be nonempty");
  for (int n : ns) {
    if (n < 1) throw ConfigError(std::string(key) + " entries must be >= 1");
  }
  return ns;
}

// The header carries the config seed; the master_seed column is the seed the
// surface itself was run under.
std::string surface_csv(const RobustnessSurface& s, const json& config, std::uint64_t seed) {
  std::string out = csv_header(config, seed);
  out += "delta,n,eps_hat,noise_floor,R,master_seed\n";
  for (std::size_t i = 0; i < s.deltas.size(); ++i) {
    for (std::size_t j = 0; j < s.ns.size(); ++j) {
      out += format_real(s.deltas[i]) + "," + std::to_string(s.ns[j]) + "," +
             format_real(s.eps_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + "," +
             format_real(s.noise_floor(static_cast<Eigen::Index>(j))) + "," + std::to_string(s.replications) +
             "," + std::to_string(s.master_seed) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------- metric

Outputs cmd_metric(const json& config, const std::filesystem::path& base_dir) {
  check_keys(config, {"mu1", "mu2", "psi_p"});
  const std::uint64_t seed = seed_of(config);
  const DiscreteMeasure mu1 = load_measure(require(config, "mu1", ""), base_dir);
  const DiscreteMeasure mu2 = load_measure(require(config, "mu2", ""), base_dir);
  if (mu1.dim() != mu2.dim()) throw ConfigError("mu1 and mu2 have different dimensions");
  const std::vector<double> ps = config.contains("psi_p") ? number_array(config, "psi_p", "") : std::vector<double>{0.0};
  for (double p : ps) {
    if (!(p >= 0.0)) throw ConfigError("psi_p entries must be >= 0");
  }

  const double rho = prohorov(mu1, mu2);
  const std::string w1 = mu1.dim() == 1 ? format_real(wasserstein1(mu1, mu2)) : "";
  std::string out = csv_header(config, seed) + "psi_p,prohorov,wasserstein1,psi_distance\n";
  for (double p : ps) {
    const double gap = std::abs(gauge_difference(mu1, mu2, GaugeFunction(p)));
    out += format_real(p) + "," + format_real(rho) + "," + w1 + "," + format_real(rho + gap) + "\n";
  }
  return {{"metric.csv", out}};
}

// ---------------------------------------------------------------- avar

Outputs cmd_avar(const json& config, const std::filesystem::path& base_dir) {
  check_keys(config, {"measure", "alphas"});
  const std::uint64_t seed = seed_of(config);
  const DiscreteMeasure mu = load_measure(require(config, "measure", ""), base_dir);
  if (mu.dim() != 1) throw ConfigError("avar needs a one-dimensional measure");
  const std::vector<double> alphas = number_array(config, "alphas", "");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alphas entries must lie in (0, 1)");
  }

  std::string out = csv_header(config, seed) + "alpha,var,avar_quantile_average,avar_distribution_form\n";
  for (double a : alphas) {
    out += format_real(a) + "," + format_real(var_level(mu, a)) + "," +
           format_real(avar(mu, a, AvarMethod::QuantileAverage)) + "," +
           format_real(avar(mu, a, AvarMethod::DistributionForm)) + "\n";
  }
  return {{"avar.csv", out}};
}

// ---------------------------------------------------------------- surface

void verdict_fields(JsonOut& out, const RobustnessSurface& s, const RobustnessVerdict& v, double multiple) {
  out.text("path", s.path_label)
      .text("estimator", s.estimator_label)
      .real("eps_target", v.eps_target)
      .real("noise_floor_multiple", multiple)
      .integer("n0", v.n0)
      .real("noise_floor_max", s.noise_floor.maxCoeff())
      .real("margin", v.margin)
      .flag("finite_sample_ok", v.finite_sample_ok)
      .real("finite_sample_delta", v.finite_sample_delta)
      .flag("asymptotic_ok", v.asymptotic_ok)
      .real("asymptotic_delta", v.asymptotic_delta)
      .raw("asymptotic_n_star", v.asymptotic_n_star ? std::to_string(*v.asymptotic_n_star) : "null")
      .integer("replications", s.replications)
      .text("scope", v.scope);
}

Outputs cmd_surface(const json& config, int threads) {
  check_keys(config, {"path", "estimator", "deltas", "ns", "replications", "eps_target", "n0", "noise_floor_multiple"});
  const std::uint64_t seed = seed_of(config);
  const ContaminationPath path = path_from_json(require(config, "path", ""));
  const Estimator est = estimator_from_json(require(config, "estimator", ""));
  const std::vector<double> deltas = delta_grid(config, "deltas");
  const std::vector<int> ns = n_grid(config, "ns");
  const int R = positive_int(config, "replications", 1000, 2);
  const int n0 = positive_int(config, "n0", *std::max_element(ns.begin(), ns.end()));
  const double multiple = number_or(config, "noise_floor_multiple", 3.0, "");
  if (!(multiple > 1.0)) throw ConfigError("noise_floor_multiple must exceed 1");
  std::optional<double> eps_target;
  if (config.contains("eps_target")) {
    eps_target = number(config, "eps_target", "");
    if (!(*eps_target > 0.0 && *eps_target <= 1.0)) throw ConfigError("eps_target must lie in (0, 1]");
  }
  try {
    for (double d : deltas) validate(path.at(d));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("path: ") + e.what());
  }

  const RobustnessSurface s = robustness_surface(path, est, deltas, ns, R, seed, threads);
  const double floor_max = s.noise_floor.maxCoeff();
  // A zero floor (degenerate laws) falls back to the mass of one replication.
  const double target = eps_target.value_or(std::min(1.0, std::max(multiple * floor_max, 1.0 / R)));
  const RobustnessVerdict v = classify(s, target, n0);

  JsonOut verdict(config, seed);
  verdict_fields(verdict, s, v, multiple);
  return {{"surface.csv", surface_csv(s, config, seed)}, {"verdict.json", verdict.str()}};
}

// ---------------------------------------------------------------- premium-experiment

Outputs cmd_premium_experiment(const json& config, int threads) {
  check_keys(config, {"base", "K", "c_bounded", "alpha", "ns", "deltas_unbounded", "deltas_bounded",
                      "replications", "atom_cap", "mc_fallback_size"});
  const std::uint64_t seed = seed_of(config);
  const DiscreteMeasure base = config.contains("base") ? measure_from_json(config.at("base")) : uniform_grid(0.0, 1.0, 65);
  if (base.dim() != 1) throw ConfigError("base must be one-dimensional");
  const double K = number_or(config, "K", 5.0, "");
  const double c = number_or(config, "c_bounded", 2.0, "");
  if (!(K > 0.0) || !std::isfinite(c)) throw ConfigError("K must be > 0 and c_bounded finite");
  estimator::Premium premium;
  premium.alpha = number_or(config, "alpha", 0.5, "");
  premium.atom_cap = static_cast<std::size_t>(positive_int(config, "atom_cap", static_cast<std::int64_t>(kDefaultAtomCap)));
  premium.mc_fallback_size = static_cast<std::size_t>(
      positive_int(config, "mc_fallback_size", static_cast<std::int64_t>(kDefaultMcFallbackSize)));
  const Estimator est = premium;
  try {
    validate(est);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::vector<int> ns = n_grid(config, "ns");
  const std::vector<double> du = delta_grid(config, "deltas_unbounded");
  const std::vector<double> db = delta_grid(config, "deltas_bounded");
  const int R = positive_int(config, "replications", 2000, 2);

  const ContaminationPath unbounded{path::MixtureDirac{base, K, true}};
  const ContaminationPath bounded{path::MixtureDirac{base, c, false}};
  const RobustnessSurface su = robustness_surface(unbounded, est, du, ns, R, child_seed(seed, 1), threads);
  const RobustnessSurface sb = robustness_surface(bounded, est, db, ns, R, child_seed(seed, 2), threads);

  // Unbounded path: smallest eps_hat / floor over delta > 0. Bounded path:
  // largest eps_hat / floor at the smallest delta > 0.
  double unbounded_min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < du.size(); ++i) {
    if (!(du[i] > 0.0)) continue;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      unbounded_min_ratio = std::min(unbounded_min_ratio, su.eps_hat(static_cast<Eigen::Index>(i), jj) / su.noise_floor(jj));
    }
  }
  double smallest = std::numeric_limits<double>::infinity();
  std::size_t smallest_index = 0;
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (db[i] > 0.0 && db[i] < smallest) {
      smallest = db[i];
      smallest_index = i;
    }
  }
  double bounded_ratio = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(smallest)) {
    bounded_ratio = 0.0;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      bounded_ratio = std::max(bounded_ratio, sb.eps_hat(static_cast<Eigen::Index>(smallest_index), jj) / sb.noise_floor(jj));
    }
  }
  JsonOut summary(config, seed);
  summary.text("unbounded_path", su.path_label)
      .text("bounded_path", sb.path_label)
      .text("estimator", su.estimator_label)
      .integer("replications", R)
      .real("unbounded_min_ratio", unbounded_min_ratio)
      .real("bounded_smallest_delta", smallest)
      .real("bounded_ratio_at_smallest_delta", bounded_ratio)
      .reals("unbounded_noise_floor", std::vector<double>(su.noise_floor.begin(), su.noise_floor.end()))
      .reals("bounded_noise_floor", std::vector<double>(sb.noise_floor.begin(), sb.noise_floor.end()));
  return {{"premium_unbounded.csv", surface_csv(su, config, seed)},
          {"premium_bounded.csv", surface_csv(sb, config, seed)},
          {"premium_signature.json", summary.str()}};
}

// ---------------------------------------------------------------- ior

Outputs cmd_ior(const json& config, const std::filesystem::path& base_dir) {
  check_keys(config, {"functional", "grid", "base", "depth_log2"});
  const std::uint64_t seed = seed_of(config);
  const Functional f = functional_from_json(require(config, "functional", ""));
  const std::vector<double> grid = config.contains("grid") ? number_array(config, "grid", "") : default_ior_grid();
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end() || grid.front() < 0.0) {
    throw ConfigError("grid must be strictly increasing and >= 0");
  }
  const DiscreteMeasure base = config.contains("base") ? load_measure(config.at("base"), base_dir) : dirac(0.0);
  if (base.dim() != 1) throw ConfigError("base must be one-dimensional");
  const int depth = positive_int(config, "depth_log2", kDefaultProbeDepthLog2);
  if (depth > 60) throw ConfigError("depth_log2 must be <= 60");

  const IorResult r = ior_estimate(f, grid, base, depth);
  std::vector<double> flagged;
  for (bool b : r.flagged) flagged.push_back(b ? 1.0 : 0.0);
  JsonOut out(config, seed);
  out.real("p_star", r.p_star).real("ior", r.ior).text("functional", describe(f)).reals("grid", r.grid);
  std::string flags = "[";
  for (std::size_t i = 0; i < r.flagged.size(); ++i) flags += std::string(i ? ", " : "") + (r.flagged[i] ? "true" : "false");
  out.raw("flagged", flags + "]").integer("depth_log2", depth);
  return {{"ior.json", out.str()}};
}

// ---------------------------------------------------------------- parametric

Outputs cmd_parametric(const json& config, int threads) {
  check_keys(config, {"checks", "l1_sweeps"});
  const std::uint64_t seed = seed_of(config);

  struct Check {
    ParametricFamily family;
    double theta;
    int n;
    int R;
    int score_draws;
  };
  struct Sweep {
    ParametricFamily family;
    double theta;
    std::vector<double> deltas;
  };
  std::vector<Check> checks;
  std::vector<Sweep> sweeps;
  if (config.contains("checks")) {
    const json& arr = config.at("checks");
    if (!arr.is_array()) throw ConfigError("checks must be an array");
    for (const json& c : arr) {
      require_keys(c, {"family", "theta", "n", "replications", "score_draws"}, "checks[]");
      Check ck{family_from_json(require(c, "family", "checks[]")), number(c, "theta", "checks[]"),
               positive_int(c, "n", 50), positive_int(c, "replications", 100000, 2),
               positive_int(c, "score_draws", 100000, 2)};
      if (!ck.family.in_range(ck.theta)) throw ConfigError("checks[].theta outside the parameter set");
      checks.push_back(ck);
    }
  }
  if (config.contains("l1_sweeps")) {
    const json& arr = config.at("l1_sweeps");
    if (!arr.is_array()) throw ConfigError("l1_sweeps must be an array");
    for (const json& s : arr) {
      require_keys(s, {"family", "theta", "deltas"}, "l1_sweeps[]");
      Sweep sw{family_from_json(require(s, "family", "l1_sweeps[]")), number(s, "theta", "l1_sweeps[]"),
               number_array(s, "deltas", "l1_sweeps[]")};
      for (double d : sw.deltas) {
        if (!sw.family.in_range(sw.theta) || !sw.family.in_range(sw.theta + d)) {
          throw ConfigError("l1_sweeps[]: theta and theta + delta must lie in the parameter set");
        }
      }
      sweeps.push_back(std::move(sw));
    }
  }

  Outputs out;
  std::string cr = csv_header(config, seed) +
                   "family,theta,n,R,mean_estimate,variance,bound,ratio,ratio_se,fisher_info,"
                   "score_variance_mc,score_variance_se,boundary_hits\n";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const Check& c = checks[i];
    const CramerRaoReport rep = cramer_rao_check(c.family, c.theta, c.n, c.R, child_seed(seed, 2 * i), threads);
    const ScoreVarianceReport sv = score_variance_mc(c.family, c.theta, c.score_draws, child_seed(seed, 2 * i + 1));
    cr += c.family.name() + "," + format_real(c.theta) + "," + std::to_string(c.n) + "," + std::to_string(c.R) + "," +
          format_real(rep.mean_estimate) + "," + format_real(rep.variance) + "," + format_real(rep.bound) + "," +
          format_real(rep.ratio) + "," + format_real(rep.ratio_se) + "," + format_real(sv.exact) + "," +
          format_real(sv.estimate) + "," + format_real(sv.se) + "," + std::to_string(rep.boundary_hits) + "\n";
  }
  out["parametric_cr.csv"] = cr;

  std::string l1 = csv_header(config, seed) + "family,theta1,delta,l1_distance\n";
  for (const Sweep& s : sweeps) {
    for (double d : s.deltas) {
      l1 += s.family.name() + "," + format_real(s.theta) + "," + format_real(d) + "," +
            format_real(l1_density_distance(s.family, s.theta, s.theta + d)) + "\n";
    }
  }
  out["parametric_l1.csv"] = l1;
  return out;
}

// ---------------------------------------------------------------- yw-experiment

Outputs cmd_yw_experiment(const json& config, int threads) {
  check_keys(config, {"a", "innovation", "ns", "deltas", "replications", "mean_n", "mean_replications"});
  const std::uint64_t seed = seed_of(config);
  const double a = number_or(config, "a", 0.5, "");
  const InnovationLaw innovation =
      config.contains("innovation") ? innovation_from_json(config.at("innovation")) : InnovationLaw{};
  const std::vector<int> ns = n_grid(config, "ns");
  const std::vector<double> deltas = delta_grid(config, "deltas");
  const int R = positive_int(config, "replications", 500, 2);
  const int mean_n = positive_int(config, "mean_n", *std::max_element(ns.begin(), ns.end()), 2);
  const int mean_R = positive_int(config, "mean_replications", R, 2);
  const ContaminationPath path{path::ArShift{{a, innovation}, 1.0, std::nullopt}};
  try {
    for (double d : deltas) validate(path.at(d));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("path: ") + e.what());
  }

  const Estimator est = estimator::YuleWalker{};
  const RobustnessSurface s = robustness_surface(path, est, deltas, ns, R, child_seed(seed, 1), threads);
  const SamplingLaw at_base = sampling_law(path.at(0.0), est, mean_n, mean_R, child_seed(seed, 2), threads);
  const double mean_estimate = mean(at_base.law);

  // Monotonicity in delta up to one noise floor, over every ordered pair.
  double worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[i] < deltas[k])) continue;
        const double excess = s.eps_hat(static_cast<Eigen::Index>(i), jj) - s.eps_hat(static_cast<Eigen::Index>(k), jj) -
                              s.noise_floor(jj);
        worst_violation = std::max(worst_violation, excess);
      }
    }
  }

  JsonOut summary(config, seed);
  summary.text("path", s.path_label)
      .real("a", a)
      .integer("mean_n", mean_n)
      .integer("mean_replications", mean_R)
      .real("mean_estimate", mean_estimate)
      .real("mean_abs_error", std::abs(mean_estimate - a))
      .real("monotone_worst_excess", worst_violation)
      .reals("noise_floor", std::vector<double>(s.noise_floor.begin(), s.noise_floor.end()));
  return {{"yw_surface.csv", surface_csv(s, config, seed)}, {"yw_summary.json", summary.str()}};
}

}  // namespace

std::uint64_t config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Outputs run_command(std::string_view command, const json& config, const std::filesystem::path& base_dir,
                    int threads) {
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (config.is_object() && config.contains("command")) {
    const json& c = config.at("command");
    if (!c.is_string() || c.get<std::string>() != command) {
      throw ConfigError("config command does not match subcommand " + std::string(command));
    }
  }
  if (command == "metric") return cmd_metric(config, base_dir);
  if (command == "avar") return cmd_avar(config, base_dir);
  if (command == "premium-experiment") return cmd_premium_experiment(config, threads);
  if (command == "surface") return cmd_surface(config, threads);
  if (command == "ior") return cmd_ior(config, base_dir);
  if (command == "parametric") return cmd_parametric(config, threads);
  if (command == "yw-experiment") return cmd_yw_experiment(config, threads);
  throw ConfigError("unknown command " + std::string(command));
}

}  // namespace qrob::cli
