#include "qrob/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qrob {

using nlohmann::json;

namespace {

std::string ctx_key(std::string_view context, std::string_view key) {
  if (context.empty()) return std::string(key);
  return std::string(context) + "." + std::string(key);
}

template <typename Fn>
auto rethrow_as_config(std::string_view context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(context) + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string(context) + ": " + e.what());
  }
}

}  // namespace

const json& require(const json& j, std::string_view key, std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + ": expected an object");
  const auto it = j.find(std::string(key));
  if (it == j.end()) throw ConfigError("missing key " + ctx_key(context, key));
  return *it;
}

double number(const json& j, std::string_view key, std::string_view context) {
  const json& v = require(j, key, context);
  if (!v.is_number()) throw ConfigError(ctx_key(context, key) + " must be a number");
  return v.get<double>();
}

double number_or(const json& j, std::string_view key, double fallback, std::string_view context) {
  return j.contains(std::string(key)) ? number(j, key, context) : fallback;
}

std::int64_t integer(const json& j, std::string_view key, std::string_view context) {
  const json& v = require(j, key, context);
  if (!v.is_number_integer()) throw ConfigError(ctx_key(context, key) + " must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t integer_or(const json& j, std::string_view key, std::int64_t fallback, std::string_view context) {
  return j.contains(std::string(key)) ? integer(j, key, context) : fallback;
}

std::string text(const json& j, std::string_view key, std::string_view context) {
  const json& v = require(j, key, context);
  if (!v.is_string()) throw ConfigError(ctx_key(context, key) + " must be a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& j, std::string_view key, std::string_view context) {
  const json& v = require(j, key, context);
  if (!v.is_array()) throw ConfigError(ctx_key(context, key) + " must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(ctx_key(context, key) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> integer_array(const json& j, std::string_view key, std::string_view context) {
  const json& v = require(j, key, context);
  if (!v.is_array()) throw ConfigError(ctx_key(context, key) + " must be an array of integers");
  std::vector<int> out;
  for (const json& x : v) {
    if (!x.is_number_integer()) throw ConfigError(ctx_key(context, key) + " must be an array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string out(buf);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string measure_to_json(const DiscreteMeasure& mu) {
  std::ostringstream os;
  os << "{\"dim\": " << mu.dim() << ", \"atoms\": [";
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    os << (i ? ", " : "") << "[";
    for (Eigen::Index r = 0; r < mu.atoms().rows(); ++r) os << (r ? ", " : "") << format_real(mu.atoms()(r, i));
    os << "]";
  }
  os << "], \"masses\": [";
  for (Eigen::Index i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << format_real(mu.mass(i));
  os << "]}";
  return os.str();
}

void require_keys(const json& j, std::initializer_list<std::string_view> allowed,
                  std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key " + ctx_key(context, key));
  }
}

DiscreteMeasure uniform_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("uniform grid needs at least one point");
  if (!(hi >= lo)) throw std::invalid_argument("uniform grid needs hi >= lo");
  std::vector<std::pair<double, double>> pairs;
  const double w = 1.0 / points;
  for (int k = 0; k < points; ++k) {
    const double x = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
    pairs.emplace_back(x, w);
  }
  return DiscreteMeasure::from_pairs(std::move(pairs), true);
}

DiscreteMeasure measure_from_json(const json& j) {
  return rethrow_as_config("measure", [&] {
    if (j.is_object() && j.contains("uniform_grid")) {
      require_keys(j, {"uniform_grid"}, "measure");
      const json& g = j.at("uniform_grid");
      require_keys(g, {"lo", "hi", "points"}, "measure.uniform_grid");
      return uniform_grid(number(g, "lo", "uniform_grid"), number(g, "hi", "uniform_grid"),
                          static_cast<int>(integer(g, "points", "uniform_grid")));
    }
    require_keys(j, {"dim", "atoms", "masses"}, "measure");
    const auto dim = integer(j, "dim", "measure");
    const json& atoms = require(j, "atoms", "measure");
    const json& masses = require(j, "masses", "measure");
    if (!atoms.is_array() || !masses.is_array() || atoms.size() != masses.size()) {
      throw ConfigError("measure: atoms and masses must be arrays of equal length");
    }
    if (dim < 1) throw ConfigError("measure.dim must be >= 1");
    Eigen::MatrixXd a(dim, static_cast<Eigen::Index>(atoms.size()));
    Eigen::VectorXd w(static_cast<Eigen::Index>(masses.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const json& pt = atoms[i];
      if (!pt.is_array() || static_cast<std::int64_t>(pt.size()) != dim) {
        throw ConfigError("measure: every atom needs exactly dim coordinates");
      }
      for (std::int64_t r = 0; r < dim; ++r) a(r, static_cast<Eigen::Index>(i)) = pt[static_cast<std::size_t>(r)].get<double>();
      w(static_cast<Eigen::Index>(i)) = masses[i].get<double>();
    }
    return DiscreteMeasure(std::move(a), std::move(w));
  });
}

ParametricFamily family_from_json(const json& j) {
  return rethrow_as_config("family", [&] {
    require_keys(j, {"name", "sigma2"}, "family");
    const std::string name = text(j, "name", "family");
    if (name == "bernoulli") return ParametricFamily::bernoulli();
    if (name == "poisson") return ParametricFamily::poisson();
    if (name == "exponential") return ParametricFamily::exponential();
    if (name == "normal") return ParametricFamily::normal(number_or(j, "sigma2", 1.0, "family"));
    throw ConfigError("family.name: unknown family '" + name + "'");
  });
}

InnovationLaw innovation_from_json(const json& j) {
  return rethrow_as_config("innovation", [&] {
    require_keys(j, {"kind", "sigma2", "b", "measure", "contamination_weight", "contaminant"}, "innovation");
    InnovationLaw law;
    const std::string kind = text(j, "kind", "innovation");
    if (kind == "normal") {
      law.base = NormalInnovation{number_or(j, "sigma2", 1.0, "innovation")};
    } else if (kind == "uniform") {
      law.base = UniformInnovation{number(j, "b", "innovation")};
    } else if (kind == "discrete") {
      law.base = measure_from_json(require(j, "measure", "innovation"));
    } else {
      throw ConfigError("innovation.kind: unknown kind '" + kind + "'");
    }
    if (j.contains("contaminant")) {
      law.contaminant = measure_from_json(j.at("contaminant"));
      law.contamination_weight = number(j, "contamination_weight", "innovation");
    }
    law.validate();
    return law;
  });
}

ModelSpec model_from_json(const json& j) {
  return rethrow_as_config("model", [&]() -> ModelSpec {
    require_keys(j, {"kind", "params", "innovation"}, "model");
    const std::string kind = text(j, "kind", "model");
    const json& params = require(j, "params", "model");
    ModelSpec m = model::IIDNonparametric{dirac(0.0)};
    if (kind == "iid_parametric") {
      require_keys(params, {"family", "theta", "sigma2"}, "model.params");
      json fam = {{"name", text(params, "family", "model.params")}};
      if (params.contains("sigma2")) fam["sigma2"] = params.at("sigma2");
      m = model::IIDParametric{family_from_json(fam), number(params, "theta", "model.params")};
    } else if (kind == "iid_nonparametric") {
      require_keys(params, {"measure"}, "model.params");
      m = model::IIDNonparametric{measure_from_json(require(params, "measure", "model.params"))};
    } else if (kind == "linear_process") {
      require_keys(params, {"a"}, "model.params");
      m = model::LinearProcess{{number(params, "a", "model.params"),
                                innovation_from_json(require(j, "innovation", "model"))}};
    } else {
      throw ConfigError("model.kind: unknown kind '" + kind + "'");
    }
    if (kind != "linear_process" && j.contains("innovation")) {
      throw ConfigError("model.innovation only applies to linear_process");
    }
    validate(m);
    return m;
  });
}

Functional functional_from_json(const json& j) {
  return rethrow_as_config("functional", [&]() -> Functional {
    const std::string kind = text(j, "kind", "functional");
    Functional f = functional::Mean{};
    if (kind == "mean") {
      require_keys(j, {"kind"}, "functional");
    } else if (kind == "abs_moment") {
      require_keys(j, {"kind", "p"}, "functional");
      f = functional::AbsMoment{number(j, "p", "functional")};
    } else if (kind == "var") {
      require_keys(j, {"kind", "s"}, "functional");
      f = functional::VaR{number(j, "s", "functional")};
    } else if (kind == "avar") {
      require_keys(j, {"kind", "alpha"}, "functional");
      f = functional::AVaR{number(j, "alpha", "functional")};
    } else if (kind == "premium") {
      require_keys(j, {"kind", "alpha", "n", "atom_cap"}, "functional");
      f = functional::Premium{number(j, "alpha", "functional"),
                              static_cast<int>(integer(j, "n", "functional")),
                              j.contains("atom_cap") ? static_cast<std::size_t>(integer(j, "atom_cap", "functional"))
                                                     : kDefaultAtomCap};
    } else {
      throw ConfigError("functional.kind: unknown kind '" + kind + "'");
    }
    validate(f);
    return f;
  });
}

Estimator estimator_from_json(const json& j) {
  return rethrow_as_config("estimator", [&]() -> Estimator {
    const std::string kind = text(j, "kind", "estimator");
    Estimator e = estimator::YuleWalker{};
    if (kind == "plug_in") {
      require_keys(j, {"kind", "functional"}, "estimator");
      e = estimator::PlugIn{functional_from_json(require(j, "functional", "estimator"))};
    } else if (kind == "mle") {
      require_keys(j, {"kind", "family"}, "estimator");
      e = estimator::Mle{family_from_json(require(j, "family", "estimator"))};
    } else if (kind == "yule_walker") {
      require_keys(j, {"kind"}, "estimator");
    } else if (kind == "premium") {
      require_keys(j, {"kind", "alpha", "atom_cap", "mc_fallback_size"}, "estimator");
      estimator::Premium p;
      p.alpha = number(j, "alpha", "estimator");
      if (j.contains("atom_cap")) p.atom_cap = static_cast<std::size_t>(integer(j, "atom_cap", "estimator"));
      if (j.contains("mc_fallback_size")) {
        p.mc_fallback_size = static_cast<std::size_t>(integer(j, "mc_fallback_size", "estimator"));
      }
      e = p;
    } else {
      throw ConfigError("estimator.kind: unknown kind '" + kind + "'");
    }
    validate(e);
    return e;
  });
}

ContaminationPath path_from_json(const json& j) {
  return rethrow_as_config("path", [&]() -> ContaminationPath {
    const std::string kind = text(j, "kind", "path");
    if (kind == "param_shift") {
      require_keys(j, {"kind", "family", "theta1", "direction"}, "path");
      const ParametricFamily family = family_from_json(require(j, "family", "path"));
      const double theta1 = number(j, "theta1", "path");
      family.require_in_range(theta1);
      return {path::ParamShift{family, theta1, number_or(j, "direction", 1.0, "path")}};
    }
    if (kind == "mixture_dirac") {
      require_keys(j, {"kind", "base", "c", "inverse_in_delta"}, "path");
      bool inverse = false;
      if (j.contains("inverse_in_delta")) {
        if (!j.at("inverse_in_delta").is_boolean()) throw ConfigError("path.inverse_in_delta must be a boolean");
        inverse = j.at("inverse_in_delta").get<bool>();
      }
      return {path::MixtureDirac{measure_from_json(require(j, "base", "path")), number(j, "c", "path"), inverse}};
    }
    if (kind == "ar_shift") {
      require_keys(j, {"kind", "a", "innovation", "direction", "innovation_contaminant"}, "path");
      path::ArShift p{{number(j, "a", "path"), innovation_from_json(require(j, "innovation", "path"))},
                      number_or(j, "direction", 1.0, "path"),
                      std::nullopt};
      if (j.contains("innovation_contaminant")) p.innovation_contaminant = measure_from_json(j.at("innovation_contaminant"));
      p.base.validate();
      return {p};
    }
    throw ConfigError("path.kind: unknown kind '" + kind + "'");
  });
}

}  // namespace qrob
