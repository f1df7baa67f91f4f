#pragma once

#include "qrob/estimators.hpp"
#include "qrob/functionals.hpp"
#include "qrob/measures.hpp"
#include "qrob/models.hpp"
#include "qrob/robustness.hpp"

#include <json.hpp>

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>
#include <cstdint>

namespace qrob {

/// Schema violation in a JSON document (unknown key, wrong type, bad value).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Typed accessors; every failure is a ConfigError naming context.key.
const nlohmann::json& require(const nlohmann::json& j, std::string_view key, std::string_view context);
double number(const nlohmann::json& j, std::string_view key, std::string_view context);
double number_or(const nlohmann::json& j, std::string_view key, double fallback, std::string_view context);
std::int64_t integer(const nlohmann::json& j, std::string_view key, std::string_view context);
std::int64_t integer_or(const nlohmann::json& j, std::string_view key, std::int64_t fallback,
                        std::string_view context);
std::string text(const nlohmann::json& j, std::string_view key, std::string_view context);
std::vector<double> number_array(const nlohmann::json& j, std::string_view key, std::string_view context);
std::vector<int> integer_array(const nlohmann::json& j, std::string_view key, std::string_view context);

/// 17 significant digits, integral values keep a ".0"; "inf"/"-inf"/"nan".
std::string format_real(double x);

/// {"dim": d, "atoms": [[...], ...], "masses": [...]}, numbers at 17 digits.
std::string measure_to_json(const DiscreteMeasure& mu);

/// Accepts the serialized form above, or {"uniform_grid": {"lo", "hi", "points"}}
/// for an equally weighted grid discretization of a uniform law.
DiscreteMeasure measure_from_json(const nlohmann::json& j);

/// Rejects keys outside `allowed`.
void require_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                  std::string_view context);

ParametricFamily family_from_json(const nlohmann::json& j);
InnovationLaw innovation_from_json(const nlohmann::json& j);
/// {"kind": "iid_parametric" | "iid_nonparametric" | "linear_process", "params": {...}, "innovation": {...}}
ModelSpec model_from_json(const nlohmann::json& j);
Functional functional_from_json(const nlohmann::json& j);
Estimator estimator_from_json(const nlohmann::json& j);
ContaminationPath path_from_json(const nlohmann::json& j);

/// Equally weighted atoms lo + k (hi - lo) / (points - 1), k = 0..points-1.
DiscreteMeasure uniform_grid(double lo, double hi, int points);

}  // namespace qrob
