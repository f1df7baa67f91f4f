#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace qrob::cli {

/// Output file name -> file contents, in name order.
using Outputs = std::map<std::string, std::string>;

inline constexpr const char* kCommands[] = {"metric",  "avar",       "premium-experiment", "surface",
                                            "ior",     "parametric", "yw-experiment"};

/// FNV-1a 64 over the compact dump of the config.
std::uint64_t config_hash(const nlohmann::json& config);

/// Runs one subcommand. Schema problems raise ConfigError before any
/// computation starts; measure references given as strings are resolved
/// against base_dir. Outputs do not depend on `threads`.
Outputs run_command(std::string_view command, const nlohmann::json& config,
                    const std::filesystem::path& base_dir = ".", int threads = 1);

}  // namespace qrob::cli
