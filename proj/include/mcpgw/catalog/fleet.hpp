#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/server_config.hpp"

namespace mcpgw::catalog {

inline constexpr int kFleetFormatVersion = 1;

/// Values for `${name}` placeholders in command, args and env values.
/// `config_dir` and `exe_dir` are always provided; other names fall back to
/// the process environment. An unresolvable placeholder is a ConfigError.
using Substitutions = std::map<std::string, std::string, std::less<>>;

/// Parses and validates a fleet document. Diagnostics name the field path,
/// e.g. "servers[2].category".
std::vector<ServerConfig> parse_fleet(const nlohmann::json& doc, const Substitutions& vars);

/// Reads a fleet file. Syntax errors report line and column.
std::vector<ServerConfig> load_fleet(const std::filesystem::path& path);

/// Directory holding the running executable.
std::filesystem::path executable_dir();

}  // namespace mcpgw::catalog
