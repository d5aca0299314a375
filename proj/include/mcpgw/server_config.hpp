#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcpgw {

/// Closed set of server categories used to label the fleet.
enum class ServerCategory {
  Discovery,
  Visualization,
  FileAccess,
  Code,
  Entertainment,
  Finance,
  Location,
  Miscellaneous,
};

std::string_view to_string(ServerCategory c) noexcept;

/// Accepts the display labels ("File Access") only.
std::optional<ServerCategory> parse_server_category(std::string_view label) noexcept;

/// How to start one downstream MCP server.
struct ServerConfig {
  std::string server_name;
  std::string command;
  std::vector<std::string> args;
  std::map<std::string, std::string> env;
  std::optional<ServerCategory> category;
  std::string description;

  bool operator==(const ServerConfig&) const = default;
};

}  // namespace mcpgw
