#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mcpgw::protocol {

using nlohmann::json;

struct ToolDescriptor {
  std::string name;
  std::string description;
  json input_schema = json::object();

  bool operator==(const ToolDescriptor&) const = default;
};

json to_json(const ToolDescriptor& tool);

/// Reads an MCP `tools/list` entry. Throws Error(ParseError) when the name is
/// missing or empty. A missing schema becomes the empty object schema.
ToolDescriptor tool_from_json(const json& doc);

/// Successful `tools/call` outcome: the MCP content array.
struct ToolResult {
  json content = json::array();

  /// Concatenation of all text content items, newline separated. Non-text
  /// items are rendered as their JSON.
  std::string text() const;

  static ToolResult from_text(std::string text);

  bool operator==(const ToolResult&) const = default;
};

}  // namespace mcpgw::protocol
