#include "mcpgw/protocol/tool.hpp"

#include "mcpgw/error.hpp"

namespace mcpgw::protocol {

json to_json(const ToolDescriptor& tool) {
  return {{"name", tool.name}, {"description", tool.description},
          {"inputSchema", tool.input_schema}};
}

ToolDescriptor tool_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::ParseError, "tool entry must be an object");
  ToolDescriptor tool;
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) {
    tool.name = it->get<std::string>();
  }
  if (tool.name.empty()) throw Error(Errc::ParseError, "tool entry without a name");
  if (auto it = doc.find("description"); it != doc.end() && it->is_string()) {
    tool.description = it->get<std::string>();
  }
  if (auto it = doc.find("inputSchema"); it != doc.end() && it->is_object()) {
    tool.input_schema = *it;
  } else {
    tool.input_schema = {{"type", "object"}, {"properties", json::object()}};
  }
  return tool;
}

std::string ToolResult::text() const {
  std::string out;
  if (!content.is_array()) return content.dump();
  for (const auto& item : content) {
    if (!out.empty()) out += '\n';
    if (item.is_object() && item.value("type", "") == "text" && item.contains("text") &&
        item["text"].is_string()) {
      out += item["text"].get<std::string>();
    } else {
      out += item.dump();
    }
  }
  return out;
}

ToolResult ToolResult::from_text(std::string text) {
  return ToolResult{json::array({{{"type", "text"}, {"text", std::move(text)}}})};
}

}  // namespace mcpgw::protocol
