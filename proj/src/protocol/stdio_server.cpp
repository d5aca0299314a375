#include "mcpgw/protocol/stdio_server.hpp"

#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/protocol/framer.hpp"
#include "mcpgw/protocol/server_handle.hpp"

namespace mcpgw::protocol {

CallOutcome CallOutcome::unknown(std::string_view tool) {
  return {Kind::unknown_tool, {}, fmt::format("Unknown tool: {}", tool)};
}

std::optional<RpcMessage> StdioServer::handle(const RpcMessage& msg) {
  if (msg.kind != MessageKind::request) return std::nullopt;
  const RequestId& id = *msg.id;

  if (msg.method == "initialize") {
    return RpcMessage::response(
        id, {{"protocolVersion", kProtocolVersion},
             {"capabilities", {{"tools", {{"listChanged", false}}}}},
             {"serverInfo", {{"name", identity_.name}, {"version", identity_.version}}}});
  }
  if (msg.method == "ping") return RpcMessage::response(id, json::object());
  if (msg.method == "tools/list") {
    json tools = json::array();
    for (const auto& t : provider_.list_tools()) tools.push_back(to_json(t));
    return RpcMessage::response(id, {{"tools", std::move(tools)}});
  }
  if (msg.method == "tools/call") {
    const json& params = msg.payload;
    if (!params.is_object() || !params.contains("name") || !params["name"].is_string()) {
      return RpcMessage::error(id, rpc_error::kInvalidParams, "tools/call requires a string name");
    }
    const json arguments = params.value("arguments", json::object());
    CallOutcome outcome = provider_.call_tool(params["name"].get<std::string>(), arguments);
    switch (outcome.kind) {
      case CallOutcome::Kind::ok:
        return RpcMessage::response(id, {{"content", outcome.result.content}, {"isError", false}});
      case CallOutcome::Kind::tool_error:
        return RpcMessage::response(
            id, {{"content", ToolResult::from_text(outcome.message).content}, {"isError", true}});
      case CallOutcome::Kind::unknown_tool:
        return RpcMessage::error(id, rpc_error::kInvalidParams, outcome.message);
      case CallOutcome::Kind::no_reply:
        return std::nullopt;
    }
  }
  return RpcMessage::error(id, rpc_error::kMethodNotFound,
                           fmt::format("Method not found: {}", msg.method));
}

void StdioServer::run(std::istream& in, std::ostream& out) {
  if (!out.good()) throw Error(Errc::BindError, "output stream is not writable");
  LineFramer framer;
  std::string line;
  while (std::getline(in, line)) {
    line += '\n';
    for (auto& event : framer.feed(line)) {
      std::optional<RpcMessage> reply;
      if (auto* msg = std::get_if<RpcMessage>(&event)) {
        reply = handle(*msg);
      } else {
        reply = RpcMessage::error(std::nullopt, rpc_error::kParseError,
                                  std::get<ParseErrorEvent>(event).reason);
      }
      if (reply) {
        out << serialize(*reply) << '\n';
        out.flush();
      }
    }
  }
}

}  // namespace mcpgw::protocol
