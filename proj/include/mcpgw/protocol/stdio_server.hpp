#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/protocol/rpc_message.hpp"
#include "mcpgw/protocol/tool.hpp"

namespace mcpgw::protocol {

/// What a tool invocation produced, from the server's point of view.
struct CallOutcome {
  enum class Kind {
    ok,            // result content
    tool_error,    // result with isError = true
    unknown_tool,  // JSON-RPC error, "Unknown tool: ..."
    no_reply,      // swallow the request (used to simulate a dropped message)
  };
  Kind kind = Kind::ok;
  ToolResult result;
  std::string message;

  static CallOutcome success(ToolResult r) { return {Kind::ok, std::move(r), {}}; }
  static CallOutcome error(std::string msg) { return {Kind::tool_error, {}, std::move(msg)}; }
  static CallOutcome unknown(std::string_view tool);
  static CallOutcome drop() { return {Kind::no_reply, {}, {}}; }
};

class ToolProvider {
 public:
  virtual ~ToolProvider() = default;
  virtual std::vector<ToolDescriptor> list_tools() = 0;
  virtual CallOutcome call_tool(std::string_view name, const nlohmann::json& arguments) = 0;
};

struct ServerIdentity {
  std::string name;
  std::string version = "1.0.0";
};

/// Request/response loop of an MCP server over newline-delimited JSON-RPC.
/// Handles `initialize`, `ping`, `tools/list` and `tools/call`; everything
/// else is answered with method-not-found.
class StdioServer {
 public:
  StdioServer(ServerIdentity identity, ToolProvider& provider)
      : identity_(std::move(identity)), provider_(provider) {}

  /// Returns the reply to write for one decoded message, or nothing.
  std::optional<RpcMessage> handle(const RpcMessage& msg);

  /// Serves until end of input. Throws Error(BindError) when `out` is not
  /// writable at start.
  void run(std::istream& in, std::ostream& out);

 private:
  ServerIdentity identity_;
  ToolProvider& provider_;
};

}  // namespace mcpgw::protocol
