#pragma once

#include <sys/types.h>

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/protocol/tool.hpp"
#include "mcpgw/server_config.hpp"

namespace mcpgw::protocol {

using nlohmann::json;

/// Protocol revision sent in `initialize`. No negotiation beyond this one.
inline constexpr std::string_view kProtocolVersion = "2025-03-26";

enum class ServerState { launching, ready, failed, stopped };

std::string_view to_string(ServerState s) noexcept;

/// launching -> {ready, failed}; ready -> {stopped, failed}. Nothing else.
bool is_valid_transition(ServerState from, ServerState to) noexcept;

struct LaunchOptions {
  std::chrono::milliseconds handshake_timeout{30'000};
  std::chrono::milliseconds call_timeout{60'000};
  bool inherit_stderr = false;
  std::string client_name = "mcpgw";
};

/// Client side of one downstream MCP server running as a child process.
///
/// Requests from any number of threads are written through one serialized
/// writer and matched to responses by id on a dedicated reader thread.
/// Responses whose id matches no outstanding request are logged and dropped.
/// When the stream breaks every in-flight call fails with TransportError and
/// the handle moves to `failed`; it is never reused after that.
class ServerHandle {
 public:
  /// Spawns the server and completes the initialize handshake.
  /// Throws Error(SpawnError) or Error(HandshakeTimeout).
  static ServerHandle launch(const ServerConfig& config, const LaunchOptions& options = {});

  ServerHandle(ServerHandle&&) noexcept;
  ServerHandle& operator=(ServerHandle&&) noexcept;
  ~ServerHandle();

  const std::string& server_name() const noexcept;
  ServerState state() const noexcept;
  std::vector<ServerState> state_history() const;
  pid_t pid() const noexcept;

  /// `result` of the initialize request.
  const json& server_info() const noexcept;

  std::vector<ToolDescriptor> list_tools();

  /// Throws TransportError (stream broken, timeout), ToolNotFound, or
  /// ToolErrorResult carrying the server's message.
  ToolResult call_tool(std::string_view tool, const json& params);
  ToolResult call_tool(std::string_view tool, const json& params,
                       std::chrono::milliseconds timeout);

  /// Raw request; returns the `result` member. JSON-RPC error responses are
  /// raised as Error(ToolErrorResult).
  json request(std::string_view method, const json& params, std::chrono::milliseconds timeout);

  /// Number of responses dropped because no outstanding request matched.
  std::size_t orphan_responses() const noexcept;
  std::size_t parse_errors() const noexcept;

  /// Closes stdin, waits briefly, then kills. Idempotent.
  void stop();

 private:
  struct Impl;
  explicit ServerHandle(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace mcpgw::protocol
