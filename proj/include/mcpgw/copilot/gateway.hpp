#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/protocol/server_handle.hpp"
#include "mcpgw/protocol/stdio_server.hpp"
#include "mcpgw/retrieval/retrieval.hpp"
#include "mcpgw/server_config.hpp"

namespace mcpgw::copilot {

using nlohmann::json;

inline constexpr std::string_view kRouteTool = "route";
inline constexpr std::string_view kExecuteTool = "execute";
inline constexpr int kMaxAttempts = 3;
inline constexpr std::size_t kDefaultMaxLiveServers = 16;

enum class Action { route, execute };
enum class Outcome { ok, transport_error, tool_error, not_found, format_error };

std::string_view to_string(Action a) noexcept;
std::string_view to_string(Outcome o) noexcept;
std::optional<Action> parse_action(std::string_view s) noexcept;
std::optional<Outcome> parse_outcome(std::string_view s) noexcept;

struct ExecuteRequest {
  std::string server_name;
  std::string tool_name;
  json params;  // object, or null when absent

  /// Reads execute arguments; throws Error(InvalidArgument) with the reason.
  static ExecuteRequest from_arguments(const json& args);
  json to_json() const;
};

struct ToolCallRecord {
  std::uint64_t seq = 0;
  Action action = Action::route;
  json request;  // {"query": ...} or the execute arguments
  std::string observation;
  Outcome outcome = Outcome::ok;
  int attempts = 1;
  std::chrono::microseconds wall_time{0};

  bool operator==(const ToolCallRecord&) const = default;
};

json to_json(const ToolCallRecord& r);
ToolCallRecord record_from_json(const json& doc);

/// The two advertised meta-tools, with their full descriptions and schemas.
std::vector<protocol::ToolDescriptor> meta_tools();

/// Closest candidate by case-insensitive edit distance; ties go to the
/// lexicographically smaller name. Empty when there are no candidates.
std::optional<std::string> nearest_name(std::string_view query,
                                        const std::vector<std::string>& candidates);

struct GatewayConfig {
  std::size_t max_live_servers = kDefaultMaxLiveServers;
  int max_attempts = kMaxAttempts;
  protocol::LaunchOptions launch;
};

/// One agent's view of the gateway. Holds its own downstream handles and
/// action log; actions are expected one at a time but appends are locked.
class GatewaySession {
 public:
  GatewaySession(const retrieval::Router& router, std::vector<ServerConfig> fleet,
                 GatewayConfig config = {},
                 std::optional<std::filesystem::path> trajectory_sink = std::nullopt);
  ~GatewaySession();

  GatewaySession(const GatewaySession&) = delete;
  GatewaySession& operator=(const GatewaySession&) = delete;

  /// Dispatches a meta-tool call and returns its record. Agent-facing errors
  /// (bad query, unknown server, exhausted retries, tool errors) come back as
  /// records with a non-ok outcome. Only an unknown meta-tool name throws,
  /// Error(ToolNotFound), and leaves no record.
  ToolCallRecord invoke(std::string_view tool, const json& arguments);

  ToolCallRecord handle_route(const json& arguments);

  /// Like invoke("execute", ...), but raises NotFound or TransportExhausted
  /// after recording the call.
  ToolCallRecord handle_execute(const ExecuteRequest& request);

  std::vector<ToolCallRecord> records() const;

  /// Names of downstream servers launched at least once.
  std::set<std::string> launched_servers() const;
  std::size_t live_servers() const;

  /// Stops every live downstream server.
  void shutdown();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// ToolProvider adaptor so a session can be served over stdio.
class GatewayToolProvider final : public protocol::ToolProvider {
 public:
  explicit GatewayToolProvider(GatewaySession& session) : session_(session) {}
  std::vector<protocol::ToolDescriptor> list_tools() override { return meta_tools(); }
  protocol::CallOutcome call_tool(std::string_view name, const json& arguments) override;

 private:
  GatewaySession& session_;
};

/// Serves the gateway until `in` closes. Throws Error(BindError) if `out`
/// cannot be written.
void serve_gateway(const retrieval::Router& router, std::vector<ServerConfig> fleet,
                   const GatewayConfig& config, std::istream& in, std::ostream& out,
                   std::optional<std::filesystem::path> trajectory_sink = std::nullopt);

}  // namespace mcpgw::copilot
