#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/protocol/stdio_server.hpp"

namespace mcpgw::fixtures {

using nlohmann::json;

inline constexpr int kBehaviorFormatVersion = 1;

/// How a mock tool computes its reply.
enum class MockOp {
  fixed,     // `output` with {argument} placeholders filled from the call
  add,       // a + b
  multiply,  // a * b
  echo,      // arguments.text
};

/// How a scheduled transport failure manifests.
enum class FailMode {
  drop,   // request is swallowed; the client times out
  crash,  // process exits without answering
};

struct MockTool {
  std::string name;
  std::string description;
  json input_schema = json::object();
  MockOp op = MockOp::fixed;
  std::string output;
  std::string error;  // non-empty: every call returns this as a tool error
  int fail_count = 0;
  FailMode fail_mode = FailMode::drop;
  int latency_ms = 0;
  bool crash = false;                // every call kills the process
  bool orphan_before_reply = false;  // emit a response with an unknown id first
};

/// Declarative description of a mock MCP server. Everything the server does
/// follows from this document; there is no clock or randomness involved.
struct MockBehavior {
  std::string server_name;
  std::string version = "1.0.0";
  bool stall = false;
  std::vector<MockTool> tools;
};

/// Throws Error(ConfigError) naming the offending field.
MockBehavior parse_behavior(const json& doc);
MockBehavior load_behavior(const std::filesystem::path& path);

/// Serves a MockBehavior. Fail counters decrement across calls for the life
/// of the provider.
class MockToolProvider final : public protocol::ToolProvider {
 public:
  explicit MockToolProvider(MockBehavior behavior);

  std::vector<protocol::ToolDescriptor> list_tools() override;
  protocol::CallOutcome call_tool(std::string_view name, const json& arguments) override;

  /// Set when the last call asked for an unsolicited orphan response first.
  bool take_orphan_request() noexcept;
  /// Set when the last call asked the process to exit.
  bool crash_requested() const noexcept { return crash_requested_; }

  const MockBehavior& behavior() const noexcept { return behavior_; }

 private:
  MockBehavior behavior_;
  std::map<std::string, int, std::less<>> remaining_failures_;
  bool orphan_pending_ = false;
  bool crash_requested_ = false;
};

/// Runs a complete mock server on stdin/stdout. Returns the process exit code.
int run_mock_server(const std::filesystem::path& behavior_file);

}  // namespace mcpgw::fixtures
