#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/copilot/gateway.hpp"
#include "mcpgw/llm/chat.hpp"

namespace mcpgw::agent {

using nlohmann::json;

inline constexpr int kTrajectoryFormatVersion = 1;

enum class StepAction { route, execute, response };
enum class Terminal { responded, budget_exhausted, aborted };

std::string_view to_string(StepAction a) noexcept;
std::string_view to_string(Terminal t) noexcept;

struct Step {
  std::size_t index = 0;
  std::optional<std::string> thought;
  StepAction action = StepAction::response;
  // route/execute: {"tool": name, "arguments": {...}}; response: {"text": ...}
  json action_payload = json::object();
  std::optional<std::string> observation;  // absent for the response
  std::optional<std::uint64_t> record_seq;  // gateway record, if the call reached it

  bool operator==(const Step&) const = default;
};

struct Trajectory {
  std::string task_id;
  std::string model_id;
  std::vector<Step> steps;
  std::vector<copilot::ToolCallRecord> tool_call_records;
  llm::TokenUsage token_usage;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  Terminal terminal = Terminal::aborted;
  std::optional<std::string> error;  // why the run aborted

  bool operator==(const Trajectory&) const = default;

  /// Final response text, if the run responded.
  std::optional<std::string> response() const;
};

/// Structural checks: at most one response and only as the last step, step
/// indices 0..n-1, no more records than steps, strictly increasing record seq.
/// Throws Error(CorruptFile) describing the first violation.
void validate(const Trajectory& t);

json to_json(const Trajectory& t);
/// Throws Error(VersionMismatch) or Error(CorruptFile).
Trajectory trajectory_from_json(const json& doc);

void save_trajectory(const Trajectory& t, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

struct TrajectoryStats {
  std::size_t steps = 0;     // assistant turns
  std::size_t tools = 0;     // distinct (server, tool) pairs executed successfully
  std::size_t executes = 0;  // execute calls that reached the gateway
  std::size_t routes = 0;

  bool operator==(const TrajectoryStats&) const = default;
};

TrajectoryStats trajectory_stats(const Trajectory& t);

}  // namespace mcpgw::agent
