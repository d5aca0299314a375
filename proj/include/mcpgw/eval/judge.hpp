#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/agent/task.hpp"
#include "mcpgw/agent/trajectory.hpp"
#include "mcpgw/catalog/catalog.hpp"
#include "mcpgw/llm/chat.hpp"

namespace mcpgw::eval {

using nlohmann::json;

enum class Status { success, failure };
enum class KeyPointSource { human, generated };

std::string_view to_string(Status s) noexcept;
std::string_view to_string(KeyPointSource s) noexcept;

struct Judgment {
  std::string task_id;
  std::string model_id;        // agent model that produced the trajectory
  std::string judge_model_id;
  std::string thoughts;
  Status status = Status::failure;
  KeyPointSource key_points_source = KeyPointSource::human;

  bool operator==(const Judgment&) const = default;
};

// --- key points ---------------------------------------------------------

/// Items of the first numbered list ("1. x" / "2) y") in `text`, with any
/// preamble ignored and markdown emphasis stripped. Empty if there is none.
std::vector<std::string> parse_key_points(std::string_view text);

/// Asks `chat` up to `attempts` times; throws Error(UnparseableResponse) if no
/// numbered list ever comes back.
std::vector<std::string> extract_key_points(const agent::Task& task, llm::ChatBackend& chat,
                                            double temperature = llm::kDefaultTemperature,
                                            int attempts = 3);

// --- verdicts -------------------------------------------------------------

struct Verdict {
  std::optional<Status> status;  // empty: unparseable
  std::string thoughts;
  std::string problem;           // why it could not be parsed

  bool parsed() const noexcept { return status.has_value(); }
};

/// Total: never throws. Looks for "Status:" lines (any case, optional
/// markdown/quotes around the token). Exactly the tokens success / failure are
/// accepted; missing, unknown or conflicting status lines are unparseable.
Verdict parse_verdict(std::string_view text) noexcept;

// --- judging --------------------------------------------------------------

/// Catalog entries for every (server, tool) the trajectory executed.
std::vector<catalog::ToolRecord> tools_used(const agent::Trajectory& trajectory,
                                            const catalog::Catalog& catalog);

/// The filled user half of the evaluation prompt.
std::string evaluation_prompt(const agent::Task& task, const std::vector<std::string>& key_points,
                              const agent::Trajectory& trajectory,
                              const std::vector<catalog::ToolRecord>& tool_descriptions);

struct JudgeOptions {
  double temperature = llm::kDefaultTemperature;
  int attempts = 3;
};

/// Throws InvalidArgument when `tool_descriptions` misses a tool the
/// trajectory executed, UnparseableVerdict after `attempts` bad answers.
Judgment judge(const agent::Task& task, const std::vector<std::string>& key_points,
               KeyPointSource source, const agent::Trajectory& trajectory,
               const std::vector<catalog::ToolRecord>& tool_descriptions, llm::ChatBackend& chat,
               const JudgeOptions& options = {});

// --- judgment files -------------------------------------------------------

struct JudgeFailure {
  std::string task_id;
  std::string error;

  bool operator==(const JudgeFailure&) const = default;
};

struct JudgmentSet {
  std::vector<Judgment> judgments;  // ordered by task_id
  std::vector<JudgeFailure> failures;

  bool operator==(const JudgmentSet&) const = default;
};

inline constexpr int kJudgmentFormatVersion = 1;

json to_json(const Judgment& j);
Judgment judgment_from_json(const json& doc);
json to_json(const JudgmentSet& set);
JudgmentSet judgment_set_from_json(const json& doc);
void save_judgments(const JudgmentSet& set, const std::filesystem::path& path);
JudgmentSet load_judgments(const std::filesystem::path& path);

}  // namespace mcpgw::eval
