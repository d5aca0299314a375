#include "mcpgw/agent/trajectory.hpp"

#include <array>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::agent {

std::string_view to_string(StepAction a) noexcept {
  switch (a) {
    case StepAction::route: return "route";
    case StepAction::execute: return "execute";
    case StepAction::response: return "response";
  }
  return "response";
}

std::string_view to_string(Terminal t) noexcept {
  switch (t) {
    case Terminal::responded: return "responded";
    case Terminal::budget_exhausted: return "budget_exhausted";
    case Terminal::aborted: return "aborted";
  }
  return "aborted";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::array<E, N>& all, const char* what) {
  for (E e : all) {
    if (to_string(e) == s) return e;
  }
  throw Error(Errc::CorruptFile, fmt::format("unknown {} '{}'", what, s));
}

constexpr std::array kStepActions{StepAction::route, StepAction::execute, StepAction::response};
constexpr std::array kTerminals{Terminal::responded, Terminal::budget_exhausted, Terminal::aborted};

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::optional<std::string> Trajectory::response() const {
  if (steps.empty() || steps.back().action != StepAction::response) return std::nullopt;
  return steps.back().action_payload.value("text", "");
}

void validate(const Trajectory& t) {
  auto fail = [&](const std::string& why) {
    throw Error(Errc::CorruptFile, fmt::format("trajectory '{}': {}", t.task_id, why));
  };
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (s.index != i) fail(fmt::format("step {} has index {}", i, s.index));
    if (s.action == StepAction::response && i + 1 != t.steps.size()) {
      fail("response action is not the last step");
    }
    if (s.action == StepAction::response && s.observation) fail("response step has an observation");
  }
  if (t.tool_call_records.size() > t.steps.size()) fail("more tool call records than steps");
  for (std::size_t i = 1; i < t.tool_call_records.size(); ++i) {
    if (t.tool_call_records[i].seq <= t.tool_call_records[i - 1].seq) {
      fail("tool call record sequence is not increasing");
    }
  }
  const bool responded = !t.steps.empty() && t.steps.back().action == StepAction::response;
  if (responded != (t.terminal == Terminal::responded)) {
    fail("terminal state disagrees with the final step");
  }
}

json to_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"index", s.index},
                     {"thought", optional_json(s.thought)},
                     {"action", to_string(s.action)},
                     {"action_payload", s.action_payload},
                     {"observation", optional_json(s.observation)},
                     {"record_seq", optional_json(s.record_seq)}});
  }
  json records = json::array();
  for (const auto& r : t.tool_call_records) records.push_back(copilot::to_json(r));
  return {{"format", "mcpgw-trajectory"},
          {"format_version", kTrajectoryFormatVersion},
          {"task_id", t.task_id},
          {"model_id", t.model_id},
          {"terminal", to_string(t.terminal)},
          {"error", optional_json(t.error)},
          {"started", t.started},
          {"finished", t.finished},
          {"token_usage", {{"prompt", t.token_usage.prompt}, {"completion", t.token_usage.completion}}},
          {"steps", std::move(steps)},
          {"tool_call_records", std::move(records)}};
}

Trajectory trajectory_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "mcpgw-trajectory") {
      throw Error(Errc::CorruptFile, "not a trajectory document");
    }
    if (const int v = doc.at("format_version").get<int>(); v != kTrajectoryFormatVersion) {
      throw Error(Errc::VersionMismatch,
                  fmt::format("trajectory format version {} is not supported (expected {})", v,
                              kTrajectoryFormatVersion));
    }
    Trajectory t;
    t.task_id = doc.at("task_id").get<std::string>();
    t.model_id = doc.at("model_id").get<std::string>();
    t.terminal = parse_enum(doc.at("terminal").get<std::string>(), kTerminals, "terminal state");
    t.error = optional_from<std::string>(doc, "error");
    t.started = doc.at("started").get<std::string>();
    t.finished = doc.at("finished").get<std::string>();
    t.token_usage = {doc.at("token_usage").at("prompt").get<std::int64_t>(),
                     doc.at("token_usage").at("completion").get<std::int64_t>()};
    for (const auto& s : doc.at("steps")) {
      Step step;
      step.index = s.at("index").get<std::size_t>();
      step.thought = optional_from<std::string>(s, "thought");
      step.action = parse_enum(s.at("action").get<std::string>(), kStepActions, "step action");
      step.action_payload = s.at("action_payload");
      step.observation = optional_from<std::string>(s, "observation");
      step.record_seq = optional_from<std::uint64_t>(s, "record_seq");
      t.steps.push_back(std::move(step));
    }
    for (const auto& r : doc.at("tool_call_records")) {
      t.tool_call_records.push_back(copilot::record_from_json(r));
    }
    validate(t);
    return t;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptFile, fmt::format("malformed trajectory: {}", e.what()));
  }
}

void save_trajectory(const Trajectory& t, const std::filesystem::path& path) {
  util::write_json_file(path, to_json(t));
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  try {
    return trajectory_from_json(util::read_json_file(path, Errc::CorruptFile));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

TrajectoryStats trajectory_stats(const Trajectory& t) {
  TrajectoryStats s;
  s.steps = t.steps.size();
  std::set<std::pair<std::string, std::string>> used;
  for (const auto& r : t.tool_call_records) {
    if (r.action == copilot::Action::route) {
      ++s.routes;
      continue;
    }
    ++s.executes;
    if (r.outcome == copilot::Outcome::ok && r.request.is_object()) {
      used.emplace(r.request.value("server_name", ""), r.request.value("tool_name", ""));
    }
  }
  s.tools = used.size();
  return s;
}

}  // namespace mcpgw::agent
