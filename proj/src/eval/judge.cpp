#include "mcpgw/eval/judge.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/prompts.hpp"
#include "mcpgw/util/files.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::eval {

std::string_view to_string(Status s) noexcept {
  return s == Status::success ? "success" : "failure";
}

std::string_view to_string(KeyPointSource s) noexcept {
  return s == KeyPointSource::human ? "human" : "generated";
}

namespace {

std::string_view strip_chars(std::string_view s, std::string_view chars) {
  const auto a = s.find_first_not_of(chars);
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(chars);
  return s.substr(a, b - a + 1);
}

std::string remove_emphasis(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.compare(i, 2, "**") == 0 || s.compare(i, 2, "__") == 0) {
      ++i;
      continue;
    }
    out += s[i];
  }
  return out;
}

// "12. text" or "3) text" -> "text"
std::optional<std::string_view> numbered_item(std::string_view line) {
  line = strip_chars(line, " \t*");
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
  ++i;
  if (i < line.size() && line[i] != ' ' && line[i] != '\t') return std::nullopt;
  return util::trim(line.substr(i));
}

// Line with leading markdown noise removed, e.g. "**Status:** x" -> "Status:** x".
std::string_view field_line(std::string_view line) {
  line = util::trim(line);
  while (!line.empty() && (line.front() == '*' || line.front() == '#' || line.front() == '>' ||
                           line.front() == '-' || line.front() == ' ')) {
    line.remove_prefix(1);
  }
  return line;
}

std::string numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '\n';
    out += fmt::format("{}. {}", i + 1, items[i]);
  }
  return out;
}

bool reached_catalog(copilot::Outcome o) {
  return o == copilot::Outcome::ok || o == copilot::Outcome::tool_error ||
         o == copilot::Outcome::transport_error;
}

}  // namespace

std::vector<std::string> parse_key_points(std::string_view text) {
  std::vector<std::string> out;
  bool in_list = false;
  for (auto line : util::split_lines(text)) {
    if (util::trim(line).empty()) continue;
    if (auto item = numbered_item(line)) {
      in_list = true;
      auto clean = std::string(util::trim(remove_emphasis(*item)));
      if (!clean.empty()) out.push_back(std::move(clean));
    } else if (in_list) {
      break;
    }
  }
  return out;
}

std::vector<std::string> extract_key_points(const agent::Task& task, llm::ChatBackend& chat,
                                            double temperature, int attempts) {
  const std::vector<llm::ChatMessage> messages{
      llm::ChatMessage::system(std::string(prompts::kKeyPointsSystem)),
      llm::ChatMessage::user(task.instruction)};
  attempts = std::max(attempts, 1);
  for (int i = 0; i < attempts; ++i) {
    auto points = parse_key_points(llm::complete_text(chat, messages, temperature).text);
    if (!points.empty()) return points;
  }
  throw Error(Errc::UnparseableResponse,
              fmt::format("no numbered key point list for task '{}' after {} attempt(s)",
                          task.task_id, attempts));
}

Verdict parse_verdict(std::string_view text) noexcept {
  Verdict v;
  try {
    const auto lines = util::split_lines(text);
    std::optional<std::size_t> thoughts_at;
    std::vector<std::size_t> status_lines;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto f = field_line(lines[i]);
      if (util::starts_with_ci(f, "status:")) {
        status_lines.push_back(i);
      } else if (!thoughts_at && util::starts_with_ci(f, "thoughts:")) {
        thoughts_at = i;
      }
    }
    if (status_lines.empty()) {
      v.problem = "no 'Status:' line";
      return v;
    }
    for (auto i : status_lines) {
      const auto token =
          util::to_lower(strip_chars(field_line(lines[i]).substr(7), " \t*\"'`.!"));
      Status s;
      if (token == "success") {
        s = Status::success;
      } else if (token == "failure") {
        s = Status::failure;
      } else {
        v.problem = fmt::format("unrecognized status '{}'", token);
        v.status.reset();
        return v;
      }
      if (v.status && *v.status != s) {
        v.problem = "conflicting status lines";
        v.status.reset();
        return v;
      }
      v.status = s;
    }

    std::string thoughts;
    if (thoughts_at) {
      thoughts = std::string(field_line(lines[*thoughts_at]).substr(9));
      for (auto i = *thoughts_at + 1; i < lines.size(); ++i) {
        if (std::find(status_lines.begin(), status_lines.end(), i) != status_lines.end()) break;
        thoughts += '\n';
        thoughts += lines[i];
      }
    } else {
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (std::find(status_lines.begin(), status_lines.end(), i) != status_lines.end()) continue;
        thoughts += lines[i];
        thoughts += '\n';
      }
    }
    v.thoughts = std::string(strip_chars(remove_emphasis(thoughts), " \t\r\n*"));
    if (v.thoughts.empty()) v.thoughts = "(no reasoning given)";
  } catch (...) {
    v.status.reset();
    v.problem = "verdict text could not be processed";
  }
  return v;
}

std::vector<catalog::ToolRecord> tools_used(const agent::Trajectory& trajectory,
                                            const catalog::Catalog& catalog) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<catalog::ToolRecord> out;
  for (const auto& r : trajectory.tool_call_records) {
    if (r.action != copilot::Action::execute || !reached_catalog(r.outcome)) continue;
    const auto server = r.request.value("server_name", "");
    const auto tool = r.request.value("tool_name", "");
    if (!seen.emplace(server, tool).second) continue;
    if (const auto* rec = catalog.find_tool(server, tool)) out.push_back(*rec);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.server_name, a.tool_name) < std::tie(b.server_name, b.tool_name);
  });
  return out;
}

std::string evaluation_prompt(const agent::Task& task, const std::vector<std::string>& key_points,
                              const agent::Trajectory& trajectory,
                              const std::vector<catalog::ToolRecord>& tool_descriptions) {
  json calls = json::array();
  for (const auto& r : trajectory.tool_call_records) {
    calls.push_back({{"seq", r.seq},
                     {"action", copilot::to_string(r.action)},
                     {"request", r.request},
                     {"outcome", copilot::to_string(r.outcome)},
                     {"observation", r.observation}});
  }
  json tools = json::array();
  for (const auto& t : tool_descriptions) {
    tools.push_back({{"server_name", t.server_name},
                     {"tool_name", t.tool_name},
                     {"description", t.description},
                     {"input_schema", t.input_schema}});
  }
  return prompts::fill(prompts::kEvaluationUser, {{"task", task.instruction},
                                                  {"key_points", numbered(key_points)},
                                                  {"response", trajectory.response().value_or("")},
                                                  {"tool_calls", calls.dump()},
                                                  {"tool_descriptions", tools.dump()}});
}

Judgment judge(const agent::Task& task, const std::vector<std::string>& key_points,
               KeyPointSource source, const agent::Trajectory& trajectory,
               const std::vector<catalog::ToolRecord>& tool_descriptions, llm::ChatBackend& chat,
               const JudgeOptions& options) {
  std::set<std::pair<std::string, std::string>> described;
  for (const auto& t : tool_descriptions) described.emplace(t.server_name, t.tool_name);
  for (const auto& r : trajectory.tool_call_records) {
    if (r.action != copilot::Action::execute || !reached_catalog(r.outcome)) continue;
    const auto server = r.request.value("server_name", "");
    const auto tool = r.request.value("tool_name", "");
    if (!described.count({server, tool})) {
      throw Error(Errc::InvalidArgument,
                  fmt::format("no description supplied for executed tool '{}/{}'", server, tool));
    }
  }

  const std::vector<llm::ChatMessage> messages{
      llm::ChatMessage::system(std::string(prompts::kEvaluationSystem)),
      llm::ChatMessage::user(evaluation_prompt(task, key_points, trajectory, tool_descriptions))};
  const int attempts = std::max(options.attempts, 1);
  std::string last_problem;
  for (int i = 0; i < attempts; ++i) {
    const auto verdict = parse_verdict(llm::complete_text(chat, messages, options.temperature).text);
    if (verdict.parsed()) {
      return {task.task_id, trajectory.model_id, chat.model_id(), verdict.thoughts, *verdict.status,
              source};
    }
    last_problem = verdict.problem;
  }
  throw Error(Errc::UnparseableVerdict,
              fmt::format("judge gave no usable verdict for '{}' after {} attempt(s): {}",
                          task.task_id, attempts, last_problem));
}

// ---------------------------------------------------------------------------

json to_json(const Judgment& j) {
  return {{"task_id", j.task_id},
          {"model_id", j.model_id},
          {"judge_model_id", j.judge_model_id},
          {"thoughts", j.thoughts},
          {"status", to_string(j.status)},
          {"key_points_source", to_string(j.key_points_source)}};
}

Judgment judgment_from_json(const json& doc) {
  Judgment j;
  j.task_id = doc.at("task_id").get<std::string>();
  j.model_id = doc.value("model_id", "");
  j.judge_model_id = doc.at("judge_model_id").get<std::string>();
  j.thoughts = doc.at("thoughts").get<std::string>();
  const auto status = doc.at("status").get<std::string>();
  if (status != "success" && status != "failure") {
    throw Error(Errc::CorruptFile, fmt::format("judgment '{}': bad status '{}'", j.task_id, status));
  }
  j.status = status == "success" ? Status::success : Status::failure;
  const auto src = doc.value("key_points_source", "human");
  if (src != "human" && src != "generated") {
    throw Error(Errc::CorruptFile, fmt::format("judgment '{}': bad key_points_source", j.task_id));
  }
  j.key_points_source = src == "human" ? KeyPointSource::human : KeyPointSource::generated;
  return j;
}

json to_json(const JudgmentSet& set) {
  json judgments = json::array(), failures = json::array();
  for (const auto& j : set.judgments) judgments.push_back(to_json(j));
  for (const auto& f : set.failures) failures.push_back({{"task_id", f.task_id}, {"error", f.error}});
  return {{"format", "mcpgw-judgments"},
          {"format_version", kJudgmentFormatVersion},
          {"judgments", std::move(judgments)},
          {"failures", std::move(failures)}};
}

JudgmentSet judgment_set_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "mcpgw-judgments") {
      throw Error(Errc::CorruptFile, "not a judgments document");
    }
    if (const int v = doc.at("format_version").get<int>(); v != kJudgmentFormatVersion) {
      throw Error(Errc::VersionMismatch, fmt::format("judgments format version {} not supported", v));
    }
    JudgmentSet set;
    for (const auto& j : doc.at("judgments")) set.judgments.push_back(judgment_from_json(j));
    for (const auto& f : doc.value("failures", json::array())) {
      set.failures.push_back({f.at("task_id").get<std::string>(), f.at("error").get<std::string>()});
    }
    return set;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptFile, fmt::format("malformed judgments: {}", e.what()));
  }
}

void save_judgments(const JudgmentSet& set, const std::filesystem::path& path) {
  util::write_json_file(path, to_json(set));
}

JudgmentSet load_judgments(const std::filesystem::path& path) {
  return judgment_set_from_json(util::read_json_file(path, Errc::CorruptFile));
}

}  // namespace mcpgw::eval
