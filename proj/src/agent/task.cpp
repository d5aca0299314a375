#include "mcpgw/agent/task.hpp"

#include <set>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::agent {

std::string_view to_string(Domain d) noexcept {
  switch (d) {
    case Domain::Office: return "Office";
    case Domain::Lifestyle: return "Lifestyle";
    case Domain::Leisure: return "Leisure";
    case Domain::Finance: return "Finance";
    case Domain::Travel: return "Travel";
    case Domain::Shopping: return "Shopping";
  }
  return "Office";
}

std::optional<Domain> parse_domain(std::string_view s) noexcept {
  for (auto d : kDomains) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

json to_json(const Task& t) {
  return {{"task_id", t.task_id},
          {"domain", to_string(t.domain)},
          {"instruction", t.instruction},
          {"key_points", t.key_points}};
}

Task task_from_json(const json& doc) {
  auto fail = [](std::string_view field, std::string_view why) {
    throw Error(Errc::ConfigError, fmt::format("{}: {}", field, why));
  };
  if (!doc.is_object()) fail("task", "must be an object");
  Task t;
  for (const char* key : {"task_id", "domain", "instruction"}) {
    if (!doc.contains(key) || !doc[key].is_string()) fail(key, "required string");
  }
  t.task_id = doc["task_id"].get<std::string>();
  if (t.task_id.empty()) fail("task_id", "must not be empty");
  const auto label = doc["domain"].get<std::string>();
  auto domain = parse_domain(label);
  if (!domain) {
    fail("domain", fmt::format("unknown domain '{}' (expected Office, Lifestyle, Leisure, "
                               "Finance, Travel or Shopping)",
                               label));
  }
  t.domain = *domain;
  t.instruction = doc["instruction"].get<std::string>();
  if (t.instruction.find_first_not_of(" \t\r\n") == std::string::npos) {
    fail("instruction", "must not be empty");
  }
  if (auto kp = doc.find("key_points"); kp != doc.end() && !kp->is_null()) {
    if (!kp->is_array()) fail("key_points", "must be an array of strings");
    for (const auto& p : *kp) {
      if (!p.is_string()) fail("key_points", "must be an array of strings");
      t.key_points.push_back(p.get<std::string>());
    }
  }
  return t;
}

std::vector<Task> parse_tasks(const json& doc) {
  if (!doc.is_object() || doc.value("format_version", 0) != 1 || !doc.contains("tasks") ||
      !doc["tasks"].is_array()) {
    throw Error(Errc::ConfigError, "task file must be {\"format_version\": 1, \"tasks\": [...]}");
  }
  std::vector<Task> out;
  std::set<std::string> ids;
  const auto& tasks = doc["tasks"];
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    try {
      out.push_back(task_from_json(tasks[i]));
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, fmt::format("tasks[{}].{}", i, e.what()));
    }
    if (!ids.insert(out.back().task_id).second) {
      throw Error(Errc::ConfigError,
                  fmt::format("tasks[{}].task_id: duplicate id '{}'", i, out.back().task_id));
    }
  }
  return out;
}

std::vector<Task> load_tasks(const std::filesystem::path& path) {
  const auto doc = util::read_json_file(path, Errc::ConfigError);
  try {
    return parse_tasks(doc);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace mcpgw::agent
