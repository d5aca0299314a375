#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mcpgw::agent {

using nlohmann::json;

enum class Domain { Office, Lifestyle, Leisure, Finance, Travel, Shopping };

/// Reporting order for domain columns.
inline constexpr std::array<Domain, 6> kDomains{Domain::Office,  Domain::Lifestyle,
                                                Domain::Leisure, Domain::Finance,
                                                Domain::Travel,  Domain::Shopping};

std::string_view to_string(Domain d) noexcept;
std::optional<Domain> parse_domain(std::string_view s) noexcept;

struct Task {
  std::string task_id;
  Domain domain = Domain::Office;
  std::string instruction;
  std::vector<std::string> key_points;  // may be empty until extracted

  bool operator==(const Task&) const = default;
};

json to_json(const Task& t);

/// Throws Error(ConfigError) naming the offending field.
Task task_from_json(const json& doc);

/// Task file: {"format_version": 1, "tasks": [...]}. Ids must be unique.
std::vector<Task> load_tasks(const std::filesystem::path& path);
std::vector<Task> parse_tasks(const json& doc);

}  // namespace mcpgw::agent
