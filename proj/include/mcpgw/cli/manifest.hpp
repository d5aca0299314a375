#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mcpgw::cli {

using nlohmann::json;

inline constexpr int kManifestFormatVersion = 1;

struct ManifestEntry {
  std::string task_id;
  std::optional<std::string> trajectory;  // path relative to the run directory
  std::optional<std::string> terminal;
  std::string error;

  bool operator==(const ManifestEntry&) const = default;
};

/// Written at the start of `run`, rewritten after every task, and marked
/// complete only when the whole batch went through.
struct RunManifest {
  std::string run_id;
  std::string status = "partial";  // partial | complete
  json config;                     // snapshot of the effective configuration
  std::string model_id;
  std::vector<std::string> task_ids;
  std::string tasks_file = "tasks.json";  // relative to the run directory
  std::string catalog;                    // absolute path of the catalog used
  std::vector<ManifestEntry> entries;
  std::string started;
  std::string finished;

  bool operator==(const RunManifest&) const = default;
};

json to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& doc);

inline constexpr const char* kManifestFile = "manifest.json";

void save_manifest(const RunManifest& m, const std::filesystem::path& run_dir);
RunManifest load_manifest(const std::filesystem::path& run_dir);

}  // namespace mcpgw::cli
