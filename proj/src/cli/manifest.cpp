#include "mcpgw/cli/manifest.hpp"

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::cli {

json to_json(const RunManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"task_id", e.task_id},
                       {"trajectory", e.trajectory ? json(*e.trajectory) : json(nullptr)},
                       {"terminal", e.terminal ? json(*e.terminal) : json(nullptr)},
                       {"error", e.error}});
  }
  return {{"format", "mcpgw-run-manifest"},
          {"format_version", kManifestFormatVersion},
          {"run_id", m.run_id},
          {"status", m.status},
          {"config", m.config},
          {"model_id", m.model_id},
          {"task_ids", m.task_ids},
          {"artifacts", {{"tasks", m.tasks_file}, {"catalog", m.catalog}}},
          {"entries", std::move(entries)},
          {"started", m.started},
          {"finished", m.finished}};
}

RunManifest manifest_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "mcpgw-run-manifest") {
      throw Error(Errc::CorruptFile, "not a run manifest");
    }
    if (doc.at("format_version").get<int>() != kManifestFormatVersion) {
      throw Error(Errc::VersionMismatch, "unsupported run manifest version");
    }
    RunManifest m;
    m.run_id = doc.at("run_id").get<std::string>();
    m.status = doc.at("status").get<std::string>();
    m.config = doc.at("config");
    m.model_id = doc.at("model_id").get<std::string>();
    m.task_ids = doc.at("task_ids").get<std::vector<std::string>>();
    m.tasks_file = doc.at("artifacts").at("tasks").get<std::string>();
    m.catalog = doc.at("artifacts").at("catalog").get<std::string>();
    for (const auto& e : doc.at("entries")) {
      ManifestEntry me;
      me.task_id = e.at("task_id").get<std::string>();
      if (!e.at("trajectory").is_null()) me.trajectory = e["trajectory"].get<std::string>();
      if (!e.at("terminal").is_null()) me.terminal = e["terminal"].get<std::string>();
      me.error = e.value("error", "");
      m.entries.push_back(std::move(me));
    }
    m.started = doc.value("started", "");
    m.finished = doc.value("finished", "");
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptFile, fmt::format("malformed run manifest: {}", e.what()));
  }
}

void save_manifest(const RunManifest& m, const std::filesystem::path& run_dir) {
  util::write_json_file(run_dir / kManifestFile, to_json(m));
}

RunManifest load_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / kManifestFile;
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::ConfigError, fmt::format("'{}' is not a run directory (no {})",
                                               run_dir.string(), kManifestFile));
  }
  return manifest_from_json(util::read_json_file(path, Errc::CorruptFile));
}

}  // namespace mcpgw::cli
