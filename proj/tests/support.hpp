#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "mcpgw/catalog/builder.hpp"
#include "mcpgw/catalog/fleet.hpp"
#include "mcpgw/fixtures/backends.hpp"
#include "mcpgw/retrieval/retrieval.hpp"
#include "mcpgw/server_config.hpp"

namespace mcpgw::test {

namespace fs = std::filesystem;
using nlohmann::json;

inline fs::path source_dir() { return MCPGW_SOURCE_DIR; }
inline fs::path fixtures_dir() { return source_dir() / "fixtures"; }
inline fs::path bin_dir() { return MCPGW_BIN_DIR; }
inline fs::path mock_server() { return bin_dir() / "mcpgw-mock-server"; }
inline fs::path mock_fleet_file() { return fixtures_dir() / "fleet" / "mock_fleet.json"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> serial{0};
    path_ = fs::temp_directory_path() /
            ("mcpgw-test-" + std::to_string(::getpid()) + "-" + std::to_string(serial++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream(path) << doc.dump(2) << "\n";
}

inline json simple_tool(const std::string& name, const std::string& description = "A tool.") {
  return {{"name", name},
          {"description", description},
          {"output", name + " done"},
          {"input_schema", {{"type", "object"}, {"properties", json::object()}}}};
}

inline json behavior(const std::string& server, json tools, bool stall = false) {
  return {{"format_version", 1}, {"server_name", server}, {"stall", stall}, {"tools", std::move(tools)}};
}

/// Writes `doc` as <dir>/<server_name>.json and returns a config that runs the
/// mock server on it.
inline ServerConfig mock_config(const fs::path& dir, const json& doc) {
  const auto name = doc.at("server_name").get<std::string>();
  const auto file = dir / (name + ".json");
  write_json(file, doc);
  ServerConfig c;
  c.server_name = name;
  c.command = mock_server().string();
  c.args = {file.string()};
  c.description = "Mock server " + name + ".";
  return c;
}

inline ServerConfig bundled_config(const std::string& behavior_name) {
  ServerConfig c;
  c.server_name = behavior_name;
  c.command = mock_server().string();
  c.args = {(fixtures_dir() / "behaviors" / (behavior_name + ".json")).string()};
  return c;
}

inline std::vector<ServerConfig> mock_fleet() { return catalog::load_fleet(mock_fleet_file()); }

/// The 4-server mock catalog with hash embeddings, built once per process.
inline const catalog::Catalog& mock_catalog() {
  static const catalog::Catalog cat = [] {
    fixtures::RuleBasedChatBackend chat;
    fixtures::HashEmbeddingBackend emb;
    return retrieval::attach_embeddings(catalog::build_catalog(mock_fleet(), chat), emb);
  }();
  return cat;
}

inline std::string route_query(const std::string& server, const std::string& tool) {
  return "<tool_assistant>\nserver: " + server + "\ntool: " + tool + "\n</tool_assistant>";
}

}  // namespace mcpgw::test
