#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mcpgw/agent/runner.hpp"
#include "mcpgw/catalog/catalog.hpp"
#include "mcpgw/llm/chat.hpp"
#include "mcpgw/llm/embedding.hpp"
#include "mcpgw/retrieval/retrieval.hpp"

namespace mcpgw::cli {

using nlohmann::json;

/// Everything a command may need. Paths in a config file are resolved
/// against the file's directory; command-line flags override file values.
///
/// Backend specs:
///   chat:      "mock-rule" | "mock-script:<file>" | "http:<ENV_PREFIX>"
///   embedding: "hash[:<dim>[:<seed>]]" | "http:<ENV_PREFIX>:<dim>"
/// HTTP endpoints and keys come from <ENV_PREFIX>_BASE_URL, _API_KEY, _MODEL.
struct Config {
  std::optional<std::filesystem::path> fleet;
  std::optional<std::filesystem::path> catalog;
  std::optional<std::filesystem::path> tasks;

  std::size_t k = retrieval::kDefaultTopK;
  retrieval::RouteWeights weights;

  std::size_t budget = agent::kDefaultBudget;
  double temperature = llm::kDefaultTemperature;
  std::size_t run_concurrency = agent::kDefaultBatchConcurrency;
  std::size_t judge_concurrency = 4;

  std::size_t max_live_servers = copilot::kDefaultMaxLiveServers;
  std::chrono::milliseconds call_timeout{60'000};
  std::chrono::milliseconds handshake_timeout{30'000};

  std::string agent_backend = "mock-rule";
  std::string judge_backend = "mock-rule";
  std::string summary_backend = "mock-rule";
  std::string embedding_backend = "hash";

  json snapshot() const;
};

/// Throws Error(ConfigError) for unknown keys or wrongly typed values.
Config parse_config(const json& doc, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

/// Builds one chat backend per task id (scripts are per task).
using ChatFactory = std::function<std::unique_ptr<llm::ChatBackend>(const std::string& task_id)>;
ChatFactory make_chat_factory(const std::string& spec);

std::unique_ptr<llm::EmbeddingBackend> make_embedding_backend(const std::string& spec);

/// Backend able to query `catalog`: the configured one, or, when the
/// configured spec is the default, the hash embedder recorded in the catalog.
std::unique_ptr<llm::EmbeddingBackend> embedding_backend_for(const catalog::Catalog& catalog,
                                                             const Config& config);

}  // namespace mcpgw::cli
