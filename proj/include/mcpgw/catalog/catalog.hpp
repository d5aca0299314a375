#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/server_config.hpp"

namespace mcpgw::catalog {

using nlohmann::json;

inline constexpr int kCatalogFormatVersion = 1;

struct ToolRecord {
  std::string server_name;
  std::string tool_name;
  std::string description;
  json input_schema = json::object();

  bool operator==(const ToolRecord&) const = default;
};

struct ServerSummary {
  std::string server_name;
  std::string summary_text;
  std::string template_version;
  /// Digest of the server's tool list at the time the summary was written.
  std::string tools_digest;

  bool operator==(const ServerSummary&) const = default;
};

struct CatalogServer {
  std::string server_name;
  std::optional<ServerCategory> category;
  std::string description;
  ServerSummary summary;

  bool operator==(const CatalogServer&) const = default;
};

struct SkipRecord {
  std::string server_name;
  std::string reason;

  bool operator==(const SkipRecord&) const = default;
};

/// Unit vectors for every server summary and tool description. Both lists are
/// aligned with Catalog::servers() and Catalog::tools().
struct EmbeddingIndex {
  std::string backend_id;
  std::size_t dim = 0;
  std::vector<std::vector<double>> server_vectors;
  std::vector<std::vector<double>> tool_vectors;

  bool operator==(const EmbeddingIndex&) const = default;
};

/// Immutable snapshot of the indexed fleet. Copies share the same storage.
///
/// Servers are ordered by name and tools by (server_name, tool_name); every
/// (server_name, tool_name) pair occurs once and every tool belongs to a
/// listed server.
class Catalog {
 public:
  /// Throws Error(InvalidArgument) if the invariants above cannot be met or the
  /// embedding index does not line up with the entries.
  Catalog(std::vector<CatalogServer> servers, std::vector<ToolRecord> tools,
          std::vector<SkipRecord> skipped, std::optional<EmbeddingIndex> embeddings = std::nullopt);

  const std::vector<CatalogServer>& servers() const noexcept;
  const std::vector<ToolRecord>& tools() const noexcept;
  const std::vector<SkipRecord>& skipped() const noexcept;
  const std::optional<EmbeddingIndex>& embeddings() const noexcept;

  const CatalogServer* find_server(std::string_view name) const noexcept;
  std::optional<std::size_t> server_index(std::string_view name) const noexcept;
  const ToolRecord* find_tool(std::string_view server, std::string_view tool) const noexcept;

  /// New snapshot with the same entries and `index` attached.
  Catalog with_embeddings(EmbeddingIndex index) const;

  bool operator==(const Catalog& other) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

json to_json(const Catalog& catalog);

/// Throws Error(VersionMismatch) for a newer or older format version and
/// Error(CorruptFile) for anything structurally wrong.
Catalog catalog_from_json(const json& doc);

void persist_catalog(const Catalog& catalog, const std::filesystem::path& path);
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace mcpgw::catalog
