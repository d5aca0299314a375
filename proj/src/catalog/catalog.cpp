#include "mcpgw/catalog/catalog.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::catalog {

struct Catalog::Data {
  std::vector<CatalogServer> servers;
  std::vector<ToolRecord> tools;
  std::vector<SkipRecord> skipped;
  std::optional<EmbeddingIndex> embeddings;

  bool operator==(const Data&) const = default;
};

namespace {

void check_index(const EmbeddingIndex& index, std::size_t servers, std::size_t tools) {
  auto fail = [](const std::string& why) {
    throw Error(Errc::InvalidArgument, "embedding index: " + why);
  };
  if (index.dim == 0) fail("dimension must be positive");
  if (index.server_vectors.size() != servers) fail("server vector count mismatch");
  if (index.tool_vectors.size() != tools) fail("tool vector count mismatch");
  for (const auto& v : index.server_vectors) {
    if (v.size() != index.dim) fail("server vector has wrong dimension");
  }
  for (const auto& v : index.tool_vectors) {
    if (v.size() != index.dim) fail("tool vector has wrong dimension");
  }
}

}  // namespace

Catalog::Catalog(std::vector<CatalogServer> servers, std::vector<ToolRecord> tools,
                 std::vector<SkipRecord> skipped, std::optional<EmbeddingIndex> embeddings) {
  auto data = std::make_shared<Data>();

  // Sort while keeping attached vectors aligned.
  std::vector<std::size_t> server_order(servers.size()), tool_order(tools.size());
  for (std::size_t i = 0; i < server_order.size(); ++i) server_order[i] = i;
  for (std::size_t i = 0; i < tool_order.size(); ++i) tool_order[i] = i;
  std::sort(server_order.begin(), server_order.end(), [&](std::size_t a, std::size_t b) {
    return servers[a].server_name < servers[b].server_name;
  });
  std::sort(tool_order.begin(), tool_order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(tools[a].server_name, tools[a].tool_name) <
           std::tie(tools[b].server_name, tools[b].tool_name);
  });

  if (embeddings) check_index(*embeddings, servers.size(), tools.size());

  for (std::size_t i : server_order) data->servers.push_back(std::move(servers[i]));
  for (std::size_t i : tool_order) data->tools.push_back(std::move(tools[i]));
  std::sort(skipped.begin(), skipped.end(),
            [](const SkipRecord& a, const SkipRecord& b) { return a.server_name < b.server_name; });
  data->skipped = std::move(skipped);

  for (std::size_t i = 1; i < data->servers.size(); ++i) {
    if (data->servers[i - 1].server_name == data->servers[i].server_name) {
      throw Error(Errc::InvalidArgument,
                  fmt::format("duplicate server '{}'", data->servers[i].server_name));
    }
  }
  for (std::size_t i = 0; i < data->tools.size(); ++i) {
    const auto& t = data->tools[i];
    if (i > 0 && data->tools[i - 1].server_name == t.server_name &&
        data->tools[i - 1].tool_name == t.tool_name) {
      throw Error(Errc::InvalidArgument,
                  fmt::format("duplicate tool '{}/{}'", t.server_name, t.tool_name));
    }
    const auto pos = std::lower_bound(
        data->servers.begin(), data->servers.end(), t.server_name,
        [](const CatalogServer& a, const std::string& n) { return a.server_name < n; });
    const bool known = pos != data->servers.end() && pos->server_name == t.server_name;
    if (!known) {
      throw Error(Errc::InvalidArgument,
                  fmt::format("tool '{}/{}' belongs to no listed server", t.server_name, t.tool_name));
    }
  }

  if (embeddings) {
    EmbeddingIndex sorted{embeddings->backend_id, embeddings->dim, {}, {}};
    for (std::size_t i : server_order) sorted.server_vectors.push_back(std::move(embeddings->server_vectors[i]));
    for (std::size_t i : tool_order) sorted.tool_vectors.push_back(std::move(embeddings->tool_vectors[i]));
    data->embeddings = std::move(sorted);
  }
  data_ = std::move(data);
}

const std::vector<CatalogServer>& Catalog::servers() const noexcept { return data_->servers; }
const std::vector<ToolRecord>& Catalog::tools() const noexcept { return data_->tools; }
const std::vector<SkipRecord>& Catalog::skipped() const noexcept { return data_->skipped; }
const std::optional<EmbeddingIndex>& Catalog::embeddings() const noexcept {
  return data_->embeddings;
}

std::optional<std::size_t> Catalog::server_index(std::string_view name) const noexcept {
  const auto& s = data_->servers;
  auto it = std::lower_bound(s.begin(), s.end(), name, [](const CatalogServer& a, std::string_view n) {
    return a.server_name < n;
  });
  if (it == s.end() || it->server_name != name) return std::nullopt;
  return static_cast<std::size_t>(it - s.begin());
}

const CatalogServer* Catalog::find_server(std::string_view name) const noexcept {
  const auto i = server_index(name);
  return i ? &data_->servers[*i] : nullptr;
}

const ToolRecord* Catalog::find_tool(std::string_view server, std::string_view tool) const noexcept {
  const auto& t = data_->tools;
  auto it = std::lower_bound(t.begin(), t.end(), std::pair{server, tool},
                             [](const ToolRecord& a, const std::pair<std::string_view, std::string_view>& k) {
                               return std::pair<std::string_view, std::string_view>{a.server_name, a.tool_name} < k;
                             });
  if (it == t.end() || it->server_name != server || it->tool_name != tool) return nullptr;
  return &*it;
}

Catalog Catalog::with_embeddings(EmbeddingIndex index) const {
  return Catalog(data_->servers, data_->tools, data_->skipped, std::move(index));
}

bool Catalog::operator==(const Catalog& other) const {
  return data_ == other.data_ || *data_ == *other.data_;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const Catalog& catalog) {
  json servers = json::array();
  for (const auto& s : catalog.servers()) {
    servers.push_back({
        {"server_name", s.server_name},
        {"category", s.category ? json(to_string(*s.category)) : json(nullptr)},
        {"description", s.description},
        {"summary",
         {{"text", s.summary.summary_text},
          {"template_version", s.summary.template_version},
          {"tools_digest", s.summary.tools_digest}}},
    });
  }
  json tools = json::array();
  for (const auto& t : catalog.tools()) {
    tools.push_back({{"server_name", t.server_name},
                     {"tool_name", t.tool_name},
                     {"description", t.description},
                     {"input_schema", t.input_schema}});
  }
  json skipped = json::array();
  for (const auto& s : catalog.skipped()) {
    skipped.push_back({{"server_name", s.server_name}, {"reason", s.reason}});
  }
  json embedding = nullptr;
  if (const auto& e = catalog.embeddings()) {
    embedding = {{"backend_id", e->backend_id},
                 {"dim", e->dim},
                 {"server_vectors", e->server_vectors},
                 {"tool_vectors", e->tool_vectors}};
  }
  return {{"format", "mcpgw-catalog"},
          {"format_version", kCatalogFormatVersion},
          {"servers", std::move(servers)},
          {"tools", std::move(tools)},
          {"skipped", std::move(skipped)},
          {"embedding", std::move(embedding)}};
}

Catalog catalog_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "mcpgw-catalog") {
      throw Error(Errc::CorruptFile, "not a catalog document");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != kCatalogFormatVersion) {
      throw Error(Errc::VersionMismatch,
                  fmt::format("catalog format version {} is not supported (expected {})", version,
                              kCatalogFormatVersion));
    }
    std::vector<CatalogServer> servers;
    for (const auto& s : doc.at("servers")) {
      CatalogServer cs;
      cs.server_name = s.at("server_name").get<std::string>();
      if (const auto& c = s.at("category"); !c.is_null()) {
        cs.category = parse_server_category(c.get<std::string>());
        if (!cs.category) throw Error(Errc::CorruptFile, "unknown category in catalog");
      }
      cs.description = s.at("description").get<std::string>();
      const auto& sum = s.at("summary");
      cs.summary = {cs.server_name, sum.at("text").get<std::string>(),
                    sum.at("template_version").get<std::string>(),
                    sum.at("tools_digest").get<std::string>()};
      servers.push_back(std::move(cs));
    }
    std::vector<ToolRecord> tools;
    for (const auto& t : doc.at("tools")) {
      tools.push_back({t.at("server_name").get<std::string>(), t.at("tool_name").get<std::string>(),
                       t.at("description").get<std::string>(), t.at("input_schema")});
    }
    std::vector<SkipRecord> skipped;
    for (const auto& s : doc.at("skipped")) {
      skipped.push_back({s.at("server_name").get<std::string>(), s.at("reason").get<std::string>()});
    }
    std::optional<EmbeddingIndex> index;
    if (const auto& e = doc.at("embedding"); !e.is_null()) {
      index = EmbeddingIndex{e.at("backend_id").get<std::string>(), e.at("dim").get<std::size_t>(),
                             e.at("server_vectors").get<std::vector<std::vector<double>>>(),
                             e.at("tool_vectors").get<std::vector<std::vector<double>>>()};
    }
    return Catalog(std::move(servers), std::move(tools), std::move(skipped), std::move(index));
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptFile, fmt::format("malformed catalog: {}", e.what()));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) {
      throw Error(Errc::CorruptFile, fmt::format("inconsistent catalog: {}", e.what()));
    }
    throw;
  }
}

void persist_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  util::write_json_file(path, to_json(catalog));
}

Catalog load_catalog(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::ConfigError, fmt::format("catalog '{}' does not exist", path.string()));
  }
  return catalog_from_json(util::read_json_file(path, Errc::CorruptFile));
}

}  // namespace mcpgw::catalog
