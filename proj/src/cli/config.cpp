#include "mcpgw/cli/config.hpp"

#include <cstdio>
#include <set>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/fixtures/backends.hpp"
#include "mcpgw/llm/http_backends.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::cli {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(Errc::ConfigError, fmt::format("config {}: {}", field, why));
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where.empty() ? "<root>" : where, "must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items()) {
    if (!ok.count(k)) bad(where.empty() ? k : where + "." + k, "unknown key");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key, "wrong type");
  }
}

void read_count(const json& obj, const char* key, const std::string& where, std::size_t& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1) bad(where + "." + key, "must be a positive integer");
  out = it->get<std::size_t>();
}

void read_path(const json& obj, const char* key, const std::filesystem::path& base,
               std::optional<std::filesystem::path>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_string()) bad(key, "must be a path string");
  std::filesystem::path p = it->get<std::string>();
  out = p.is_absolute() ? p : (base / p).lexically_normal();
}

void read_ms(const json& obj, const char* key, const std::string& where, std::chrono::milliseconds& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1) bad(where + "." + key, "must be a positive integer");
  out = std::chrono::milliseconds(it->get<std::int64_t>());
}

}  // namespace

json Config::snapshot() const {
  auto p = [](const std::optional<std::filesystem::path>& v) { return v ? json(v->string()) : json(nullptr); };
  return {{"fleet", p(fleet)},
          {"catalog", p(catalog)},
          {"tasks", p(tasks)},
          {"route", {{"k", k}, {"weight_server", weights.server}, {"weight_tool", weights.tool}}},
          {"agent",
           {{"budget", budget},
            {"temperature", temperature},
            {"concurrency", run_concurrency},
            {"backend", agent_backend}}},
          {"gateway",
           {{"max_live_servers", max_live_servers},
            {"call_timeout_ms", call_timeout.count()},
            {"handshake_timeout_ms", handshake_timeout.count()}}},
          {"judge", {{"backend", judge_backend}, {"concurrency", judge_concurrency}}},
          {"index", {{"summary_backend", summary_backend}, {"embedding_backend", embedding_backend}}}};
}

Config parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Config c;
  check_keys(doc, "", {"format_version", "fleet", "catalog", "tasks", "route", "agent", "gateway",
                       "judge", "index"});
  if (doc.value("format_version", 1) != 1) bad("format_version", "must be 1");
  read_path(doc, "fleet", base_dir, c.fleet);
  read_path(doc, "catalog", base_dir, c.catalog);
  read_path(doc, "tasks", base_dir, c.tasks);
  if (auto r = doc.find("route"); r != doc.end()) {
    check_keys(*r, "route", {"k", "weight_server", "weight_tool"});
    read_count(*r, "k", "route", c.k);
    read(*r, "weight_server", "route", c.weights.server);
    read(*r, "weight_tool", "route", c.weights.tool);
    try {
      c.weights.validate();
    } catch (const Error& e) {
      bad("route", e.what());
    }
  }
  if (auto a = doc.find("agent"); a != doc.end()) {
    check_keys(*a, "agent", {"budget", "temperature", "concurrency", "backend"});
    read_count(*a, "budget", "agent", c.budget);
    read(*a, "temperature", "agent", c.temperature);
    read_count(*a, "concurrency", "agent", c.run_concurrency);
    read(*a, "backend", "agent", c.agent_backend);
  }
  if (auto g = doc.find("gateway"); g != doc.end()) {
    check_keys(*g, "gateway", {"max_live_servers", "call_timeout_ms", "handshake_timeout_ms"});
    read_count(*g, "max_live_servers", "gateway", c.max_live_servers);
    read_ms(*g, "call_timeout_ms", "gateway", c.call_timeout);
    read_ms(*g, "handshake_timeout_ms", "gateway", c.handshake_timeout);
  }
  if (auto j = doc.find("judge"); j != doc.end()) {
    check_keys(*j, "judge", {"backend", "concurrency"});
    read(*j, "backend", "judge", c.judge_backend);
    read_count(*j, "concurrency", "judge", c.judge_concurrency);
  }
  if (auto i = doc.find("index"); i != doc.end()) {
    check_keys(*i, "index", {"summary_backend", "embedding_backend"});
    read(*i, "summary_backend", "index", c.summary_backend);
    read(*i, "embedding_backend", "index", c.embedding_backend);
  }
  for (auto* spec : {&c.agent_backend, &c.judge_backend, &c.summary_backend}) {
    if (spec->rfind("mock-script:", 0) != 0) continue;
    const std::filesystem::path p = spec->substr(12);
    if (p.is_relative()) *spec = "mock-script:" + (base_dir / p).lexically_normal().string();
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  const auto doc = util::read_json_file(path, Errc::ConfigError);
  return parse_config(doc, std::filesystem::absolute(path).parent_path());
}

ChatFactory make_chat_factory(const std::string& spec) {
  if (spec == "mock-rule") {
    return [](const std::string&) { return std::make_unique<fixtures::RuleBasedChatBackend>(); };
  }
  if (spec.rfind("mock-script:", 0) == 0) {
    auto script = std::make_shared<fixtures::ChatScript>(fixtures::load_chat_script(spec.substr(12)));
    return [script](const std::string& task_id) -> std::unique_ptr<llm::ChatBackend> {
      return script->backend_for(task_id);
    };
  }
  if (spec.rfind("http:", 0) == 0) {
    const auto endpoint = llm::endpoint_from_env(spec.substr(5));
    return [endpoint](const std::string&) { return std::make_unique<llm::HttpChatBackend>(endpoint); };
  }
  throw Error(Errc::ConfigError,
              fmt::format("unknown chat backend '{}' (use mock-rule, mock-script:<file> or "
                          "http:<ENV_PREFIX>)",
                          spec));
}

std::unique_ptr<llm::EmbeddingBackend> make_embedding_backend(const std::string& spec) {
  auto number = [&](const std::string& s) -> std::uint64_t {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, fmt::format("embedding backend '{}': '{}' is not a number", spec, s));
    }
  };
  std::vector<std::string> parts;
  for (std::size_t a = 0;;) {
    const auto b = spec.find(':', a);
    parts.push_back(spec.substr(a, b == std::string::npos ? b : b - a));
    if (b == std::string::npos) break;
    a = b + 1;
  }
  if (parts[0] == "hash" && parts.size() <= 3) {
    const std::size_t dim = parts.size() > 1 ? number(parts[1]) : fixtures::kDefaultEmbeddingDim;
    const std::uint64_t seed = parts.size() > 2 ? number(parts[2]) : 0;
    if (dim == 0) throw Error(Errc::ConfigError, "embedding dimension must be positive");
    return std::make_unique<fixtures::HashEmbeddingBackend>(dim, seed);
  }
  if (parts[0] == "http" && parts.size() == 3) {
    return std::make_unique<llm::HttpEmbeddingBackend>(llm::endpoint_from_env(parts[1]), number(parts[2]));
  }
  throw Error(Errc::ConfigError,
              fmt::format("unknown embedding backend '{}' (use hash[:dim[:seed]] or "
                          "http:<ENV_PREFIX>:<dim>)",
                          spec));
}

std::unique_ptr<llm::EmbeddingBackend> embedding_backend_for(const catalog::Catalog& catalog,
                                                             const Config& config) {
  const auto& index = catalog.embeddings();
  if (!index) throw Error(Errc::ConfigError, "catalog has no embeddings; re-run `mcpgw index`");
  if (config.embedding_backend == "hash") {
    unsigned long long dim = 0, seed = 0;
    if (std::sscanf(index->backend_id.c_str(), "hash-v1:dim=%llu:seed=%llu", &dim, &seed) == 2) {
      return std::make_unique<fixtures::HashEmbeddingBackend>(dim, seed);
    }
  }
  return make_embedding_backend(config.embedding_backend);
}

}  // namespace mcpgw::cli
