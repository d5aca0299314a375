#include "mcpgw/catalog/builder.hpp"

#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mcpgw/error.hpp"
#include "mcpgw/prompts.hpp"
#include "mcpgw/util/parallel.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::catalog {

std::string summary_prompt(const ServerConfig& server,
                           const std::vector<protocol::ToolDescriptor>& tools) {
  std::string listing;
  for (const auto& t : tools) listing += fmt::format("\n- {}: {}", t.name, t.description);
  return prompts::fill(prompts::kServerSummary, {{"server_name", server.server_name},
                                                 {"server_desc", server.description},
                                                 {"tool_descriptions", listing}});
}

std::string tools_digest(const std::vector<protocol::ToolDescriptor>& tools) {
  json doc = json::array();
  for (const auto& t : tools) doc.push_back(protocol::to_json(t));
  return fmt::format("fnv1a64:{:016x}", util::fnv1a64(doc.dump()));
}

namespace {

struct Enumerated {
  std::optional<std::vector<protocol::ToolDescriptor>> tools;
  std::optional<ServerSummary> summary;
  std::string skip_reason;
};

std::vector<protocol::ToolDescriptor> dedupe(const std::string& server,
                                             std::vector<protocol::ToolDescriptor> tools) {
  std::set<std::string> seen;
  std::vector<protocol::ToolDescriptor> out;
  for (auto& t : tools) {
    if (!seen.insert(t.name).second) {
      spdlog::warn("server '{}' lists tool '{}' twice; keeping the first", server, t.name);
      continue;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

Catalog build_catalog(const std::vector<ServerConfig>& fleet, llm::ChatBackend& chat,
                      const BuildOptions& options) {
  std::vector<Enumerated> results(fleet.size());

  util::bounded_parallel_for(fleet.size(), options.parallelism, [&](std::size_t i) {
    const auto& cfg = fleet[i];
    try {
      auto handle = protocol::ServerHandle::launch(cfg, options.launch);
      results[i].tools = dedupe(cfg.server_name, handle.list_tools());
      handle.stop();
    } catch (const Error& e) {
      results[i].skip_reason = fmt::format("{}: {}", to_string(e.code()), e.what());
      spdlog::warn("skipping server '{}': {}", cfg.server_name, results[i].skip_reason);
    }
  });

  util::bounded_parallel_for(fleet.size(), options.parallelism, [&](std::size_t i) {
    if (!results[i].tools) return;
    const auto& cfg = fleet[i];
    const auto digest = tools_digest(*results[i].tools);
    if (options.previous) {
      if (const auto* prev = options.previous->find_server(cfg.server_name);
          prev && prev->summary.tools_digest == digest &&
          prev->summary.template_version == prompts::kServerSummaryVersion) {
        results[i].summary = prev->summary;
        return;
      }
    }
    try {
      const llm::ChatMessage msg = llm::ChatMessage::user(summary_prompt(cfg, *results[i].tools));
      auto turn = llm::complete_text(chat, std::span(&msg, 1), options.temperature);
      const auto text = std::string(util::trim(turn.text));
      if (text.empty()) throw Error(Errc::BackendError, "empty summary");
      results[i].summary = ServerSummary{cfg.server_name, text,
                                         std::string(prompts::kServerSummaryVersion), digest};
    } catch (const Error& e) {
      results[i].tools.reset();
      results[i].skip_reason = fmt::format("summary failed: {}", e.what());
      spdlog::warn("skipping server '{}': {}", cfg.server_name, results[i].skip_reason);
    }
  });

  std::vector<CatalogServer> servers;
  std::vector<ToolRecord> tools;
  std::vector<SkipRecord> skipped;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const auto& cfg = fleet[i];
    if (!results[i].tools) {
      skipped.push_back({cfg.server_name, results[i].skip_reason});
      continue;
    }
    servers.push_back({cfg.server_name, cfg.category, cfg.description, *results[i].summary});
    for (const auto& t : *results[i].tools) {
      tools.push_back({cfg.server_name, t.name, t.description, t.input_schema});
    }
  }
  if (servers.empty()) {
    throw Error(Errc::EmptyCatalog,
                fleet.empty() ? "fleet lists no servers"
                              : fmt::format("none of the {} servers became ready", fleet.size()));
  }
  return Catalog(std::move(servers), std::move(tools), std::move(skipped));
}

}  // namespace mcpgw::catalog
