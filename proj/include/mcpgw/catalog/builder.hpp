#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mcpgw/catalog/catalog.hpp"
#include "mcpgw/llm/chat.hpp"
#include "mcpgw/protocol/server_handle.hpp"
#include "mcpgw/protocol/tool.hpp"

namespace mcpgw::catalog {

struct BuildOptions {
  std::size_t parallelism = 8;
  protocol::LaunchOptions launch;
  /// Summaries are reused from here when a server's tool list is unchanged.
  const Catalog* previous = nullptr;
  double temperature = llm::kDefaultTemperature;
};

/// The summary prompt for one server, fully interpolated.
std::string summary_prompt(const ServerConfig& server,
                           const std::vector<protocol::ToolDescriptor>& tools);

/// Stable digest of a tool list (names, descriptions and schemas).
std::string tools_digest(const std::vector<protocol::ToolDescriptor>& tools);

/// Launches every server, lists its tools, shuts it down again and writes a
/// summary per server through `chat`. Servers that fail to launch, list or be
/// summarized are recorded as skipped. Throws Error(EmptyCatalog) when no
/// server makes it.
Catalog build_catalog(const std::vector<ServerConfig>& fleet, llm::ChatBackend& chat,
                      const BuildOptions& options = {});

}  // namespace mcpgw::catalog
