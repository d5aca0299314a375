#include "mcpgw/copilot/gateway.hpp"

#include <fstream>
#include <list>
#include <map>
#include <mutex>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mcpgw/error.hpp"
#include "mcpgw/prompts.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::copilot {

std::string_view to_string(Action a) noexcept {
  return a == Action::route ? "route" : "execute";
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::ok: return "ok";
    case Outcome::transport_error: return "transport_error";
    case Outcome::tool_error: return "tool_error";
    case Outcome::not_found: return "not_found";
    case Outcome::format_error: return "format_error";
  }
  return "ok";
}

std::optional<Action> parse_action(std::string_view s) noexcept {
  if (s == "route") return Action::route;
  if (s == "execute") return Action::execute;
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(std::string_view s) noexcept {
  for (auto o : {Outcome::ok, Outcome::transport_error, Outcome::tool_error, Outcome::not_found,
                 Outcome::format_error}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

ExecuteRequest ExecuteRequest::from_arguments(const json& args) {
  auto bad = [](const std::string& why) { throw Error(Errc::InvalidArgument, why); };
  if (!args.is_object()) bad("execute arguments must be an object");
  ExecuteRequest req;
  for (const char* key : {"server_name", "tool_name"}) {
    auto it = args.find(key);
    if (it == args.end() || !it->is_string() || it->get<std::string>().empty()) {
      bad(fmt::format("'{}' is required and must be a non-empty string", key));
    }
  }
  req.server_name = args["server_name"].get<std::string>();
  req.tool_name = args["tool_name"].get<std::string>();
  if (auto p = args.find("params"); p != args.end() && !p->is_null()) {
    if (!p->is_object()) bad("'params' must be an object or null");
    req.params = *p;
  }
  return req;
}

json ExecuteRequest::to_json() const {
  return {{"server_name", server_name}, {"tool_name", tool_name}, {"params", params}};
}

json to_json(const ToolCallRecord& r) {
  return {{"seq", r.seq},
          {"action", to_string(r.action)},
          {"request", r.request},
          {"observation", r.observation},
          {"outcome", to_string(r.outcome)},
          {"attempts", r.attempts},
          {"wall_time_us", r.wall_time.count()}};
}

ToolCallRecord record_from_json(const json& doc) {
  try {
    ToolCallRecord r;
    r.seq = doc.at("seq").get<std::uint64_t>();
    auto action = parse_action(doc.at("action").get<std::string>());
    auto outcome = parse_outcome(doc.at("outcome").get<std::string>());
    if (!action || !outcome) throw Error(Errc::CorruptFile, "unknown action or outcome in record");
    r.action = *action;
    r.outcome = *outcome;
    r.request = doc.at("request");
    r.observation = doc.at("observation").get<std::string>();
    r.attempts = doc.at("attempts").get<int>();
    r.wall_time = std::chrono::microseconds(doc.at("wall_time_us").get<std::int64_t>());
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptFile, fmt::format("malformed tool call record: {}", e.what()));
  }
}

std::vector<protocol::ToolDescriptor> meta_tools() {
  json route_schema = {
      {"type", "object"},
      {"properties",
       {{"query", {{"type", "string"}, {"description", "A <tool_assistant> block with server and tool lines"}}}}},
      {"required", {"query"}}};
  json execute_schema = {
      {"type", "object"},
      {"properties",
       {{"server_name", {{"type", "string"}}},
        {"tool_name", {{"type", "string"}}},
        {"params", {{"type", {"object", "null"}}}}}},
      {"required", {"server_name", "tool_name"}}};
  return {{std::string(kRouteTool), std::string(prompts::kRouteToolDescription), route_schema},
          {std::string(kExecuteTool), std::string(prompts::kExecuteToolDescription), execute_schema}};
}

std::optional<std::string> nearest_name(std::string_view query,
                                        const std::vector<std::string>& candidates) {
  const auto q = util::to_lower(query);
  std::optional<std::string> best;
  std::size_t best_d = 0;
  for (const auto& c : candidates) {
    const auto d = util::edit_distance(q, util::to_lower(c));
    if (!best || d < best_d || (d == best_d && c < *best)) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

struct GatewaySession::Impl {
  const retrieval::Router& router;
  std::map<std::string, ServerConfig, std::less<>> fleet;
  GatewayConfig config;

  std::mutex mu;
  std::vector<ToolCallRecord> records;
  std::uint64_t next_seq = 1;
  std::optional<std::ofstream> sink;

  // Live handles, most recently used at the front.
  std::list<std::pair<std::string, protocol::ServerHandle>> live;
  std::set<std::string> launched;

  Impl(const retrieval::Router& r, std::vector<ServerConfig> f, GatewayConfig c)
      : router(r), config(std::move(c)) {
    for (auto& s : f) {
      auto name = s.server_name;
      fleet.emplace(std::move(name), std::move(s));
    }
  }

  ToolCallRecord commit(ToolCallRecord r) {
    std::lock_guard lock(mu);
    r.seq = next_seq++;
    records.push_back(r);
    if (sink) {
      *sink << to_json(r).dump() << '\n';
      sink->flush();
    }
    return r;
  }

  protocol::ServerHandle& handle_for(const std::string& server) {
    for (auto it = live.begin(); it != live.end(); ++it) {
      if (it->first != server) continue;
      if (it->second.state() != protocol::ServerState::ready) {
        live.erase(it);
        break;
      }
      live.splice(live.begin(), live, it);
      return live.front().second;
    }
    auto cfg = fleet.find(server);
    if (cfg == fleet.end()) {
      throw Error(Errc::SpawnError, fmt::format("no launch configuration for server '{}'", server));
    }
    while (!live.empty() && live.size() >= std::max<std::size_t>(config.max_live_servers, 1)) {
      spdlog::debug("evicting idle server '{}'", live.back().first);
      live.back().second.stop();
      live.pop_back();
    }
    launched.insert(server);
    auto handle = protocol::ServerHandle::launch(cfg->second, config.launch);
    live.emplace_front(server, std::move(handle));
    return live.front().second;
  }

  ToolCallRecord route(const json& arguments) {
    const auto start = std::chrono::steady_clock::now();
    ToolCallRecord r;
    r.action = Action::route;
    const auto* q = arguments.is_object() ? &arguments : nullptr;
    const auto it = q ? q->find("query") : json::const_iterator{};
    if (!q || it == q->end() || !it->is_string()) {
      r.request = arguments;
      r.outcome = Outcome::format_error;
      r.observation = "Error: route expects {\"query\": string}";
    } else {
      const auto raw = it->get<std::string>();
      r.request = {{"query", raw}};
      try {
        const auto query = retrieval::parse_route_query(raw);
        r.request["server_part"] = query.server_part;
        r.request["tool_part"] = query.tool_part;
        r.observation = retrieval::render_route_result(router.catalog(), router.route(query));
      } catch (const Error& e) {
        r.outcome = e.code() == Errc::QueryFormatError ? Outcome::format_error : Outcome::tool_error;
        r.observation = fmt::format("Error: {}", e.what());
      }
    }
    r.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    return commit(std::move(r));
  }

  std::string not_found_message(const ExecuteRequest& req) const {
    const auto& cat = router.catalog();
    if (!cat.find_server(req.server_name)) {
      std::vector<std::string> names;
      for (const auto& s : cat.servers()) names.push_back(s.server_name);
      auto hint = nearest_name(req.server_name, names);
      return fmt::format("Error: unknown server '{}'.{}", req.server_name,
                         hint ? fmt::format(" Did you mean '{}'?", *hint) : "");
    }
    std::vector<std::string> names;
    for (const auto& t : cat.tools()) {
      if (t.server_name == req.server_name) names.push_back(t.tool_name);
    }
    auto hint = nearest_name(req.tool_name, names);
    return fmt::format("Error: server '{}' has no tool '{}'.{}", req.server_name, req.tool_name,
                       hint ? fmt::format(" Did you mean '{}'?", *hint) : "");
  }

  ToolCallRecord execute(const json& arguments) {
    const auto start = std::chrono::steady_clock::now();
    ToolCallRecord r;
    r.action = Action::execute;
    r.request = arguments;
    auto finish = [&]() {
      r.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - start);
      return commit(std::move(r));
    };

    ExecuteRequest req;
    try {
      req = ExecuteRequest::from_arguments(arguments);
    } catch (const Error& e) {
      r.outcome = Outcome::format_error;
      r.observation = fmt::format("Error: {}", e.what());
      return finish();
    }
    r.request = req.to_json();
    if (!router.catalog().find_tool(req.server_name, req.tool_name)) {
      r.outcome = Outcome::not_found;
      r.observation = not_found_message(req);
      return finish();
    }

    const json params = req.params.is_null() ? json::object() : req.params;
    const int max_attempts = std::clamp(config.max_attempts, 1, kMaxAttempts);
    std::string last_transport_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      r.attempts = attempt;
      try {
        auto& handle = handle_for(req.server_name);
        auto result = handle.call_tool(req.tool_name, params, config.launch.call_timeout);
        r.outcome = Outcome::ok;
        r.observation = result.text();
        return finish();
      } catch (const Error& e) {
        if (e.kind() != FailureKind::transport) {
          r.outcome = Outcome::tool_error;
          r.observation = fmt::format("Tool error: {}", e.what());
          return finish();
        }
        last_transport_error = e.what();
        spdlog::info("execute {}/{} attempt {} failed: {}", req.server_name, req.tool_name, attempt,
                     e.what());
      }
    }
    r.outcome = Outcome::transport_error;
    r.observation = fmt::format("Error: server '{}' failed {} time(s); last error: {}",
                                req.server_name, r.attempts, last_transport_error);
    return finish();
  }

  void shutdown() {
    for (auto& [name, handle] : live) handle.stop();
    live.clear();
  }
};

GatewaySession::GatewaySession(const retrieval::Router& router, std::vector<ServerConfig> fleet,
                               GatewayConfig config,
                               std::optional<std::filesystem::path> trajectory_sink)
    : impl_(std::make_unique<Impl>(router, std::move(fleet), std::move(config))) {
  if (trajectory_sink) {
    impl_->sink.emplace(*trajectory_sink, std::ios::app);
    if (!*impl_->sink) {
      throw Error(Errc::ConfigError,
                  fmt::format("cannot open trajectory log '{}'", trajectory_sink->string()));
    }
  }
}

GatewaySession::~GatewaySession() {
  if (impl_) impl_->shutdown();
}

ToolCallRecord GatewaySession::invoke(std::string_view tool, const json& arguments) {
  if (tool == kRouteTool) return impl_->route(arguments);
  if (tool == kExecuteTool) return impl_->execute(arguments);
  throw Error(Errc::ToolNotFound,
              fmt::format("Unknown tool: '{}' (the gateway offers 'route' and 'execute')", tool));
}

ToolCallRecord GatewaySession::handle_route(const json& arguments) {
  return impl_->route(arguments);
}

ToolCallRecord GatewaySession::handle_execute(const ExecuteRequest& request) {
  auto r = impl_->execute(request.to_json());
  if (r.outcome == Outcome::not_found) throw Error(Errc::NotFound, r.observation);
  if (r.outcome == Outcome::transport_error) throw Error(Errc::TransportExhausted, r.observation);
  return r;
}

std::vector<ToolCallRecord> GatewaySession::records() const {
  std::lock_guard lock(impl_->mu);
  return impl_->records;
}

std::set<std::string> GatewaySession::launched_servers() const { return impl_->launched; }
std::size_t GatewaySession::live_servers() const { return impl_->live.size(); }
void GatewaySession::shutdown() { impl_->shutdown(); }

protocol::CallOutcome GatewayToolProvider::call_tool(std::string_view name, const json& arguments) {
  if (name != kRouteTool && name != kExecuteTool) return protocol::CallOutcome::unknown(name);
  auto r = session_.invoke(name, arguments);
  if (r.outcome == Outcome::ok) return protocol::CallOutcome::success(protocol::ToolResult::from_text(r.observation));
  return protocol::CallOutcome::error(r.observation);
}

void serve_gateway(const retrieval::Router& router, std::vector<ServerConfig> fleet,
                   const GatewayConfig& config, std::istream& in, std::ostream& out,
                   std::optional<std::filesystem::path> trajectory_sink) {
  GatewaySession session(router, std::move(fleet), config, std::move(trajectory_sink));
  GatewayToolProvider provider(session);
  protocol::StdioServer server({"mcpgw-gateway", "0.1.0"}, provider);
  server.run(in, out);
}

}  // namespace mcpgw::copilot
