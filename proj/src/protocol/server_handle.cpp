#include "mcpgw/protocol/server_handle.hpp"

#include <atomic>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mcpgw/error.hpp"
#include "mcpgw/protocol/child_process.hpp"
#include "mcpgw/protocol/framer.hpp"
#include "mcpgw/protocol/rpc_message.hpp"

namespace mcpgw::protocol {

std::string_view to_string(ServerState s) noexcept {
  switch (s) {
    case ServerState::launching: return "launching";
    case ServerState::ready: return "ready";
    case ServerState::failed: return "failed";
    case ServerState::stopped: return "stopped";
  }
  return "unknown";
}

bool is_valid_transition(ServerState from, ServerState to) noexcept {
  switch (from) {
    case ServerState::launching:
      return to == ServerState::ready || to == ServerState::failed;
    case ServerState::ready:
      return to == ServerState::stopped || to == ServerState::failed;
    default:
      return false;
  }
}

struct ServerHandle::Impl {
  std::string name;
  LaunchOptions options;
  std::unique_ptr<ChildProcess> child;
  std::thread reader;
  json server_info;

  mutable std::mutex mutex;
  ServerState state = ServerState::launching;
  std::vector<ServerState> history{ServerState::launching};
  std::string failure_reason;
  std::map<RequestId, std::shared_ptr<std::promise<RpcMessage>>> pending;

  std::mutex write_mutex;
  std::atomic<std::int64_t> next_id{1};
  std::atomic<std::size_t> orphans{0};
  std::atomic<std::size_t> parse_errors{0};

  ~Impl() { shutdown(); }

  // Caller holds `mutex`.
  void transition(ServerState to) {
    if (state == to || !is_valid_transition(state, to)) return;
    state = to;
    history.push_back(to);
  }

  void fail_pending(Errc code, const std::string& why) {
    for (auto& [id, promise] : pending) {
      promise->set_exception(std::make_exception_ptr(Error(code, why)));
    }
    pending.clear();
  }

  void on_stream_closed() {
    std::lock_guard lock(mutex);
    const std::string why = fmt::format("server '{}' closed its stream", name);
    if (state != ServerState::stopped) {
      transition(ServerState::failed);
      if (failure_reason.empty()) failure_reason = why;
    }
    fail_pending(Errc::TransportError, why);
  }

  void dispatch(RpcMessage msg) {
    if (msg.kind == MessageKind::response || msg.kind == MessageKind::error) {
      std::shared_ptr<std::promise<RpcMessage>> target;
      {
        std::lock_guard lock(mutex);
        if (msg.id) {
          if (auto it = pending.find(*msg.id); it != pending.end()) {
            target = std::move(it->second);
            pending.erase(it);
          }
        }
      }
      if (target) {
        target->set_value(std::move(msg));
      } else {
        ++orphans;
        spdlog::warn("[{}] discarding orphan {} with id {}", name, to_string(msg.kind),
                     msg.id ? to_string(*msg.id) : "null");
      }
      return;
    }
    if (msg.kind == MessageKind::request) {
      // Server-initiated requests (sampling, roots, ...) are not supported.
      try {
        write_line(serialize(RpcMessage::error(
            msg.id, rpc_error::kMethodNotFound,
            fmt::format("unsupported method '{}'", msg.method))));
      } catch (const Error&) {
        // The read side will observe the broken stream.
      }
      return;
    }
    spdlog::debug("[{}] notification {}", name, msg.method);
  }

  void read_loop() {
    LineFramer framer;
    char buf[8192];
    while (true) {
      const ssize_t n = child->read_some(buf, sizeof buf);
      if (n <= 0) break;
      for (auto& event : framer.feed(std::string_view(buf, static_cast<std::size_t>(n)))) {
        if (auto* msg = std::get_if<RpcMessage>(&event)) {
          dispatch(std::move(*msg));
        } else {
          ++parse_errors;
          spdlog::warn("[{}] unparseable line from server: {}", name,
                       std::get<ParseErrorEvent>(event).line);
        }
      }
    }
    on_stream_closed();
  }

  void write_line(const std::string& line) {
    std::lock_guard lock(write_mutex);
    child->write_all(line + "\n");
  }

  RpcMessage round_trip(std::string_view method, const json& params,
                        std::chrono::milliseconds timeout, Errc timeout_code,
                        bool allow_launching) {
    const RequestId id{next_id.fetch_add(1)};
    auto promise = std::make_shared<std::promise<RpcMessage>>();
    auto future = promise->get_future();
    {
      std::lock_guard lock(mutex);
      const bool usable =
          state == ServerState::ready || (allow_launching && state == ServerState::launching);
      if (!usable) {
        if (state == ServerState::stopped) {
          throw Error(Errc::StateError, fmt::format("server '{}' is stopped", name));
        }
        throw Error(Errc::TransportError,
                    fmt::format("server '{}' is {}{}{}", name, to_string(state),
                                failure_reason.empty() ? "" : ": ", failure_reason));
      }
      pending.emplace(id, promise);
    }
    try {
      write_line(serialize(RpcMessage::request(id, std::string(method), params)));
    } catch (const Error&) {
      std::lock_guard lock(mutex);
      pending.erase(id);
      throw;
    }
    if (future.wait_for(timeout) != std::future_status::ready) {
      std::lock_guard lock(mutex);
      if (pending.erase(id) > 0) {
        throw Error(timeout_code, fmt::format("server '{}' did not answer {} within {} ms", name,
                                              method, timeout.count()));
      }
      // Completed between the wait and the lock; fall through to get().
    }
    return future.get();
  }

  void shutdown() {
    if (!child) return;
    {
      std::lock_guard lock(mutex);
      transition(ServerState::stopped);
      fail_pending(Errc::StateError, fmt::format("server '{}' stopped", name));
    }
    child->shutdown(200);
    if (reader.joinable()) reader.join();
    child.reset();
  }
};

ServerHandle::ServerHandle(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ServerHandle::ServerHandle(ServerHandle&&) noexcept = default;
ServerHandle& ServerHandle::operator=(ServerHandle&&) noexcept = default;
ServerHandle::~ServerHandle() = default;

ServerHandle ServerHandle::launch(const ServerConfig& config, const LaunchOptions& options) {
  auto impl = std::make_unique<Impl>();
  impl->name = config.server_name;
  impl->options = options;
  impl->child = std::make_unique<ChildProcess>(config.command, config.args, config.env,
                                               options.inherit_stderr);
  impl->reader = std::thread([p = impl.get()] { p->read_loop(); });

  const json params = {
      {"protocolVersion", kProtocolVersion},
      {"capabilities", json::object()},
      {"clientInfo", {{"name", options.client_name}, {"version", "1.0.0"}}},
  };
  try {
    RpcMessage reply = impl->round_trip("initialize", params, options.handshake_timeout,
                                        Errc::HandshakeTimeout, /*allow_launching=*/true);
    if (reply.kind == MessageKind::error) {
      throw Error(Errc::HandshakeTimeout,
                  fmt::format("server '{}' rejected initialize: {}", config.server_name,
                              reply.payload.value("message", std::string{})));
    }
    impl->server_info = std::move(reply.payload);
    impl->write_line(serialize(RpcMessage::notification("notifications/initialized")));
  } catch (const Error& e) {
    {
      std::lock_guard lock(impl->mutex);
      impl->transition(ServerState::failed);
      impl->failure_reason = e.what();
    }
    impl->child->kill();
    if (impl->reader.joinable()) impl->reader.join();
    impl->child.reset();
    if (e.code() == Errc::TransportError) {
      throw Error(Errc::SpawnError,
                  fmt::format("server '{}' exited during handshake", config.server_name));
    }
    throw;
  }
  {
    std::lock_guard lock(impl->mutex);
    impl->transition(ServerState::ready);
  }
  return ServerHandle(std::move(impl));
}

const std::string& ServerHandle::server_name() const noexcept { return impl_->name; }

ServerState ServerHandle::state() const noexcept {
  std::lock_guard lock(impl_->mutex);
  return impl_->state;
}

std::vector<ServerState> ServerHandle::state_history() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->history;
}

pid_t ServerHandle::pid() const noexcept { return impl_->child ? impl_->child->pid() : -1; }

const json& ServerHandle::server_info() const noexcept { return impl_->server_info; }

std::size_t ServerHandle::orphan_responses() const noexcept { return impl_->orphans.load(); }
std::size_t ServerHandle::parse_errors() const noexcept { return impl_->parse_errors.load(); }

json ServerHandle::request(std::string_view method, const json& params,
                           std::chrono::milliseconds timeout) {
  RpcMessage reply = impl_->round_trip(method, params, timeout, Errc::TransportError, false);
  if (reply.kind == MessageKind::error) {
    throw Error(Errc::ToolErrorResult, reply.payload.value("message", std::string{"error"}));
  }
  return std::move(reply.payload);
}

std::vector<ToolDescriptor> ServerHandle::list_tools() {
  RpcMessage reply = impl_->round_trip("tools/list", json::object(), impl_->options.call_timeout,
                                       Errc::TransportError, false);
  if (reply.kind == MessageKind::error) {
    throw Error(Errc::TransportError,
                fmt::format("server '{}' failed tools/list: {}", impl_->name,
                            reply.payload.value("message", std::string{})));
  }
  std::vector<ToolDescriptor> tools;
  const auto it = reply.payload.find("tools");
  if (it == reply.payload.end() || !it->is_array()) {
    throw Error(Errc::TransportError,
                fmt::format("server '{}' returned tools/list without a tools array", impl_->name));
  }
  for (const auto& entry : *it) tools.push_back(tool_from_json(entry));
  return tools;
}

ToolResult ServerHandle::call_tool(std::string_view tool, const json& params) {
  return call_tool(tool, params, impl_->options.call_timeout);
}

ToolResult ServerHandle::call_tool(std::string_view tool, const json& params,
                                   std::chrono::milliseconds timeout) {
  const json call = {{"name", tool},
                     {"arguments", params.is_null() ? json::object() : params}};
  RpcMessage reply = impl_->round_trip("tools/call", call, timeout, Errc::TransportError, false);
  if (reply.kind == MessageKind::error) {
    const int code = reply.payload.value("code", 0);
    std::string message = reply.payload.value("message", std::string{});
    if (code == rpc_error::kInvalidParams && message.rfind("Unknown tool", 0) == 0) {
      throw Error(Errc::ToolNotFound, fmt::format("{}: {}", impl_->name, message));
    }
    throw Error(Errc::ToolErrorResult, message);
  }
  ToolResult result;
  if (auto content = reply.payload.find("content"); content != reply.payload.end()) {
    result.content = *content;
  }
  if (reply.payload.value("isError", false)) {
    throw Error(Errc::ToolErrorResult, result.text());
  }
  return result;
}

void ServerHandle::stop() {
  if (impl_) impl_->shutdown();
}

}  // namespace mcpgw::protocol
