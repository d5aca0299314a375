#include "mcpgw/fixtures/mock_behavior.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/prompts.hpp"
#include "mcpgw/protocol/framer.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::fixtures {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(Errc::ConfigError, fmt::format("behavior field '{}': {}", field, why));
}

MockOp parse_op(const std::string& field, const std::string& s) {
  if (s == "fixed") return MockOp::fixed;
  if (s == "add") return MockOp::add;
  if (s == "multiply") return MockOp::multiply;
  if (s == "echo") return MockOp::echo;
  bad(field, fmt::format("unknown op '{}'", s));
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    bad(path + "." + key, "wrong type");
  }
}

std::string render_number(const json& a, const json& b, bool multiply) {
  if (a.is_number_integer() && b.is_number_integer()) {
    const auto x = a.get<std::int64_t>();
    const auto y = b.get<std::int64_t>();
    return std::to_string(multiply ? x * y : x + y);
  }
  const double x = a.get<double>();
  const double y = b.get<double>();
  return json(multiply ? x * y : x + y).dump();
}

std::string argument_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

MockBehavior parse_behavior(const json& doc) {
  if (!doc.is_object()) bad("<root>", "must be an object");
  const int version = field_or<int>(doc, "format_version", 0, "<root>");
  if (version != kBehaviorFormatVersion) {
    bad("format_version", fmt::format("expected {}, got {}", kBehaviorFormatVersion, version));
  }
  MockBehavior b;
  b.server_name = field_or<std::string>(doc, "server_name", "", "<root>");
  if (b.server_name.empty()) bad("server_name", "required");
  b.version = field_or<std::string>(doc, "version", "1.0.0", "<root>");
  b.stall = field_or<bool>(doc, "stall", false, "<root>");

  const auto tools = doc.find("tools");
  if (tools == doc.end() || !tools->is_array()) bad("tools", "must be an array");
  for (std::size_t i = 0; i < tools->size(); ++i) {
    const json& t = (*tools)[i];
    const std::string path = fmt::format("tools[{}]", i);
    if (!t.is_object()) bad(path, "must be an object");
    MockTool tool;
    tool.name = field_or<std::string>(t, "name", "", path);
    if (tool.name.empty()) bad(path + ".name", "required");
    for (const auto& prior : b.tools) {
      if (prior.name == tool.name) bad(path + ".name", fmt::format("duplicate '{}'", tool.name));
    }
    tool.description = field_or<std::string>(t, "description", "", path);
    tool.input_schema = field_or<json>(t, "input_schema",
                                       json{{"type", "object"}, {"properties", json::object()}},
                                       path);
    tool.op = parse_op(path + ".op", field_or<std::string>(t, "op", "fixed", path));
    tool.output = field_or<std::string>(t, "output", "", path);
    tool.error = field_or<std::string>(t, "error", "", path);
    tool.fail_count = field_or<int>(t, "fail_count", 0, path);
    if (tool.fail_count < 0) bad(path + ".fail_count", "must be >= 0");
    const auto mode = field_or<std::string>(t, "fail_mode", "drop", path);
    if (mode == "drop") {
      tool.fail_mode = FailMode::drop;
    } else if (mode == "crash") {
      tool.fail_mode = FailMode::crash;
    } else {
      bad(path + ".fail_mode", fmt::format("unknown mode '{}'", mode));
    }
    tool.latency_ms = field_or<int>(t, "latency_ms", 0, path);
    if (tool.latency_ms < 0) bad(path + ".latency_ms", "must be >= 0");
    tool.crash = field_or<bool>(t, "crash", false, path);
    tool.orphan_before_reply = field_or<bool>(t, "orphan_before_reply", false, path);
    b.tools.push_back(std::move(tool));
  }
  return b;
}

MockBehavior load_behavior(const std::filesystem::path& path) {
  return parse_behavior(util::read_json_file(path, Errc::ConfigError));
}

MockToolProvider::MockToolProvider(MockBehavior behavior) : behavior_(std::move(behavior)) {
  for (const auto& t : behavior_.tools) remaining_failures_[t.name] = t.fail_count;
}

std::vector<protocol::ToolDescriptor> MockToolProvider::list_tools() {
  std::vector<protocol::ToolDescriptor> out;
  for (const auto& t : behavior_.tools) out.push_back({t.name, t.description, t.input_schema});
  return out;
}

bool MockToolProvider::take_orphan_request() noexcept {
  return std::exchange(orphan_pending_, false);
}

protocol::CallOutcome MockToolProvider::call_tool(std::string_view name, const json& arguments) {
  const MockTool* tool = nullptr;
  for (const auto& t : behavior_.tools) {
    if (t.name == name) tool = &t;
  }
  if (!tool) return protocol::CallOutcome::unknown(name);

  if (tool->latency_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(tool->latency_ms));
  }
  if (tool->crash) {
    crash_requested_ = true;
    return protocol::CallOutcome::drop();
  }
  if (auto& left = remaining_failures_.find(name)->second; left > 0) {
    --left;
    if (tool->fail_mode == FailMode::crash) crash_requested_ = true;
    return protocol::CallOutcome::drop();
  }
  orphan_pending_ = tool->orphan_before_reply;
  if (!tool->error.empty()) return protocol::CallOutcome::error(tool->error);

  const json args = arguments.is_object() ? arguments : json::object();
  switch (tool->op) {
    case MockOp::add:
    case MockOp::multiply: {
      for (const char* key : {"a", "b"}) {
        if (!args.contains(key) || !args[key].is_number()) {
          return protocol::CallOutcome::error(
              fmt::format("missing or non-numeric parameter '{}'", key));
        }
      }
      return protocol::CallOutcome::success(protocol::ToolResult::from_text(
          render_number(args["a"], args["b"], tool->op == MockOp::multiply)));
    }
    case MockOp::echo: {
      if (!args.contains("text")) {
        return protocol::CallOutcome::error("missing parameter 'text'");
      }
      return protocol::CallOutcome::success(
          protocol::ToolResult::from_text(argument_text(args["text"])));
    }
    case MockOp::fixed: {
      std::map<std::string, std::string, std::less<>> values;
      for (const auto& [k, v] : args.items()) values.emplace(k, argument_text(v));
      return protocol::CallOutcome::success(
          protocol::ToolResult::from_text(prompts::fill(tool->output, values)));
    }
  }
  return protocol::CallOutcome::error("unreachable");
}

int run_mock_server(const std::filesystem::path& behavior_file) {
  MockBehavior behavior;
  try {
    behavior = load_behavior(behavior_file);
  } catch (const Error& e) {
    std::cerr << "mock server: " << e.what() << "\n";
    return 2;
  }
  std::ios::sync_with_stdio(false);
  if (behavior.stall) {
    // Read and ignore everything; never answer.
    std::string line;
    while (std::getline(std::cin, line)) {
    }
    return 0;
  }

  MockToolProvider provider(behavior);
  protocol::StdioServer server({behavior.server_name, behavior.version}, provider);
  protocol::LineFramer framer;
  std::size_t orphan_serial = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    line += '\n';
    for (auto& event : framer.feed(line)) {
      std::optional<protocol::RpcMessage> reply;
      if (auto* msg = std::get_if<protocol::RpcMessage>(&event)) {
        reply = server.handle(*msg);
      } else {
        reply = protocol::RpcMessage::error(std::nullopt, protocol::rpc_error::kParseError,
                                            std::get<protocol::ParseErrorEvent>(event).reason);
      }
      if (provider.crash_requested()) std::_Exit(3);
      if (provider.take_orphan_request()) {
        const auto orphan = protocol::RpcMessage::response(
            protocol::RequestId{fmt::format("orphan-{}", ++orphan_serial)},
            {{"content", json::array()}});
        std::cout << protocol::serialize(orphan) << '\n';
      }
      if (reply) {
        std::cout << protocol::serialize(*reply) << '\n';
        std::cout.flush();
      }
    }
  }
  return 0;
}

}  // namespace mcpgw::fixtures
