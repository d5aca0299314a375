#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "mcpgw/llm/http_backends.hpp"

#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>

#include "mcpgw/error.hpp"

namespace mcpgw::llm {

HttpEndpoint endpoint_from_env(const std::string& prefix) {
  auto get = [&](const char* suffix) -> std::string {
    const std::string name = prefix + "_" + suffix;
    const char* v = std::getenv(name.c_str());
    return v ? v : "";
  };
  HttpEndpoint ep{get("BASE_URL"), get("API_KEY"), get("MODEL")};
  if (ep.base_url.empty() || ep.model.empty()) {
    throw Error(Errc::ConfigError,
                fmt::format("set {0}_BASE_URL and {0}_MODEL (and {0}_API_KEY if required)", prefix));
  }
  return ep;
}

json chat_completions_request(const std::string& model, std::span<const ChatMessage> messages,
                              double temperature, std::span<const ToolSchema> tools) {
  json msgs = json::array();
  for (const auto& m : messages) {
    json entry = {{"role", to_string(m.role)}, {"content", m.content}};
    if (m.role == Role::assistant && m.tool_call) {
      entry["tool_calls"] = json::array({{{"id", m.tool_call->id},
                                          {"type", "function"},
                                          {"function",
                                           {{"name", m.tool_call->name},
                                            {"arguments", m.tool_call->arguments.dump()}}}}});
    }
    if (m.role == Role::tool) entry["tool_call_id"] = m.tool_call_id;
    msgs.push_back(std::move(entry));
  }
  json body = {{"model", model}, {"messages", std::move(msgs)}, {"temperature", temperature}};
  if (!tools.empty()) {
    json specs = json::array();
    for (const auto& t : tools) {
      specs.push_back({{"type", "function"},
                       {"function",
                        {{"name", t.name},
                         {"description", t.description},
                         {"parameters", t.parameters}}}});
    }
    body["tools"] = std::move(specs);
  }
  return body;
}

AssistantTurn parse_chat_completions_response(const json& body) {
  try {
    const json& message = body.at("choices").at(0).at("message");
    AssistantTurn turn;
    if (auto c = message.find("content"); c != message.end() && c->is_string()) {
      turn.text = c->get<std::string>();
    }
    if (auto calls = message.find("tool_calls"); calls != message.end() && calls->is_array() &&
                                                 !calls->empty()) {
      const json& call = calls->at(0);
      ToolInvocation inv;
      inv.id = call.value("id", std::string{"call_0"});
      inv.name = call.at("function").at("name").get<std::string>();
      const json& args = call.at("function").value("arguments", json("{}"));
      if (args.is_string()) {
        const auto text = args.get<std::string>();
        inv.arguments = text.empty() ? json::object() : json::parse(text);
      } else {
        inv.arguments = args;
      }
      turn.tool_call = std::move(inv);
    }
    if (auto usage = body.find("usage"); usage != body.end() && usage->is_object()) {
      turn.usage.prompt = usage->value("prompt_tokens", std::int64_t{0});
      turn.usage.completion = usage->value("completion_tokens", std::int64_t{0});
    }
    return turn;
  } catch (const json::exception& e) {
    throw Error(Errc::BackendError, fmt::format("malformed chat completion: {}", e.what()));
  }
}

json post_json(const HttpEndpoint& endpoint, const std::string& path, const json& body) {
  // Split "scheme://host[:port]/prefix" into client origin and path prefix.
  const auto scheme_end = endpoint.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::ConfigError, fmt::format("bad base URL '{}'", endpoint.base_url));
  }
  const auto path_start = endpoint.base_url.find('/', scheme_end + 3);
  const std::string origin = endpoint.base_url.substr(0, path_start);
  std::string prefix =
      path_start == std::string::npos ? std::string{} : endpoint.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  client.set_connection_timeout(endpoint.timeout);
  client.set_read_timeout(endpoint.timeout);
  client.set_write_timeout(endpoint.timeout);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  auto res = client.Post(prefix + path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::BackendError,
                fmt::format("POST {}{}: {}", endpoint.base_url, path, httplib::to_string(res.error())));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(Errc::BackendError,
                fmt::format("POST {}{}: HTTP {}: {}", endpoint.base_url, path, res->status,
                            res->body.substr(0, 500)));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(Errc::BackendError, fmt::format("non-JSON response: {}", e.what()));
  }
}

AssistantTurn HttpChatBackend::complete(std::span<const ChatMessage> messages, double temperature,
                                        std::span<const ToolSchema> tools) {
  return parse_chat_completions_response(post_json(
      endpoint_, "/chat/completions",
      chat_completions_request(endpoint_.model, messages, temperature, tools)));
}

std::vector<std::vector<double>> HttpEmbeddingBackend::embed(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  const json body = {{"model", endpoint_.model},
                     {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const json reply = post_json(endpoint_, "/embeddings", body);
  std::vector<std::vector<double>> out(texts.size());
  try {
    for (const auto& item : reply.at("data")) {
      const auto index = item.value("index", std::size_t{0});
      if (index >= out.size()) throw Error(Errc::BackendError, "embedding index out of range");
      out[index] = item.at("embedding").get<std::vector<double>>();
      if (out[index].size() != dim_) {
        throw Error(Errc::BackendError,
                    fmt::format("embedding has dim {} but {} was configured", out[index].size(), dim_));
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BackendError, fmt::format("malformed embeddings response: {}", e.what()));
  }
  for (const auto& v : out) {
    if (v.empty()) throw Error(Errc::BackendError, "embeddings response is missing entries");
  }
  return out;
}

}  // namespace mcpgw::llm
