#include "mcpgw/protocol/rpc_message.hpp"

#include <fmt/format.h>

#include "mcpgw/error.hpp"

namespace mcpgw::protocol {

std::string to_string(const RequestId& id) {
  if (const auto* n = std::get_if<std::int64_t>(&id)) return std::to_string(*n);
  return std::get<std::string>(id);
}

std::string_view to_string(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::request: return "request";
    case MessageKind::response: return "response";
    case MessageKind::error: return "error";
    case MessageKind::notification: return "notification";
  }
  return "unknown";
}

RpcMessage RpcMessage::request(RequestId id, std::string method, json params) {
  return {std::move(id), MessageKind::request, std::move(method), std::move(params)};
}

RpcMessage RpcMessage::notification(std::string method, json params) {
  return {std::nullopt, MessageKind::notification, std::move(method), std::move(params)};
}

RpcMessage RpcMessage::response(RequestId id, json result) {
  return {std::move(id), MessageKind::response, {}, std::move(result)};
}

RpcMessage RpcMessage::error(std::optional<RequestId> id, int code, std::string message,
                             json data) {
  json err = {{"code", code}, {"message", std::move(message)}};
  if (!data.is_null()) err["data"] = std::move(data);
  return {std::move(id), MessageKind::error, {}, std::move(err)};
}

namespace {

json id_to_json(const std::optional<RequestId>& id) {
  if (!id) return nullptr;
  if (const auto* n = std::get_if<std::int64_t>(&*id)) return *n;
  return std::get<std::string>(*id);
}

[[noreturn]] void reject(std::string_view why) {
  throw Error(Errc::ParseError, fmt::format("not a JSON-RPC 2.0 message: {}", why));
}

std::optional<RequestId> id_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      reject("id out of range");
    }
    return RequestId{v.get<std::int64_t>()};
  }
  if (v.is_string()) return RequestId{v.get<std::string>()};
  reject("id must be an integer or a string");
}

}  // namespace

json to_json(const RpcMessage& msg) {
  json doc = {{"jsonrpc", "2.0"}};
  switch (msg.kind) {
    case MessageKind::request:
      doc["id"] = id_to_json(msg.id);
      doc["method"] = msg.method;
      if (!msg.payload.is_null()) doc["params"] = msg.payload;
      break;
    case MessageKind::notification:
      doc["method"] = msg.method;
      if (!msg.payload.is_null()) doc["params"] = msg.payload;
      break;
    case MessageKind::response:
      doc["id"] = id_to_json(msg.id);
      doc["result"] = msg.payload;
      break;
    case MessageKind::error:
      doc["id"] = id_to_json(msg.id);
      doc["error"] = msg.payload;
      break;
  }
  return doc;
}

std::string serialize(const RpcMessage& msg) {
  // dump() escapes control characters, so the output never contains a raw newline.
  return to_json(msg).dump(-1, ' ', false, json::error_handler_t::replace);
}

RpcMessage from_json(const json& doc) {
  if (!doc.is_object()) reject("top-level value must be an object");
  const auto version = doc.find("jsonrpc");
  if (version == doc.end() || *version != "2.0") reject("missing \"jsonrpc\": \"2.0\"");

  const auto method = doc.find("method");
  const auto id = doc.find("id");
  const auto result = doc.find("result");
  const auto error = doc.find("error");

  RpcMessage msg;
  if (method != doc.end()) {
    if (!method->is_string()) reject("method must be a string");
    if (result != doc.end() || error != doc.end()) reject("request carries result or error");
    msg.method = method->get<std::string>();
    if (auto params = doc.find("params"); params != doc.end()) {
      if (!params->is_object() && !params->is_array()) reject("params must be object or array");
      msg.payload = *params;
    }
    if (id != doc.end()) {
      msg.id = id_from_json(*id);
      if (!msg.id) reject("request id must not be null");
      msg.kind = MessageKind::request;
    } else {
      msg.kind = MessageKind::notification;
    }
    return msg;
  }

  if (id == doc.end()) reject("response without id");
  if ((result != doc.end()) == (error != doc.end())) {
    reject("response must carry exactly one of result or error");
  }
  msg.id = id_from_json(*id);
  if (result != doc.end()) {
    if (!msg.id) reject("result response with null id");
    msg.kind = MessageKind::response;
    msg.payload = *result;
  } else {
    if (!error->is_object() || !error->contains("code") || !(*error)["code"].is_number_integer() ||
        !error->contains("message") || !(*error)["message"].is_string()) {
      reject("error object needs integer code and string message");
    }
    msg.kind = MessageKind::error;
    msg.payload = *error;
  }
  return msg;
}

RpcMessage parse(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, fmt::format("malformed JSON ({}) in line: {}", e.what(), line));
  }
  try {
    return from_json(doc);
  } catch (const Error& e) {
    throw Error(Errc::ParseError, fmt::format("{} in line: {}", e.what(), line));
  }
}

}  // namespace mcpgw::protocol
