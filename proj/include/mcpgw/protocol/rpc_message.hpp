#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace mcpgw::protocol {

using nlohmann::json;

/// JSON-RPC correlation token: integer or string.
using RequestId = std::variant<std::int64_t, std::string>;

std::string to_string(const RequestId& id);

enum class MessageKind { request, response, error, notification };

std::string_view to_string(MessageKind kind) noexcept;

/// One JSON-RPC 2.0 message.
///
/// `payload` holds `params` for requests and notifications, `result` for
/// responses and the `error` object for errors. A null payload on a request or
/// notification means `params` was absent.
struct RpcMessage {
  std::optional<RequestId> id;
  MessageKind kind = MessageKind::notification;
  std::string method;
  json payload;

  static RpcMessage request(RequestId id, std::string method, json params = nullptr);
  static RpcMessage notification(std::string method, json params = nullptr);
  static RpcMessage response(RequestId id, json result);
  static RpcMessage error(std::optional<RequestId> id, int code, std::string message,
                          json data = nullptr);

  bool operator==(const RpcMessage&) const = default;
};

/// Standard JSON-RPC error codes used by the gateway and the mock servers.
namespace rpc_error {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
}  // namespace rpc_error

json to_json(const RpcMessage& msg);

/// Single-line wire form without the trailing newline.
std::string serialize(const RpcMessage& msg);

/// Validates a decoded JSON value as a JSON-RPC 2.0 message. Throws
/// Error(ParseError) naming the violated rule.
RpcMessage from_json(const json& doc);

/// Parses one line of wire text. Throws Error(ParseError) whose message
/// contains the offending line verbatim.
RpcMessage parse(std::string_view line);

}  // namespace mcpgw::protocol
