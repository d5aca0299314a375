#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace mcpgw::llm {

using nlohmann::json;

/// Sampling temperature used for every agent, judge and extraction call.
inline constexpr double kDefaultTemperature = 0.7;

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role r) noexcept;

struct ToolInvocation {
  std::string id;
  std::string name;
  json arguments = json::object();

  bool operator==(const ToolInvocation&) const = default;
};

struct ChatMessage {
  Role role = Role::user;
  std::string content;
  std::optional<ToolInvocation> tool_call;  // assistant turns only
  std::string tool_call_id;                 // tool turns only

  static ChatMessage system(std::string text) { return {Role::system, std::move(text), {}, {}}; }
  static ChatMessage user(std::string text) { return {Role::user, std::move(text), {}, {}}; }

  bool operator==(const ChatMessage&) const = default;
};

/// A function the model may call, in JSON-schema form.
struct ToolSchema {
  std::string name;
  std::string description;
  json parameters = json::object();
};

struct TokenUsage {
  std::int64_t prompt = 0;
  std::int64_t completion = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    prompt += o.prompt;
    completion += o.completion;
    return *this;
  }
  bool operator==(const TokenUsage&) const = default;
};

/// One model turn: free text, optionally with a single tool invocation. A turn
/// without an invocation is the model's final response.
struct AssistantTurn {
  std::string text;
  std::optional<ToolInvocation> tool_call;
  TokenUsage usage;
};

/// USD per million tokens.
struct Price {
  double prompt_per_mtok = 0.0;
  double completion_per_mtok = 0.0;

  double cost(const TokenUsage& usage) const {
    return (static_cast<double>(usage.prompt) * prompt_per_mtok +
            static_cast<double>(usage.completion) * completion_per_mtok) /
           1e6;
  }
};

/// Chat model contract. Implementations raise Error(BackendError) on failure.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  virtual AssistantTurn complete(std::span<const ChatMessage> messages, double temperature,
                                 std::span<const ToolSchema> tools) = 0;

  virtual std::string model_id() const = 0;

  virtual std::optional<Price> price() const { return std::nullopt; }
};

/// Convenience for prompt-only calls (no tools).
AssistantTurn complete_text(ChatBackend& backend, std::span<const ChatMessage> messages,
                            double temperature = kDefaultTemperature);

}  // namespace mcpgw::llm
