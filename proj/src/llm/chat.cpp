#include "mcpgw/llm/chat.hpp"

namespace mcpgw::llm {

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
  }
  return "user";
}

AssistantTurn complete_text(ChatBackend& backend, std::span<const ChatMessage> messages,
                            double temperature) {
  return backend.complete(messages, temperature, {});
}

}  // namespace mcpgw::llm
