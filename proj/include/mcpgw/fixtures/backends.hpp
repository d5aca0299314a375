#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mcpgw/llm/chat.hpp"
#include "mcpgw/llm/embedding.hpp"

namespace mcpgw::fixtures {

inline constexpr int kScriptFormatVersion = 1;
inline constexpr std::size_t kDefaultEmbeddingDim = 64;

/// Feature-hashing embedder: lower-cased word tokens are hashed into signed
/// buckets and the result is scaled to unit length. Texts sharing words land
/// close together, which is all the ranking tests need.
class HashEmbeddingBackend final : public llm::EmbeddingBackend {
 public:
  explicit HashEmbeddingBackend(std::size_t dim = kDefaultEmbeddingDim, std::uint64_t seed = 0);

  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

  std::vector<double> embed_one(std::string_view text) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// One pre-recorded assistant turn.
struct ScriptedTurn {
  std::string text;                              // thought, or the final response
  std::optional<llm::ToolInvocation> tool_call;  // absent: final response
  std::optional<std::string> error;              // raise BackendError instead
  llm::TokenUsage usage;
};

/// Replays turns in order; once exhausted every call raises BackendError.
class ScriptedChatBackend final : public llm::ChatBackend {
 public:
  ScriptedChatBackend(std::vector<ScriptedTurn> turns, std::string model_id,
                      std::optional<llm::Price> price = std::nullopt);

  llm::AssistantTurn complete(std::span<const llm::ChatMessage> messages, double temperature,
                              std::span<const llm::ToolSchema> tools) override;
  std::string model_id() const override { return model_id_; }
  std::optional<llm::Price> price() const override { return price_; }

  std::size_t consumed() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::vector<ScriptedTurn> turns_;
  std::size_t cursor_ = 0;
  std::string model_id_;
  std::optional<llm::Price> price_;
};

/// Script file: either one `turns` list shared by every task, or a `tasks`
/// map from task id to turns with "*" as the fallback.
struct ChatScript {
  std::string model_id;
  std::optional<llm::Price> price;
  std::map<std::string, std::vector<ScriptedTurn>> per_task;

  /// Fresh backend positioned at the start of the task's script. Throws
  /// Error(ConfigError) when neither the task nor "*" has turns.
  std::unique_ptr<ScriptedChatBackend> backend_for(const std::string& task_id) const;
};

ChatScript parse_chat_script(const nlohmann::json& doc);
ChatScript load_chat_script(const std::filesystem::path& path);

/// Offline stand-in for the summarizer, key-point extractor and judge. It
/// recognizes which prompt it was given and answers by fixed rules:
///
///  - server summary: the tool list from the prompt, whitespace-collapsed and
///    truncated to 512 bytes;
///  - key points: the task split into sentences and "and"-joined clauses;
///  - evaluation: success iff the final response is non-empty and the tool
///    call history holds at least one successful execute.
class RuleBasedChatBackend final : public llm::ChatBackend {
 public:
  explicit RuleBasedChatBackend(std::string model_id = "mock-rule") : model_id_(std::move(model_id)) {}

  llm::AssistantTurn complete(std::span<const llm::ChatMessage> messages, double temperature,
                              std::span<const llm::ToolSchema> tools) override;
  std::string model_id() const override { return model_id_; }

 private:
  std::string model_id_;
};

}  // namespace mcpgw::fixtures
