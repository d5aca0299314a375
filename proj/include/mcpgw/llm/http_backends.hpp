#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "mcpgw/llm/chat.hpp"
#include "mcpgw/llm/embedding.hpp"

namespace mcpgw::llm {

/// Endpoint of an OpenAI-compatible HTTP API. `base_url` includes the version
/// prefix, e.g. "https://openrouter.ai/api/v1".
struct HttpEndpoint {
  std::string base_url;
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{120};
};

/// Reads `<prefix>_BASE_URL`, `<prefix>_API_KEY` and `<prefix>_MODEL`.
/// Throws Error(ConfigError) when the URL or model is missing.
HttpEndpoint endpoint_from_env(const std::string& prefix);

/// Request body for POST {base}/chat/completions.
json chat_completions_request(const std::string& model, std::span<const ChatMessage> messages,
                              double temperature, std::span<const ToolSchema> tools);

/// Reads the first choice. Only the first tool call of a turn is kept.
/// Throws Error(BackendError) on a malformed body.
AssistantTurn parse_chat_completions_response(const json& body);

class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpEndpoint endpoint, std::optional<Price> price = std::nullopt)
      : endpoint_(std::move(endpoint)), price_(price) {}

  AssistantTurn complete(std::span<const ChatMessage> messages, double temperature,
                         std::span<const ToolSchema> tools) override;
  std::string model_id() const override { return endpoint_.model; }
  std::optional<Price> price() const override { return price_; }

 private:
  HttpEndpoint endpoint_;
  std::optional<Price> price_;
};

/// POST {base}/embeddings. Vectors are returned as delivered; callers
/// normalize.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  HttpEmbeddingBackend(HttpEndpoint endpoint, std::size_t dim)
      : endpoint_(std::move(endpoint)), dim_(dim) {}

  std::string id() const override { return "http:" + endpoint_.model; }
  std::size_t dim() const override { return dim_; }
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

 private:
  HttpEndpoint endpoint_;
  std::size_t dim_;
};

/// POSTs a JSON body and returns the parsed JSON response. Non-2xx statuses
/// and transport failures raise Error(BackendError).
json post_json(const HttpEndpoint& endpoint, const std::string& path, const json& body);

}  // namespace mcpgw::llm
