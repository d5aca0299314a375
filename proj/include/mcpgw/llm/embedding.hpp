#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mcpgw::llm {

/// Text embedding contract. Implementations raise Error(BackendError) on
/// failure. Results must not depend on how texts are batched.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  /// Stable identifier recorded in catalogs, e.g. "hash-v1:64:seed=0".
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
};

}  // namespace mcpgw::llm
