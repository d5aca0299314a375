#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcpgw/catalog/catalog.hpp"
#include "mcpgw/llm/embedding.hpp"

namespace mcpgw::retrieval {

inline constexpr std::size_t kDefaultTopK = 5;

struct RouteQuery {
  std::string server_part;  // platform / permission domain
  std::string tool_part;    // operation + target
  std::string raw;

  bool operator==(const RouteQuery&) const = default;
};

/// Extracts the server and tool lines from a <tool_assistant> block. Text after
/// '#' on either line is dropped. Throws Error(QueryFormatError) naming the
/// missing piece: "block", "server line" or "tool line".
RouteQuery parse_route_query(std::string_view raw);

/// Fixed-dimension vector scaled to unit length on construction.
class EmbeddingVector {
 public:
  /// Throws Error(InvalidArgument) for an empty or all-zero input.
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Dot product of two unit vectors, clamped to [-1, 1].
/// Throws Error(DimensionMismatch) when the sizes differ.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct RouteWeights {
  double server = 0.5;
  double tool = 0.5;

  /// Both non-negative and summing to 1 (within 1e-9). Throws InvalidArgument.
  void validate() const;
};

struct RankedCandidate {
  std::string server_name;
  std::string tool_name;
  double score = 0;
  double server_sim = 0;
  double tool_sim = 0;

  bool operator==(const RankedCandidate&) const = default;
};

/// Result order: score descending, then server_name, then tool_name.
bool ranks_before(const RankedCandidate& a, const RankedCandidate& b) noexcept;

/// One candidate per catalog tool, in catalog order.
std::vector<RankedCandidate> score_all(const catalog::Catalog& catalog,
                                       std::span<const double> query_server,
                                       std::span<const double> query_tool,
                                       const RouteWeights& weights);

/// The first k candidates under ranks_before.
std::vector<RankedCandidate> top_k(std::vector<RankedCandidate> candidates, std::size_t k);

/// Embeds every server summary and tool description and attaches the vectors.
catalog::Catalog attach_embeddings(const catalog::Catalog& catalog,
                                   llm::EmbeddingBackend& backend, std::size_t batch_size = 64);

/// Full route: embeds both query halves and ranks the catalog.
///   EmptyCatalog      - no tools
///   InvalidArgument   - bad weights, k == 0, or no embeddings attached
///   DimensionMismatch - backend does not match the catalog's embeddings
std::vector<RankedCandidate> route(const catalog::Catalog& catalog, const RouteQuery& query,
                                   llm::EmbeddingBackend& backend, std::size_t k = kDefaultTopK,
                                   const RouteWeights& weights = {});

/// Thin holder for the per-gateway route configuration.
class Router {
 public:
  Router(catalog::Catalog catalog, llm::EmbeddingBackend& backend, std::size_t k = kDefaultTopK,
         RouteWeights weights = {});

  std::vector<RankedCandidate> route(const RouteQuery& query) const;
  const catalog::Catalog& catalog() const noexcept { return catalog_; }
  std::size_t k() const noexcept { return k_; }
  const RouteWeights& weights() const noexcept { return weights_; }

 private:
  catalog::Catalog catalog_;
  llm::EmbeddingBackend* backend_;
  std::size_t k_;
  RouteWeights weights_;
};

// --- observation text -------------------------------------------------------

std::string escape_markup(std::string_view text);
std::string unescape_markup(std::string_view text);

/// One <candidate> block per entry, in the given order.
std::string render_route_result(const catalog::Catalog& catalog,
                                const std::vector<RankedCandidate>& candidates);

struct RenderedCandidate {
  std::string server_name;
  std::string tool_name;
  std::string description;
  std::string schema;  // compact JSON text

  bool operator==(const RenderedCandidate&) const = default;
};

/// Inverse of render_route_result. Throws Error(ParseError) on malformed text.
std::vector<RenderedCandidate> parse_route_result(std::string_view text);

}  // namespace mcpgw::retrieval
