#include "mcpgw/retrieval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::retrieval {

namespace {

constexpr std::string_view kOpenTag = "<tool_assistant>";
constexpr std::string_view kCloseTag = "</tool_assistant>";

std::string strip_comment(std::string_view v) {
  if (auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
  return std::string(util::trim(v));
}

std::vector<double> normalized(std::vector<double> v) {
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (v.empty() || norm == 0 || !std::isfinite(norm)) {
    throw Error(Errc::InvalidArgument, "cannot normalize an empty or zero vector");
  }
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

RouteQuery parse_route_query(std::string_view raw) {
  const auto open = raw.find(kOpenTag);
  const auto close = open == std::string_view::npos ? open : raw.find(kCloseTag, open);
  if (open == std::string_view::npos || close == std::string_view::npos) {
    throw Error(Errc::QueryFormatError,
                "query is missing the <tool_assistant>...</tool_assistant> block");
  }
  const auto body = raw.substr(open + kOpenTag.size(), close - open - kOpenTag.size());

  std::optional<std::string> server, tool;
  for (auto line : util::split_lines(body)) {
    line = util::trim(line);
    if (!server && util::starts_with_ci(line, "server:")) {
      server = strip_comment(line.substr(7));
    } else if (!tool && util::starts_with_ci(line, "tool:")) {
      tool = strip_comment(line.substr(5));
    }
  }
  if (!server || server->empty()) {
    throw Error(Errc::QueryFormatError, "query block is missing a non-empty 'server:' line (server line)");
  }
  if (!tool || tool->empty()) {
    throw Error(Errc::QueryFormatError, "query block is missing a non-empty 'tool:' line (tool line)");
  }
  return {std::move(*server), std::move(*tool), std::string(raw)};
}

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(normalized(std::move(values))) {}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("cannot compare vectors of dimension {} and {}", a.size(), b.size()));
  }
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine(std::span<const double>(a.values()), std::span<const double>(b.values()));
}

void RouteWeights::validate() const {
  if (!(server >= 0) || !(tool >= 0) || std::abs(server + tool - 1.0) > 1e-9) {
    throw Error(Errc::InvalidArgument,
                fmt::format("route weights must be non-negative and sum to 1 (got {}, {})", server, tool));
  }
}

bool ranks_before(const RankedCandidate& a, const RankedCandidate& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.server_name, a.tool_name) < std::tie(b.server_name, b.tool_name);
}

std::vector<RankedCandidate> score_all(const catalog::Catalog& catalog,
                                       std::span<const double> query_server,
                                       std::span<const double> query_tool,
                                       const RouteWeights& weights) {
  const auto& index = catalog.embeddings();
  if (!index) throw Error(Errc::InvalidArgument, "catalog has no embeddings attached");

  // Server similarity is shared by every tool on that server.
  std::vector<double> server_sims;
  server_sims.reserve(catalog.servers().size());
  for (const auto& v : index->server_vectors) server_sims.push_back(cosine(query_server, v));

  std::vector<RankedCandidate> out;
  out.reserve(catalog.tools().size());
  std::size_t s = 0;
  const auto& servers = catalog.servers();
  for (std::size_t i = 0; i < catalog.tools().size(); ++i) {
    const auto& t = catalog.tools()[i];
    while (servers[s].server_name != t.server_name) ++s;  // both sorted by server name
    RankedCandidate c{t.server_name, t.tool_name, 0, server_sims[s],
                      cosine(query_tool, index->tool_vectors[i])};
    c.score = weights.server * c.server_sim + weights.tool * c.tool_sim;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RankedCandidate> top_k(std::vector<RankedCandidate> candidates, std::size_t k) {
  k = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), ranks_before);
  candidates.resize(k);
  return candidates;
}

catalog::Catalog attach_embeddings(const catalog::Catalog& catalog,
                                   llm::EmbeddingBackend& backend, std::size_t batch_size) {
  batch_size = std::max<std::size_t>(batch_size, 1);
  auto embed_all = [&](const std::vector<std::string>& texts) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < texts.size(); i += batch_size) {
      const auto n = std::min(batch_size, texts.size() - i);
      auto batch = backend.embed(std::span(texts).subspan(i, n));
      if (batch.size() != n) {
        throw Error(Errc::BackendError,
                    fmt::format("embedding backend returned {} vectors for {} texts", batch.size(), n));
      }
      for (auto& v : batch) {
        if (v.size() != backend.dim()) {
          throw Error(Errc::DimensionMismatch,
                      fmt::format("embedding backend returned dimension {} (declared {})", v.size(),
                                  backend.dim()));
        }
        out.push_back(EmbeddingVector(std::move(v)).values());
      }
    }
    return out;
  };

  std::vector<std::string> summaries, descriptions;
  for (const auto& s : catalog.servers()) summaries.push_back(s.summary.summary_text);
  for (const auto& t : catalog.tools()) descriptions.push_back(t.description);

  return catalog.with_embeddings(
      {backend.id(), backend.dim(), embed_all(summaries), embed_all(descriptions)});
}

std::vector<RankedCandidate> route(const catalog::Catalog& catalog, const RouteQuery& query,
                                   llm::EmbeddingBackend& backend, std::size_t k,
                                   const RouteWeights& weights) {
  weights.validate();
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be positive");
  if (catalog.tools().empty()) throw Error(Errc::EmptyCatalog, "catalog has no tools to route to");
  const auto& index = catalog.embeddings();
  if (!index) throw Error(Errc::InvalidArgument, "catalog has no embeddings attached");
  if (index->dim != backend.dim()) {
    throw Error(Errc::DimensionMismatch,
                fmt::format("catalog embeddings have dimension {}, backend produces {}", index->dim,
                            backend.dim()));
  }
  if (index->backend_id != backend.id()) {
    throw Error(Errc::InvalidArgument,
                fmt::format("catalog was embedded with '{}' but the router uses '{}'",
                            index->backend_id, backend.id()));
  }

  const std::vector<std::string> texts{query.server_part, query.tool_part};
  auto vecs = backend.embed(texts);
  if (vecs.size() != 2) throw Error(Errc::BackendError, "embedding backend returned wrong count");
  const EmbeddingVector qs(std::move(vecs[0])), qt(std::move(vecs[1]));
  return top_k(score_all(catalog, qs.values(), qt.values(), weights), k);
}

Router::Router(catalog::Catalog catalog, llm::EmbeddingBackend& backend, std::size_t k,
               RouteWeights weights)
    : catalog_(std::move(catalog)), backend_(&backend), k_(k), weights_(weights) {
  weights_.validate();
  if (k_ == 0) throw Error(Errc::InvalidArgument, "k must be positive");
}

std::vector<RankedCandidate> Router::route(const RouteQuery& query) const {
  return retrieval::route(catalog_, query, *backend_, k_, weights_);
}

// ---------------------------------------------------------------------------

std::string escape_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '&') {
      if (text.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (text.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (text.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
    }
    out += text[i++];
  }
  return out;
}

std::string render_route_result(const catalog::Catalog& catalog,
                                const std::vector<RankedCandidate>& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto* tool = catalog.find_tool(c.server_name, c.tool_name);
    if (!tool) {
      throw Error(Errc::NotFound,
                  fmt::format("candidate '{}/{}' is not in the catalog", c.server_name, c.tool_name));
    }
    if (i) out += '\n';
    out += fmt::format(
        "<candidate rank=\"{}\" score=\"{:.4f}\">\n"
        "<server_name>{}</server_name>\n"
        "<tool_name>{}</tool_name>\n"
        "<description>{}</description>\n"
        "<input_schema>{}</input_schema>\n"
        "</candidate>\n",
        i + 1, c.score, escape_markup(c.server_name), escape_markup(c.tool_name),
        escape_markup(tool->description), escape_markup(tool->input_schema.dump()));
  }
  return out;
}

std::vector<RenderedCandidate> parse_route_result(std::string_view text) {
  auto field = [](std::string_view block, std::string_view name) {
    const std::string open = fmt::format("<{}>", name), close = fmt::format("</{}>", name);
    const auto a = block.find(open);
    const auto b = a == std::string_view::npos ? a : block.find(close, a);
    if (b == std::string_view::npos) {
      throw Error(Errc::ParseError, fmt::format("candidate block lacks <{}>", name));
    }
    return unescape_markup(block.substr(a + open.size(), b - a - open.size()));
  };

  std::vector<RenderedCandidate> out;
  std::size_t pos = 0;
  while ((pos = text.find("<candidate ", pos)) != std::string_view::npos) {
    const auto end = text.find("</candidate>", pos);
    if (end == std::string_view::npos) throw Error(Errc::ParseError, "unterminated candidate block");
    const auto block = text.substr(pos, end - pos);
    out.push_back({field(block, "server_name"), field(block, "tool_name"),
                   field(block, "description"), field(block, "input_schema")});
    pos = end;
  }
  return out;
}

}  // namespace mcpgw::retrieval
