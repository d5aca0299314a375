#include "mcpgw/fixtures/backends.hpp"

#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/prompts.hpp"
#include "mcpgw/util/files.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::fixtures {

using nlohmann::json;

// ---------------------------------------------------------------------------
// HashEmbeddingBackend

HashEmbeddingBackend::HashEmbeddingBackend(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw Error(Errc::InvalidArgument, "embedding dimension must be positive");
}

std::string HashEmbeddingBackend::id() const {
  return fmt::format("hash-v1:dim={}:seed={}", dim_, seed_);
}

std::vector<double> HashEmbeddingBackend::embed_one(std::string_view text) const {
  std::vector<double> v(dim_, 0.0);
  const std::uint64_t basis = util::fnv1a64(std::to_string(seed_));
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = util::fnv1a64(token, basis);
    v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();

  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    // No tokens (or perfect cancellation): a fixed basis vector keeps the
    // output unit length and deterministic.
    v[util::fnv1a64(text, basis) % dim_] = 1.0;
    return v;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> HashEmbeddingBackend::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

// ---------------------------------------------------------------------------
// ScriptedChatBackend

ScriptedChatBackend::ScriptedChatBackend(std::vector<ScriptedTurn> turns, std::string model_id,
                                         std::optional<llm::Price> price)
    : turns_(std::move(turns)), model_id_(std::move(model_id)), price_(price) {}

llm::AssistantTurn ScriptedChatBackend::complete(std::span<const llm::ChatMessage>, double,
                                                 std::span<const llm::ToolSchema>) {
  std::lock_guard lock(mutex_);
  if (cursor_ >= turns_.size()) {
    throw Error(Errc::BackendError,
                fmt::format("script exhausted after {} turns", turns_.size()));
  }
  const ScriptedTurn& turn = turns_[cursor_++];
  if (turn.error) throw Error(Errc::BackendError, *turn.error);
  llm::AssistantTurn out;
  out.text = turn.text;
  out.tool_call = turn.tool_call;
  out.usage = turn.usage;
  return out;
}

std::size_t ScriptedChatBackend::consumed() const {
  std::lock_guard lock(mutex_);
  return cursor_;
}

std::size_t ScriptedChatBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return turns_.size() - cursor_;
}

namespace {

[[noreturn]] void bad_script(const std::string& where, const std::string& why) {
  throw Error(Errc::ConfigError, fmt::format("script {}: {}", where, why));
}

std::vector<ScriptedTurn> parse_turns(const json& list, const std::string& where) {
  if (!list.is_array()) bad_script(where, "turns must be an array");
  std::vector<ScriptedTurn> turns;
  std::size_t call_serial = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& t = list[i];
    const std::string at = fmt::format("{}[{}]", where, i);
    if (!t.is_object()) bad_script(at, "turn must be an object");
    ScriptedTurn turn;
    if (t.contains("error")) {
      turn.error = t["error"].get<std::string>();
    } else if (t.contains("tool")) {
      llm::ToolInvocation inv;
      inv.name = t["tool"].get<std::string>();
      inv.id = t.value("id", fmt::format("call_{}", ++call_serial));
      inv.arguments = t.value("arguments", json::object());
      turn.text = t.value("thought", std::string{});
      turn.tool_call = std::move(inv);
    } else if (t.contains("response")) {
      turn.text = t["response"].get<std::string>();
    } else {
      bad_script(at, "turn needs one of 'tool', 'response' or 'error'");
    }
    if (auto u = t.find("usage"); u != t.end()) {
      turn.usage.prompt = u->value("prompt", std::int64_t{0});
      turn.usage.completion = u->value("completion", std::int64_t{0});
    }
    turns.push_back(std::move(turn));
  }
  return turns;
}

}  // namespace

ChatScript parse_chat_script(const json& doc) {
  try {
    if (!doc.is_object()) bad_script("<root>", "must be an object");
    if (doc.value("format_version", 0) != kScriptFormatVersion) {
      bad_script("format_version", fmt::format("expected {}", kScriptFormatVersion));
    }
    ChatScript script;
    script.model_id = doc.value("model_id", std::string{"scripted"});
    if (auto p = doc.find("price"); p != doc.end()) {
      script.price = llm::Price{p->value("prompt_per_mtok", 0.0), p->value("completion_per_mtok", 0.0)};
    }
    if (auto turns = doc.find("turns"); turns != doc.end()) {
      script.per_task["*"] = parse_turns(*turns, "turns");
    }
    if (auto tasks = doc.find("tasks"); tasks != doc.end()) {
      if (!tasks->is_object()) bad_script("tasks", "must be an object");
      for (const auto& [id, turns] : tasks->items()) {
        script.per_task[id] = parse_turns(turns, "tasks." + id);
      }
    }
    if (script.per_task.empty()) bad_script("<root>", "needs 'turns' or 'tasks'");
    return script;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, fmt::format("script: {}", e.what()));
  }
}

ChatScript load_chat_script(const std::filesystem::path& path) {
  return parse_chat_script(util::read_json_file(path, Errc::ConfigError));
}

std::unique_ptr<ScriptedChatBackend> ChatScript::backend_for(const std::string& task_id) const {
  auto it = per_task.find(task_id);
  if (it == per_task.end()) it = per_task.find("*");
  if (it == per_task.end()) {
    throw Error(Errc::ConfigError, fmt::format("script has no turns for task '{}'", task_id));
  }
  return std::make_unique<ScriptedChatBackend>(it->second, model_id, price);
}

// ---------------------------------------------------------------------------
// RuleBasedChatBackend

namespace {

std::string between(std::string_view text, std::string_view start, std::string_view end) {
  const auto s = text.find(start);
  if (s == std::string_view::npos) return {};
  const auto from = s + start.size();
  const auto e = end.empty() ? std::string_view::npos : text.find(end, from);
  return std::string(text.substr(from, e == std::string_view::npos ? std::string_view::npos : e - from));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : util::trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string summarize(std::string_view prompt) {
  std::string tools = collapse_whitespace(
      between(prompt, "**Available Tools:**", "\n\nPlease return only"));
  if (tools.empty()) tools = collapse_whitespace(between(prompt, "**Server Description:**", "\n\n"));
  if (tools.empty()) tools = collapse_whitespace(between(prompt, "**Server Name:**", "\n\n"));
  constexpr std::size_t kMax = 512;
  if (tools.size() > kMax) {
    auto cut = tools.rfind(' ', kMax);
    tools.resize(cut == std::string::npos || cut == 0 ? kMax : cut);
  }
  return tools.empty() ? std::string("MCP server") : tools;
}

std::vector<std::string> split_clauses(std::string_view task) {
  std::vector<std::string> sentences;
  std::string cur;
  for (char c : task) {
    if (c == '.' || c == ';' || c == '!' || c == '?' || c == '\n') {
      sentences.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  sentences.push_back(cur);

  std::vector<std::string> clauses;
  for (const auto& s : sentences) {
    std::string_view rest = s;
    while (true) {
      std::size_t cut = std::string_view::npos;
      std::size_t skip = 0;
      for (std::string_view sep : {std::string_view(", and "), std::string_view(", then "),
                                   std::string_view(" and then ")}) {
        const auto p = rest.find(sep);
        if (p != std::string_view::npos && p < cut) {
          cut = p;
          skip = sep.size();
        }
      }
      const auto piece = collapse_whitespace(rest.substr(0, cut));
      if (!piece.empty()) clauses.push_back(piece);
      if (cut == std::string_view::npos) break;
      rest.remove_prefix(cut + skip);
    }
  }
  return clauses;
}

std::string judge_by_rule(std::string_view prompt) {
  const std::string response =
      std::string(util::trim(between(prompt, "Final Response: ", "\n\nTool Call History: ")));
  const std::string history = between(prompt, "Tool Call History: ", "\n\nTool Descriptions: ");
  bool executed = false;
  const json calls = json::parse(history, nullptr, /*allow_exceptions=*/false);
  if (calls.is_array()) {
    for (const auto& c : calls) {
      if (c.is_object() && c.value("action", "") == "execute" && c.value("outcome", "") == "ok") {
        executed = true;
      }
    }
  }
  const bool ok = executed && !response.empty();
  return fmt::format("Thoughts: final response {}; {} successful tool execution in the history.\n"
                     "Status: {}",
                     response.empty() ? "is empty" : "is present",
                     executed ? "found a" : "found no", ok ? "success" : "failure");
}

}  // namespace

llm::AssistantTurn RuleBasedChatBackend::complete(std::span<const llm::ChatMessage> messages,
                                                  double, std::span<const llm::ToolSchema>) {
  std::string_view system;
  std::string_view user;
  for (const auto& m : messages) {
    if (m.role == llm::Role::system) system = m.content;
    if (m.role == llm::Role::user) user = m.content;
  }
  llm::AssistantTurn turn;
  if (system == prompts::kKeyPointsSystem) {
    std::string out = "Key Points:\n";
    std::size_t n = 0;
    for (const auto& clause : split_clauses(user)) out += fmt::format("{}. {}\n", ++n, clause);
    turn.text = out;
  } else if (system == prompts::kEvaluationSystem) {
    turn.text = judge_by_rule(user);
  } else if (user.find("**Available Tools:**") != std::string_view::npos) {
    turn.text = summarize(user);
  } else {
    turn.text = "I have no rule for this prompt.";
  }
  return turn;
}

}  // namespace mcpgw::fixtures
