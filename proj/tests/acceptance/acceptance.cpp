// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "mcpgw/cli/commands.hpp"
#include "mcpgw/cli/config.hpp"
#include "mcpgw/cli/manifest.hpp"
#include "mcpgw/copilot/gateway.hpp"
#include "mcpgw/util/files.hpp"
#include "properties.hpp"

namespace mcpgw::test {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

Failure first_of(std::initializer_list<std::function<Failure()>> checks) {
  for (const auto& c : checks) {
    if (auto f = c()) return f;
  }
  return std::nullopt;
}

Failure expect(bool ok, const std::string& what) {
  if (ok) return std::nullopt;
  return what;
}

// 1
Failure protocol_round_trip() {
  Rng rng(1001);
  return first_of({[&] { return check_protocol_round_trip(rng, 1000); },
                   [&] { return check_framer_fuzz(rng, 5000); }});
}

// 2
Failure retrieval_oracle() {
  Rng rng(1002);
  return check_route_oracle(rng, 100, 20, 200, 5);
}

// 3
Failure retry_discipline() {
  TempDir dir;
  auto fleet = mock_fleet();
  auto flaky = [](const std::string& name, int fails) {
    auto t = simple_tool(name, "Flaky operation " + name + ".");
    t["fail_count"] = fails;
    return t;
  };
  auto semantic = simple_tool("reject", "Always rejects its input.");
  semantic["error"] = "parameter 'x' must be positive";
  fleet.push_back(mock_config(dir.path(), behavior("flaky", json::array({flaky("fail_twice", 2),
                                                                          flaky("fail_thrice", 3), semantic}))));
  fixtures::HashEmbeddingBackend emb;
  fixtures::RuleBasedChatBackend chat;
  const retrieval::Router router(retrieval::attach_embeddings(catalog::build_catalog(fleet, chat), emb), emb);
  copilot::GatewayConfig config;
  config.launch.call_timeout = 300ms;
  copilot::GatewaySession s(router, fleet, config);

  const auto twice = s.handle_execute({"flaky", "fail_twice", nullptr});
  if (twice.outcome != copilot::Outcome::ok || twice.attempts != 3) {
    return fmt::format("fail-twice: outcome {}, attempts {}", copilot::to_string(twice.outcome), twice.attempts);
  }
  try {
    s.handle_execute({"flaky", "fail_thrice", nullptr});
    return std::string("fail-thrice returned instead of raising TransportExhausted");
  } catch (const Error& e) {
    if (e.code() != Errc::TransportExhausted) return fmt::format("fail-thrice raised {}", to_string(e.code()));
  }
  if (s.records().back().attempts != 3) return fmt::format("fail-thrice made {} attempts", s.records().back().attempts);
  const auto rejected = s.handle_execute({"flaky", "reject", {{"x", -1}}});
  return expect(rejected.outcome == copilot::Outcome::tool_error && rejected.attempts == 1,
                fmt::format("semantic error: outcome {}, attempts {}", copilot::to_string(rejected.outcome),
                            rejected.attempts));
}

// 4
Failure end_to_end() {
  TempDir dir;
  auto config = cli::load_config(fixtures_dir() / "config" / "offline.json");
  for (const auto* spec : {&config.agent_backend, &config.judge_backend, &config.summary_backend}) {
    if (spec->rfind("mock-", 0) != 0) return "offline config names a networked backend: " + *spec;
  }
  if (config.embedding_backend != "hash") return "offline config names a networked embedder";
  std::ostringstream msg;
  if (cli::cmd_index(config, dir / "idx", msg) != 0) return "index failed: " + msg.str();
  config.catalog = dir / "idx" / "catalog.json";
  if (cli::cmd_run(config, dir / "run", nullptr, msg) != 0) return "run failed: " + msg.str();
  if (cli::cmd_judge(config, dir / "run", dir / "run", false, msg) != 0) return "judge failed: " + msg.str();
  if (cli::cmd_report({dir / "run"}, std::nullopt, std::nullopt, dir / "rep", msg) != 0) return "report failed";

  const auto manifest = cli::load_manifest(dir / "run");
  std::size_t trajectories = 0;
  for (const auto& e : manifest.entries) {
    if (!e.trajectory) return "no trajectory for " + e.task_id;
    agent::validate(agent::load_trajectory(dir / "run" / *e.trajectory));
    ++trajectories;
  }
  const auto judged = eval::load_judgments(dir / "run" / "judgments.json");
  return first_of({[&] { return expect(trajectories == 3, fmt::format("{} trajectories", trajectories)); },
                   [&] { return expect(judged.judgments.size() == 3, fmt::format("{} judgments", judged.judgments.size())); },
                   [&] { return expect(fs::exists(dir / "rep" / "report.txt") && fs::exists(dir / "rep" / "report.json"),
                                       "report files missing"); }});
}

// 5
Failure domain_table() {
  const auto j = judged_tasks({{agent::Domain::Office, {28, 31}},
                               {agent::Domain::Leisure, {9, 14}},
                               {agent::Domain::Travel, {9, 12}},
                               {agent::Domain::Lifestyle, {12, 15}},
                               {agent::Domain::Finance, {11, 14}},
                               {agent::Domain::Shopping, {6, 9}}});
  const auto row = eval::success_rates(j.judgments, j.tasks);
  const std::vector<std::string> want = {"90.32", "64.29", "75.00", "80.00", "78.57", "66.67"};
  std::vector<std::string> got;
  for (auto d : eval::kTableDomains) got.push_back(row.domains.at(d).str());
  if (got != want) return fmt::format("domains {} != {}", fmt::join(got, " "), fmt::join(want, " "));
  return expect(row.overall.str() == "78.95", "overall " + row.overall.str());
}

// 6
Failure efficiency_means() {
  const auto ts = trajectories_summing_to(95, "model-a", 1909, 257, 531, 283);
  for (const auto& t : ts) agent::validate(t);
  const auto rows = eval::efficiency_table(ts, {});
  if (rows.size() != 1 || rows[0].trajectories != 95) return std::string("expected one row over 95 trajectories");
  const auto& r = rows[0];
  const bool ok = std::abs(r.steps - 20.09) <= 0.01 && std::abs(r.tools - 2.71) <= 0.01 &&
                  std::abs(r.executes - 5.59) <= 0.01 && std::abs(r.routes - 2.98) <= 0.01;
  return expect(ok, fmt::format("means ({:.4f}, {:.4f}, {:.4f}, {:.4f})", r.steps, r.tools, r.executes, r.routes));
}

// 7
Failure agreement() {
  const auto j = judged_tasks({{agent::Domain::Office, {40, 95}}});
  auto labels_with = [&](std::size_t flipped) {
    std::vector<eval::HumanLabel> out;
    for (std::size_t i = 0; i < j.judgments.size(); ++i) {
      eval::HumanLabel l;
      l.task_id = j.judgments[i].task_id;
      l.status = j.judgments[i].status;
      if (i < flipped) l.status = l.status == eval::Status::success ? eval::Status::failure : eval::Status::success;
      out.push_back(l);
    }
    return out;
  };
  const auto partial = eval::agreement_rate(j.judgments, labels_with(18)).at("judge-x");
  const auto same = eval::agreement_rate(j.judgments, labels_with(0)).at("judge-x");
  const auto none = eval::agreement_rate(j.judgments, labels_with(95)).at("judge-x");
  return expect(partial == eval::Rate{77, 95} && partial.str() == "81.05" && same.str() == "100.00" &&
                    none.str() == "0.00",
                fmt::format("{} / {} / {}", partial.str(), same.str(), none.str()));
}

// 8
Failure pareto() {
  Rng rng(1008);
  return check_pareto(rng, 1000);
}

// 9
Failure verdict_totality() {
  Rng rng(1009);
  std::size_t parsed = 0;
  if (auto f = check_verdict_totality(rng, 10000, &parsed)) return f;
  return expect(parsed > 0 && parsed < 10000, fmt::format("{} of 10000 parsed; generator is one-sided", parsed));
}

// 10
Failure invariants() {
  Rng rng(1010);
  return first_of({[&] { return check_weight_degeneracy(rng, 200); },
                   [&] { return check_monotonicity(rng, 300); },
                   [&] { return check_agent_safety(rng, 100); },
                   [&] { return check_aggregation(rng, 1000); }});
}

struct Criterion {
  int number;
  std::string name;
  std::function<Failure()> run;
  std::chrono::seconds limit{0};  // 0: no time bound
};

int run_all() {
  const std::vector<Criterion> criteria = {
      {1, "protocol round-trip and framer fuzz", protocol_round_trip, 10s},
      {2, "retrieval matches exhaustive oracle", retrieval_oracle, 60s},
      {3, "retry discipline", retry_discipline},
      {4, "end-to-end offline run", end_to_end, 30s},
      {5, "per-domain success table arithmetic", domain_table},
      {6, "efficiency means arithmetic", efficiency_means},
      {7, "human agreement arithmetic", agreement},
      {8, "pareto frontier matches brute force", pareto, 10s},
      {9, "judge verdict parser totality", verdict_totality},
      {10, "invariant suite", invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Failure f;
    try {
      f = c.run();
    } catch (const std::exception& e) {
      f = std::string("unexpected exception: ") + e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    if (!f && c.limit.count() > 0 && ms > c.limit) f = fmt::format("took {} ms, limit {} s", ms.count(), c.limit.count());
    if (f) {
      ++failed;
      std::cout << fmt::format("FAIL {} {}: {}\n", c.number, c.name, *f);
    } else {
      std::cout << fmt::format("PASS {} {} ({} ms)\n", c.number, c.name, ms.count());
    }
    std::cout.flush();
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace mcpgw::test

int main() {
  spdlog::set_level(spdlog::level::off);
  return mcpgw::test::run_all();
}
