#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcpgw/agent/task.hpp"
#include "mcpgw/agent/trajectory.hpp"
#include "mcpgw/eval/judge.hpp"
#include "mcpgw/eval/metrics.hpp"

namespace mcpgw::test {

struct Judged {
  std::vector<agent::Task> tasks;
  std::vector<eval::Judgment> judgments;
};

/// `rows` gives (successes, total) per domain; successes come first in each domain.
inline Judged judged_tasks(const std::vector<std::pair<agent::Domain, std::pair<int, int>>>& rows,
                           const std::string& model = "model-a", const std::string& judge = "judge-x") {
  Judged out;
  for (const auto& [domain, counts] : rows) {
    for (int i = 0; i < counts.second; ++i) {
      const auto id = std::string(agent::to_string(domain)) + "-" + std::to_string(i);
      out.tasks.push_back({id, domain, "do " + id, {"kp"}});
      eval::Judgment j;
      j.task_id = id;
      j.model_id = model;
      j.judge_model_id = judge;
      j.thoughts = "t";
      j.status = i < counts.first ? eval::Status::success : eval::Status::failure;
      out.judgments.push_back(j);
    }
  }
  return out;
}

/// Trajectory whose stats come out as exactly (steps, tools, executes, routes).
/// Needs steps > executes + routes, and tools <= executes.
inline agent::Trajectory trajectory_with(const std::string& task_id, const std::string& model,
                                         std::size_t steps, std::size_t tools, std::size_t executes,
                                         std::size_t routes) {
  agent::Trajectory t;
  t.task_id = task_id;
  t.model_id = model;
  t.terminal = agent::Terminal::responded;
  std::uint64_t seq = 0;
  auto add_step = [&](agent::StepAction a, std::optional<std::uint64_t> record) {
    agent::Step s;
    s.index = t.steps.size();
    s.action = a;
    s.record_seq = record;
    s.action_payload = {{"tool", "x"}, {"arguments", nlohmann::json::object()}};
    s.observation = "obs";
    t.steps.push_back(s);
  };
  for (std::size_t i = 0; i < routes; ++i) {
    copilot::ToolCallRecord r;
    r.seq = ++seq;
    r.action = copilot::Action::route;
    r.request = {{"query", "q"}};
    r.outcome = copilot::Outcome::ok;
    t.tool_call_records.push_back(r);
    add_step(agent::StepAction::route, r.seq);
  }
  for (std::size_t i = 0; i < executes; ++i) {
    copilot::ToolCallRecord r;
    r.seq = ++seq;
    r.action = copilot::Action::execute;
    const bool ok = tools > 0;
    r.request = {{"server_name", "srv"}, {"tool_name", "tool" + std::to_string(ok ? i % tools : 0)},
                 {"params", nlohmann::json::object()}};
    r.outcome = ok ? copilot::Outcome::ok : copilot::Outcome::tool_error;
    t.tool_call_records.push_back(r);
    add_step(agent::StepAction::execute, r.seq);
  }
  while (t.steps.size() + 1 < steps) add_step(agent::StepAction::execute, std::nullopt);
  agent::Step last;
  last.index = t.steps.size();
  last.action = agent::StepAction::response;
  last.action_payload = {{"text", "done"}};
  t.steps.push_back(last);
  return t;
}

/// `n` trajectories whose per-column sums equal the given totals, spread as
/// evenly as integers allow.
inline std::vector<agent::Trajectory> trajectories_summing_to(std::size_t n, const std::string& model,
                                                              std::size_t steps, std::size_t tools,
                                                              std::size_t executes, std::size_t routes) {
  auto share = [n](std::size_t total, std::size_t i) { return total / n + (i < total % n ? 1 : 0); };
  std::vector<agent::Trajectory> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(trajectory_with("task-" + std::to_string(i), model, share(steps, i), share(tools, i),
                                  share(executes, i), share(routes, i)));
  }
  return out;
}

}  // namespace mcpgw::test
