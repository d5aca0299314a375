#include "mcpgw/agent/runner.hpp"

#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mcpgw/error.hpp"
#include "mcpgw/prompts.hpp"
#include "mcpgw/util/parallel.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::agent {

namespace {

std::vector<llm::ToolSchema> gateway_schemas() {
  std::vector<llm::ToolSchema> out;
  for (const auto& t : copilot::meta_tools()) out.push_back({t.name, t.description, t.input_schema});
  return out;
}

std::optional<llm::AssistantTurn> complete_with_retry(llm::ChatBackend& chat,
                                                      const std::vector<llm::ChatMessage>& messages,
                                                      const std::vector<llm::ToolSchema>& tools,
                                                      const RunOptions& options,
                                                      std::string& last_error) {
  auto delay = options.backoff;
  const int attempts = std::max(options.backend_attempts, 1);
  for (int i = 1; i <= attempts; ++i) {
    try {
      return chat.complete(messages, options.temperature, tools);
    } catch (const std::exception& e) {
      last_error = e.what();
      spdlog::warn("backend '{}' failed (attempt {}/{}): {}", chat.model_id(), i, attempts, e.what());
    }
    if (i < attempts && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  return std::nullopt;
}

}  // namespace

Trajectory run_task(const Task& task, copilot::GatewaySession& gateway, llm::ChatBackend& chat,
                    const RunOptions& options) {
  if (options.budget == 0) throw Error(Errc::InvalidArgument, "step budget must be at least 1");

  Trajectory traj;
  traj.task_id = task.task_id;
  traj.model_id = chat.model_id();
  traj.started = util::utc_timestamp_now();

  const auto tools = gateway_schemas();
  std::vector<llm::ChatMessage> messages{llm::ChatMessage::system(std::string(prompts::kCopilotSystem)),
                                         llm::ChatMessage::user(task.instruction)};
  const auto first_record = gateway.records().size();

  traj.terminal = Terminal::budget_exhausted;
  while (traj.steps.size() < options.budget) {
    std::string backend_error;
    auto turn = complete_with_retry(chat, messages, tools, options, backend_error);
    if (!turn) {
      traj.terminal = Terminal::aborted;
      traj.error = fmt::format("BackendError: {}", backend_error);
      break;
    }
    traj.token_usage += turn->usage;

    Step step;
    step.index = traj.steps.size();
    if (!turn->tool_call) {
      step.action = StepAction::response;
      step.action_payload = {{"text", turn->text}};
      traj.steps.push_back(std::move(step));
      traj.terminal = Terminal::responded;
      break;
    }

    auto call = *turn->tool_call;
    if (call.id.empty()) call.id = fmt::format("call_{}", step.index);
    if (!turn->text.empty()) step.thought = turn->text;
    step.action = call.name == copilot::kRouteTool ? StepAction::route : StepAction::execute;
    step.action_payload = {{"tool", call.name}, {"arguments", call.arguments}};
    try {
      const auto record = gateway.invoke(call.name, call.arguments);
      step.observation = record.observation;
      step.record_seq = record.seq;
    } catch (const Error& e) {
      if (e.code() != Errc::ToolNotFound) {
        traj.terminal = Terminal::aborted;
        traj.error = fmt::format("{}: {}", to_string(e.code()), e.what());
        break;
      }
      step.observation = fmt::format("Error: {}", e.what());
    } catch (const std::exception& e) {
      traj.terminal = Terminal::aborted;
      traj.error = e.what();
      break;
    }

    messages.push_back({llm::Role::assistant, turn->text, call, {}});
    messages.push_back({llm::Role::tool, *step.observation, std::nullopt, call.id});
    traj.steps.push_back(std::move(step));
  }

  const auto all = gateway.records();
  traj.tool_call_records.assign(all.begin() + static_cast<std::ptrdiff_t>(first_record), all.end());
  traj.finished = util::utc_timestamp_now();
  return traj;
}

std::vector<BatchEntry> run_batch(const std::vector<Task>& tasks, const retrieval::Router& router,
                                  const std::vector<ServerConfig>& fleet,
                                  const BackendFactory& backends,
                                  const std::filesystem::path& out_dir,
                                  const BatchOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "trajectories");
  fs::create_directories(out_dir / "logs");

  std::vector<BatchEntry> entries(tasks.size());
  std::mutex notify;
  util::bounded_parallel_for(tasks.size(), options.concurrency, [&](std::size_t i) {
    const auto& task = tasks[i];
    auto& entry = entries[i];
    entry.task_id = task.task_id;
    if (options.cancel && options.cancel->load()) return;
    entry.started = true;
    try {
      // Each task gets a scratch directory its servers can use.
      const auto work = out_dir / "work" / task.task_id;
      fs::create_directories(work);
      auto task_fleet = fleet;
      for (auto& s : task_fleet) s.env["MCPGW_WORKDIR"] = work.string();

      const auto log = out_dir / "logs" / (task.task_id + ".jsonl");
      fs::remove(log);
      auto chat = backends(task);
      Trajectory traj;
      {
        copilot::GatewaySession session(router, std::move(task_fleet), options.gateway, log);
        traj = run_task(task, session, *chat, options.run);
      }
      const auto rel = fs::path("trajectories") / (task.task_id + ".json");
      save_trajectory(traj, out_dir / rel);
      entry.trajectory = rel;
      entry.terminal = traj.terminal;
      spdlog::info("task {}: {} after {} step(s)", task.task_id, to_string(traj.terminal),
                   traj.steps.size());
    } catch (const std::exception& e) {
      entry.error = e.what();
      spdlog::error("task {} could not be run: {}", task.task_id, e.what());
    }
    if (options.on_finished) {
      std::lock_guard lock(notify);
      options.on_finished(entry);
    }
  });
  return entries;
}

}  // namespace mcpgw::agent
