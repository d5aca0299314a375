#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcpgw/agent/task.hpp"
#include "mcpgw/agent/trajectory.hpp"
#include "mcpgw/copilot/gateway.hpp"
#include "mcpgw/llm/chat.hpp"

namespace mcpgw::agent {

inline constexpr std::size_t kDefaultBudget = 40;
inline constexpr std::size_t kDefaultBatchConcurrency = 4;

struct RunOptions {
  std::size_t budget = kDefaultBudget;  // max assistant turns
  double temperature = llm::kDefaultTemperature;
  int backend_attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
};

/// ReACT loop for one task. Never throws for backend or gateway trouble; those
/// end the trajectory as `aborted` with `error` set. Throws InvalidArgument
/// for budget == 0.
Trajectory run_task(const Task& task, copilot::GatewaySession& gateway, llm::ChatBackend& chat,
                    const RunOptions& options = {});

using BackendFactory = std::function<std::unique_ptr<llm::ChatBackend>(const Task&)>;

struct BatchEntry {
  std::string task_id;
  std::optional<std::filesystem::path> trajectory;  // relative to out_dir
  std::optional<Terminal> terminal;
  std::string error;  // set when the task could not be run at all
  bool started = false;
};

struct BatchOptions {
  RunOptions run;
  copilot::GatewayConfig gateway;
  std::size_t concurrency = kDefaultBatchConcurrency;
  /// Checked before each task starts; once set no further task is started.
  const std::atomic<bool>* cancel = nullptr;
  /// Called once per finished task, one call at a time.
  std::function<void(const BatchEntry&)> on_finished;
};

/// Runs every task with its own gateway session and writes
/// out_dir/trajectories/<task_id>.json plus a per-task action log under
/// out_dir/logs. Entries keep the order of `tasks`.
std::vector<BatchEntry> run_batch(const std::vector<Task>& tasks, const retrieval::Router& router,
                                  const std::vector<ServerConfig>& fleet,
                                  const BackendFactory& backends,
                                  const std::filesystem::path& out_dir,
                                  const BatchOptions& options = {});

}  // namespace mcpgw::agent
