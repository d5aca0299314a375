#include "mcpgw/cli/commands.hpp"

#include <algorithm>
#include <csignal>
#include <iostream>
#include <map>
#include <mutex>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mcpgw/agent/runner.hpp"
#include "mcpgw/catalog/builder.hpp"
#include "mcpgw/catalog/fleet.hpp"
#include "mcpgw/cli/manifest.hpp"
#include "mcpgw/copilot/gateway.hpp"
#include "mcpgw/eval/judge.hpp"
#include "mcpgw/eval/metrics.hpp"
#include "mcpgw/util/files.hpp"
#include "mcpgw/util/parallel.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::cli {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) noexcept {
  switch (e.code()) {
    case Errc::ConfigError:
    case Errc::EmptyCatalog:
    case Errc::VersionMismatch:
    case Errc::CorruptFile:
    case Errc::InvalidArgument:
    case Errc::QueryFormatError:
    case Errc::DimensionMismatch:
    case Errc::MissingJudgment:
    case Errc::CoverageMismatch:
      return kExitUsage;
    default:
      return kExitPartial;
  }
}

namespace {

const fs::path& require(const std::optional<fs::path>& p, const char* what) {
  if (!p) throw Error(Errc::ConfigError, fmt::format("no {} given (flag or config file)", what));
  return *p;
}

protocol::LaunchOptions launch_options(const Config& c) {
  protocol::LaunchOptions o;
  o.handshake_timeout = c.handshake_timeout;
  o.call_timeout = c.call_timeout;
  return o;
}

copilot::GatewayConfig gateway_config(const Config& c) {
  copilot::GatewayConfig g;
  g.max_live_servers = c.max_live_servers;
  g.launch = launch_options(c);
  return g;
}

}  // namespace

int cmd_index(const Config& config, const fs::path& out, std::ostream& msg) {
  const auto fleet = catalog::load_fleet(require(config.fleet, "fleet file"));
  fs::create_directories(out);
  const auto path = out / "catalog.json";

  std::optional<catalog::Catalog> previous;
  if (fs::exists(path)) {
    try {
      previous = catalog::load_catalog(path);
    } catch (const Error& e) {
      spdlog::warn("ignoring unreadable previous catalog: {}", e.what());
    }
  }
  auto summarizer = make_chat_factory(config.summary_backend)("");
  catalog::BuildOptions options;
  options.launch = launch_options(config);
  options.previous = previous ? &*previous : nullptr;
  options.temperature = config.temperature;
  auto built = catalog::build_catalog(fleet, *summarizer, options);

  auto embedder = make_embedding_backend(config.embedding_backend);
  const auto cat = retrieval::attach_embeddings(built, *embedder);
  catalog::persist_catalog(cat, path);

  msg << fmt::format("{} servers, {} tools, {} skipped\n", cat.servers().size(), cat.tools().size(),
                     cat.skipped().size());
  for (const auto& s : cat.skipped()) msg << fmt::format("  skipped {}: {}\n", s.server_name, s.reason);
  return kExitOk;
}

int cmd_serve(const Config& config, const std::optional<fs::path>& trajectory_log, std::istream& in,
              std::ostream& out) {
  const auto cat = catalog::load_catalog(require(config.catalog, "catalog"));
  auto fleet = catalog::load_fleet(require(config.fleet, "fleet file"));
  auto embedder = embedding_backend_for(cat, config);
  retrieval::Router router(cat, *embedder, config.k, config.weights);
  copilot::serve_gateway(router, std::move(fleet), gateway_config(config), in, out, trajectory_log);
  return kExitOk;
}

int cmd_run(const Config& config, const fs::path& out, const std::atomic<bool>* cancel,
            std::ostream& msg) {
  const auto catalog_path = fs::absolute(require(config.catalog, "catalog")).lexically_normal();
  const auto cat = catalog::load_catalog(catalog_path);
  const auto fleet = catalog::load_fleet(require(config.fleet, "fleet file"));
  const auto tasks = agent::load_tasks(require(config.tasks, "task file"));
  auto embedder = embedding_backend_for(cat, config);
  const retrieval::Router router(cat, *embedder, config.k, config.weights);
  const auto chat = make_chat_factory(config.agent_backend);

  fs::create_directories(out);
  json task_doc = {{"format_version", 1}, {"tasks", json::array()}};
  for (const auto& t : tasks) task_doc["tasks"].push_back(agent::to_json(t));
  util::write_json_file(out / "tasks.json", task_doc);

  RunManifest m;
  m.config = config.snapshot();
  for (const auto& t : tasks) {
    m.task_ids.push_back(t.task_id);
    m.entries.push_back({t.task_id, std::nullopt, std::nullopt, ""});
  }
  m.run_id = fmt::format("run-{:012x}", util::fnv1a64(m.config.dump() + json(m.task_ids).dump()) &
                                            0xffffffffffffULL);
  m.catalog = catalog_path.string();
  m.started = util::utc_timestamp_now();
  save_manifest(m, out);

  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < tasks.size(); ++i) slot[tasks[i].task_id] = i;

  agent::BatchOptions options;
  options.run.budget = config.budget;
  options.run.temperature = config.temperature;
  options.gateway = gateway_config(config);
  options.concurrency = config.run_concurrency;
  options.cancel = cancel;
  options.on_finished = [&](const agent::BatchEntry& e) {
    auto& me = m.entries[slot.at(e.task_id)];
    if (e.trajectory) me.trajectory = e.trajectory->generic_string();
    if (e.terminal) me.terminal = std::string(agent::to_string(*e.terminal));
    me.error = e.error;
    if (m.model_id.empty() && e.trajectory) {
      m.model_id = agent::load_trajectory(out / *e.trajectory).model_id;
    }
    save_manifest(m, out);
    msg << fmt::format("{}: {}\n", e.task_id,
                       e.terminal ? std::string(agent::to_string(*e.terminal)) : "error: " + e.error);
  };

  const auto entries = agent::run_batch(
      tasks, router, fleet, [&](const agent::Task& t) { return chat(t.task_id); }, out, options);

  bool all_started = true, all_clean = true;
  for (const auto& e : entries) {
    all_started = all_started && e.started;
    all_clean = all_clean && e.error.empty() && e.terminal && *e.terminal != agent::Terminal::aborted;
  }
  m.status = all_started ? "complete" : "partial";
  m.finished = util::utc_timestamp_now();
  save_manifest(m, out);

  std::size_t written = 0;
  for (const auto& e : entries) written += e.trajectory ? 1 : 0;
  msg << fmt::format("{} of {} trajectories written to {} ({})\n", written, tasks.size(),
                     out.string(), m.status);
  return all_started && all_clean ? kExitOk : kExitPartial;
}

int cmd_judge(const Config& config, const fs::path& run_dir, const fs::path& out,
              bool generate_key_points, std::ostream& msg) {
  const auto m = load_manifest(run_dir);
  const auto tasks = agent::load_tasks(run_dir / m.tasks_file);
  const auto cat = catalog::load_catalog(config.catalog ? *config.catalog : fs::path(m.catalog));
  const auto chat = make_chat_factory(config.judge_backend);

  std::map<std::string, const agent::Task*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;

  eval::JudgmentSet set;
  std::mutex mu;
  util::bounded_parallel_for(m.entries.size(), config.judge_concurrency, [&](std::size_t i) {
    const auto& entry = m.entries[i];
    auto fail = [&](const std::string& why) {
      std::lock_guard lock(mu);
      set.failures.push_back({entry.task_id, why});
    };
    if (!entry.trajectory) return fail("no trajectory");
    auto task = by_id.find(entry.task_id);
    if (task == by_id.end()) return fail("task missing from the run's task file");
    try {
      const auto traj = agent::load_trajectory(run_dir / *entry.trajectory);
      auto backend = chat(entry.task_id);
      const auto source =
          generate_key_points ? eval::KeyPointSource::generated : eval::KeyPointSource::human;
      const auto key_points =
          generate_key_points
              ? eval::extract_key_points(*task->second, *backend, config.temperature)
              : task->second->key_points;
      auto j = eval::judge(*task->second, key_points, source, traj, eval::tools_used(traj, cat),
                           *backend, {config.temperature, 3});
      std::lock_guard lock(mu);
      set.judgments.push_back(std::move(j));
    } catch (const Error& e) {
      fail(fmt::format("{}: {}", to_string(e.code()), e.what()));
    }
  });
  std::sort(set.judgments.begin(), set.judgments.end(),
            [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
  std::sort(set.failures.begin(), set.failures.end(),
            [](const auto& a, const auto& b) { return a.task_id < b.task_id; });

  fs::create_directories(out);
  eval::save_judgments(set, out / "judgments.json");
  msg << fmt::format("{} judged, {} failed\n", set.judgments.size(), set.failures.size());
  for (const auto& f : set.failures) msg << fmt::format("  {}: {}\n", f.task_id, f.error);
  return set.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_report(const std::vector<fs::path>& run_dirs, const std::optional<fs::path>& human_labels,
               const std::optional<fs::path>& prices, const fs::path& out, std::ostream& msg) {
  if (run_dirs.empty()) throw Error(Errc::ConfigError, "report needs at least one run directory");
  std::vector<eval::RunData> runs;
  for (const auto& dir : run_dirs) {
    const auto m = load_manifest(dir);
    eval::RunData run;
    run.model_id = m.model_id.empty() ? m.run_id : m.model_id;
    run.tasks = agent::load_tasks(dir / m.tasks_file);
    for (const auto& e : m.entries) {
      if (e.trajectory) run.trajectories.push_back(agent::load_trajectory(dir / *e.trajectory));
    }
    const auto jpath = dir / "judgments.json";
    if (!fs::exists(jpath)) {
      throw Error(Errc::ConfigError, fmt::format("run '{}' has not been judged yet", dir.string()));
    }
    run.judgments = eval::load_judgments(jpath).judgments;
    runs.push_back(std::move(run));
  }
  std::optional<std::vector<eval::HumanLabel>> labels;
  if (human_labels) labels = eval::load_human_labels(*human_labels);
  std::optional<std::map<std::string, eval::PriceEntry>> price_table;
  if (prices) price_table = eval::load_prices(*prices);

  const auto report = eval::build_report(runs, labels, price_table);
  const auto text = eval::render_text(report);
  fs::create_directories(out);
  util::write_json_file(out / "report.json", eval::to_json(report));
  util::write_file_atomic(out / "report.txt", text);
  msg << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

void setup_logging(bool verbose) {
  auto logger = spdlog::stderr_color_mt("mcpgw");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcpgw - MCP aggregation gateway, agent runner and evaluator"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "Output directory");
  app.add_flag("--verbose", verbose, "Debug logging on stderr");

  std::string fleet, catalog_path, tasks, agent_backend, judge_backend, summary_backend, embedding;
  std::string trajectory_log;
  std::size_t budget = 0, concurrency = 0, k = 0;
  std::vector<std::string> runs;
  std::string labels, prices;
  bool generate = false;

  auto* index = app.add_subcommand("index", "Enumerate the fleet and build the tool catalog");
  index->add_option("--fleet", fleet, "Fleet file");
  index->add_option("--summary-backend", summary_backend, "Chat backend for server summaries");
  index->add_option("--embedding-backend", embedding, "Embedding backend");

  auto* serve = app.add_subcommand("serve", "Serve the route/execute gateway over stdio");
  serve->add_option("--catalog", catalog_path, "Catalog file");
  serve->add_option("--fleet", fleet, "Fleet file");
  serve->add_option("--trajectory-log", trajectory_log, "Append one JSON line per action here");
  serve->add_option("--embedding-backend", embedding, "Embedding backend");

  auto* run = app.add_subcommand("run", "Run tasks through the gateway");
  run->add_option("--catalog", catalog_path, "Catalog file");
  run->add_option("--fleet", fleet, "Fleet file");
  run->add_option("--tasks", tasks, "Task file");
  run->add_option("--backend", agent_backend, "Agent chat backend");
  run->add_option("--budget", budget, "Max assistant turns per task");
  run->add_option("--concurrency", concurrency, "Tasks run at once");
  run->add_option("--k", k, "Route candidates per query");
  run->add_option("--embedding-backend", embedding, "Embedding backend");

  auto* judge = app.add_subcommand("judge", "Judge every trajectory of a run");
  judge->add_option("--run", runs, "Run directory")->required()->expected(1);
  judge->add_option("--judge-backend", judge_backend, "Judge chat backend");
  judge->add_option("--catalog", catalog_path, "Catalog file (default: the one the run used)");
  judge->add_flag("--generate-key-points", generate, "Extract key points with the judge model");

  auto* report = app.add_subcommand("report", "Aggregate judged runs into metrics tables");
  report->add_option("--run", runs, "Judged run directory (repeatable)")->required();
  report->add_option("--human-labels", labels, "Human label file");
  report->add_option("--prices", prices, "Price table");

  for (auto* sub : {index, serve, run, judge, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  setup_logging(verbose);
  try {
    Config config = config_path.empty() ? Config{} : load_config(config_path);
    if (!fleet.empty()) config.fleet = fleet;
    if (!catalog_path.empty()) config.catalog = catalog_path;
    if (!tasks.empty()) config.tasks = tasks;
    if (!agent_backend.empty()) config.agent_backend = agent_backend;
    if (!judge_backend.empty()) config.judge_backend = judge_backend;
    if (!summary_backend.empty()) config.summary_backend = summary_backend;
    if (!embedding.empty()) config.embedding_backend = embedding;
    if (budget) config.budget = budget;
    if (concurrency) config.run_concurrency = concurrency;
    if (k) config.k = k;

    auto need_out = [&]() -> fs::path {
      if (out_path.empty()) throw Error(Errc::ConfigError, "--out is required for this command");
      return out_path;
    };

    if (*index) return cmd_index(config, need_out(), std::cout);
    if (*serve) {
      std::optional<fs::path> log;
      if (!trajectory_log.empty()) log = trajectory_log;
      return cmd_serve(config, log, std::cin, std::cout);
    }
    if (*run) {
      std::signal(SIGINT, on_interrupt);
      std::signal(SIGTERM, on_interrupt);
      return cmd_run(config, need_out(), &g_interrupted, std::cout);
    }
    if (*judge) {
      const fs::path dir = runs.front();
      return cmd_judge(config, dir, out_path.empty() ? dir : fs::path(out_path), generate, std::cout);
    }
    if (*report) {
      std::vector<fs::path> dirs(runs.begin(), runs.end());
      std::optional<fs::path> l, p;
      if (!labels.empty()) l = labels;
      if (!prices.empty()) p = prices;
      return cmd_report(dirs, l, p, need_out(), std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "mcpgw: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "mcpgw: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}

}  // namespace mcpgw::cli
