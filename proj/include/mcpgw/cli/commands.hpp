#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mcpgw/cli/config.hpp"
#include "mcpgw/error.hpp"

namespace mcpgw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

/// 2 for anything the operator has to fix in inputs, 1 otherwise.
int exit_code_for(const Error& e) noexcept;

// Each command reports progress on `msg` and returns an exit code. Errors in
// inputs are thrown as mcpgw::Error.

/// Builds out/catalog.json and prints "<n> servers, <m> tools, <s> skipped".
int cmd_index(const Config& config, const std::filesystem::path& out, std::ostream& msg);

int cmd_serve(const Config& config, const std::optional<std::filesystem::path>& trajectory_log,
              std::istream& in, std::ostream& out);

/// Runs every task; out/ receives tasks.json, manifest.json, trajectories/
/// and logs/.
int cmd_run(const Config& config, const std::filesystem::path& out,
            const std::atomic<bool>* cancel, std::ostream& msg);

/// Judges a run directory into out/judgments.json.
int cmd_judge(const Config& config, const std::filesystem::path& run_dir,
              const std::filesystem::path& out, bool generate_key_points, std::ostream& msg);

/// Writes out/report.json and out/report.txt and prints the text form.
int cmd_report(const std::vector<std::filesystem::path>& run_dirs,
               const std::optional<std::filesystem::path>& human_labels,
               const std::optional<std::filesystem::path>& prices,
               const std::filesystem::path& out, std::ostream& msg);

/// Entry point of the `mcpgw` executable.
int main(int argc, char** argv);

}  // namespace mcpgw::cli
