#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpgw/agent/task.hpp"
#include "mcpgw/agent/trajectory.hpp"
#include "mcpgw/eval/judge.hpp"
#include "mcpgw/llm/chat.hpp"

namespace mcpgw::eval {

using nlohmann::json;

/// Column order of the success table.
inline constexpr std::array<agent::Domain, 6> kTableDomains{
    agent::Domain::Office,    agent::Domain::Leisure, agent::Domain::Travel,
    agent::Domain::Lifestyle, agent::Domain::Finance, agent::Domain::Shopping};

/// successes / total, rendered as a percentage with two decimals, half up.
struct Rate {
  std::int64_t successes = 0;
  std::int64_t total = 0;

  /// round_half_up(10000 * successes / total); 0 when total is 0.
  std::int64_t hundredths() const;
  double percent() const { return static_cast<double>(hundredths()) / 100.0; }
  /// "78.95", or "n/a" when total is 0.
  std::string str() const;

  bool operator==(const Rate&) const = default;
};

// --- success --------------------------------------------------------------

struct SuccessRow {
  std::string model_id;
  std::map<agent::Domain, Rate> domains;  // every domain present, possibly 0/0
  Rate overall;
};

/// One judgment per task is required. Throws MissingJudgment listing the
/// uncovered task ids, InvalidArgument for judgments of unknown or repeated
/// tasks.
SuccessRow success_rates(const std::vector<Judgment>& judgments,
                         const std::vector<agent::Task>& tasks);

// --- agreement ------------------------------------------------------------

struct HumanLabel {
  std::string task_id;
  std::string model_id;  // empty: applies to whichever run is being scored
  Status status = Status::failure;
  std::optional<std::string> error_category;
  std::string annotator;
};

/// Per judge model: fraction of tasks whose verdict equals the human one.
/// Throws CoverageMismatch when a judge's task ids differ from the labels'.
std::map<std::string, Rate> agreement_rate(const std::vector<Judgment>& judgments,
                                           const std::vector<HumanLabel>& labels);

// --- efficiency -----------------------------------------------------------

struct EfficiencyRow {
  std::string model_id;
  std::size_t trajectories = 0;
  double steps = 0;
  double tools = 0;
  double executes = 0;
  double routes = 0;
  Rate overall;
};

/// Means of trajectory_stats per model joined with that model's success rate.
/// Rows sorted by overall descending, then model id.
std::vector<EfficiencyRow> efficiency_table(const std::vector<agent::Trajectory>& trajectories,
                                            const std::vector<Judgment>& judgments);

// --- pareto ---------------------------------------------------------------

struct ParetoPoint {
  std::string label;
  double cost = 0;
  double success = 0;

  bool operator==(const ParetoPoint&) const = default;
};

/// `a` is no worse on both axes and strictly better on one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept;

/// Non-dominated points ordered by cost, then success descending, then label.
/// Throws InvalidArgument for a non-positive or non-finite cost.
std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points);

// --- errors ---------------------------------------------------------------

enum class ErrorCategory { QueryError, RetrieveError, ToolError, OtherError };
inline constexpr std::array kErrorCategories{ErrorCategory::QueryError, ErrorCategory::RetrieveError,
                                             ErrorCategory::ToolError, ErrorCategory::OtherError};

std::string_view to_string(ErrorCategory c) noexcept;
std::optional<ErrorCategory> parse_error_category(std::string_view s) noexcept;

struct ErrorLabel {
  std::string task_id;
  ErrorCategory category = ErrorCategory::OtherError;
  std::string annotator;
};

struct ErrorDistribution {
  std::size_t total = 0;
  std::map<ErrorCategory, std::size_t> counts;                 // all four present
  std::optional<std::map<ErrorCategory, double>> proportions;  // absent when total == 0
  std::optional<ErrorCategory> modal;                          // first category on ties
};

/// Throws InvalidArgument when a task carries more than one label.
ErrorDistribution error_distribution(const std::vector<ErrorLabel>& labels);

// --- inputs ----------------------------------------------------------------

/// Human label file: {"format_version": 1, "labels": [{task_id, status,
/// error_category?, model_id?, annotator?}]}.
std::vector<HumanLabel> load_human_labels(const std::filesystem::path& path);
std::vector<HumanLabel> parse_human_labels(const json& doc);
std::vector<ErrorLabel> error_labels(const std::vector<HumanLabel>& labels);

struct PriceEntry {
  std::optional<llm::Price> per_token;
  std::optional<double> flat_cost;  // used as-is when given
};

/// Price file: {"format_version": 1, "models": {id: {prompt_per_mtok,
/// completion_per_mtok} | {cost}}}.
std::map<std::string, PriceEntry> load_prices(const std::filesystem::path& path);
std::map<std::string, PriceEntry> parse_prices(const json& doc);

// --- report ---------------------------------------------------------------

struct RunData {
  std::string model_id;
  std::vector<agent::Task> tasks;
  std::vector<agent::Trajectory> trajectories;
  std::vector<Judgment> judgments;
};

struct MetricsReport {
  std::vector<SuccessRow> success;        // overall descending
  std::vector<EfficiencyRow> efficiency;  // same order
  std::optional<std::map<std::string, std::map<std::string, Rate>>> agreement;  // model -> judge -> rate
  std::optional<ErrorDistribution> errors;
  std::optional<std::vector<ParetoPoint>> pareto_points;
  std::optional<std::vector<ParetoPoint>> pareto_frontier;
  std::vector<std::string> notices;
};

MetricsReport build_report(const std::vector<RunData>& runs,
                           const std::optional<std::vector<HumanLabel>>& labels,
                           const std::optional<std::map<std::string, PriceEntry>>& prices);

json to_json(const MetricsReport& report);
std::string render_text(const MetricsReport& report);

}  // namespace mcpgw::eval
