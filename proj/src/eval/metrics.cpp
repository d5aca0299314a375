#include "mcpgw/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/files.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::eval {

std::int64_t Rate::hundredths() const {
  if (total <= 0) return 0;
  return (successes * 20000 + total) / (2 * total);
}

std::string Rate::str() const {
  if (total <= 0) return "n/a";
  const auto h = hundredths();
  return fmt::format("{}.{:02}", h / 100, h % 100);
}

SuccessRow success_rates(const std::vector<Judgment>& judgments,
                         const std::vector<agent::Task>& tasks) {
  std::map<std::string, const agent::Task*> by_id;
  for (const auto& t : tasks) by_id.emplace(t.task_id, &t);

  SuccessRow row;
  for (auto d : kTableDomains) row.domains[d] = {};
  std::set<std::string> judged;
  for (const auto& j : judgments) {
    auto it = by_id.find(j.task_id);
    if (it == by_id.end()) {
      throw Error(Errc::InvalidArgument, fmt::format("judgment for unknown task '{}'", j.task_id));
    }
    if (!judged.insert(j.task_id).second) {
      throw Error(Errc::InvalidArgument, fmt::format("task '{}' judged more than once", j.task_id));
    }
    if (row.model_id.empty()) row.model_id = j.model_id;
    const int ok = j.status == Status::success ? 1 : 0;
    auto& r = row.domains[it->second->domain];
    r.successes += ok;
    r.total += 1;
    row.overall.successes += ok;
    row.overall.total += 1;
  }
  std::vector<std::string> missing;
  for (const auto& t : tasks) {
    if (!judged.count(t.task_id)) missing.push_back(t.task_id);
  }
  if (!missing.empty()) {
    throw Error(Errc::MissingJudgment,
                fmt::format("no judgment for task(s): {}", fmt::join(missing, ", ")));
  }
  return row;
}

std::map<std::string, Rate> agreement_rate(const std::vector<Judgment>& judgments,
                                           const std::vector<HumanLabel>& labels) {
  std::map<std::string, Status> human;
  for (const auto& l : labels) {
    if (!human.emplace(l.task_id, l.status).second) {
      throw Error(Errc::CoverageMismatch, fmt::format("task '{}' labelled twice", l.task_id));
    }
  }
  std::map<std::string, std::map<std::string, Status>> by_judge;
  for (const auto& j : judgments) {
    if (!by_judge[j.judge_model_id].emplace(j.task_id, j.status).second) {
      throw Error(Errc::CoverageMismatch,
                  fmt::format("judge '{}' rated task '{}' twice", j.judge_model_id, j.task_id));
    }
  }
  std::map<std::string, Rate> out;
  for (const auto& [judge, verdicts] : by_judge) {
    std::vector<std::string> only_judge, only_human;
    for (const auto& [id, _] : verdicts) {
      if (!human.count(id)) only_judge.push_back(id);
    }
    for (const auto& [id, _] : human) {
      if (!verdicts.count(id)) only_human.push_back(id);
    }
    if (!only_judge.empty() || !only_human.empty()) {
      throw Error(Errc::CoverageMismatch,
                  fmt::format("judge '{}' and human labels cover different tasks "
                              "(unlabelled: [{}], unjudged: [{}])",
                              judge, fmt::join(only_judge, ", "), fmt::join(only_human, ", ")));
    }
    Rate r;
    for (const auto& [id, s] : verdicts) {
      r.total += 1;
      r.successes += s == human.at(id) ? 1 : 0;
    }
    out.emplace(judge, r);
  }
  return out;
}

std::vector<EfficiencyRow> efficiency_table(const std::vector<agent::Trajectory>& trajectories,
                                            const std::vector<Judgment>& judgments) {
  struct Acc {
    std::size_t n = 0, steps = 0, tools = 0, executes = 0, routes = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& t : trajectories) {
    const auto s = agent::trajectory_stats(t);
    auto& a = acc[t.model_id];
    ++a.n;
    a.steps += s.steps;
    a.tools += s.tools;
    a.executes += s.executes;
    a.routes += s.routes;
  }
  std::map<std::string, Rate> success;
  for (const auto& j : judgments) {
    auto& r = success[j.model_id];
    r.total += 1;
    r.successes += j.status == Status::success ? 1 : 0;
  }

  std::vector<EfficiencyRow> rows;
  for (const auto& [model, a] : acc) {
    const double n = static_cast<double>(a.n);
    rows.push_back({model, a.n, static_cast<double>(a.steps) / n, static_cast<double>(a.tools) / n,
                    static_cast<double>(a.executes) / n, static_cast<double>(a.routes) / n,
                    success.count(model) ? success[model] : Rate{}});
  }
  std::sort(rows.begin(), rows.end(), [](const EfficiencyRow& a, const EfficiencyRow& b) {
    if (a.overall.hundredths() != b.overall.hundredths()) {
      return a.overall.hundredths() > b.overall.hundredths();
    }
    return a.model_id < b.model_id;
  });
  return rows;
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept {
  return a.cost <= b.cost && a.success >= b.success && (a.cost < b.cost || a.success > b.success);
}

std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points) {
  for (const auto& p : points) {
    if (!(p.cost > 0) || !std::isfinite(p.cost) || !std::isfinite(p.success)) {
      throw Error(Errc::InvalidArgument,
                  fmt::format("point '{}' needs a positive finite cost and finite success", p.label));
    }
  }
  std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.success != b.success) return a.success > b.success;
    return a.label < b.label;
  });
  // Within one cost group only the group maximum can survive, and only if it
  // beats everything strictly cheaper.
  std::vector<ParetoPoint> out;
  std::optional<double> best_cheaper;
  for (std::size_t i = 0; i < points.size();) {
    std::size_t j = i;
    while (j < points.size() && points[j].cost == points[i].cost) ++j;
    const double group_max = points[i].success;
    if (!best_cheaper || group_max > *best_cheaper) {
      for (std::size_t k = i; k < j && points[k].success == group_max; ++k) out.push_back(points[k]);
      best_cheaper = group_max;
    }
    i = j;
  }
  return out;
}

std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::QueryError: return "QueryError";
    case ErrorCategory::RetrieveError: return "RetrieveError";
    case ErrorCategory::ToolError: return "ToolError";
    case ErrorCategory::OtherError: return "OtherError";
  }
  return "OtherError";
}

std::optional<ErrorCategory> parse_error_category(std::string_view s) noexcept {
  for (auto c : kErrorCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

ErrorDistribution error_distribution(const std::vector<ErrorLabel>& labels) {
  ErrorDistribution d;
  for (auto c : kErrorCategories) d.counts[c] = 0;
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l.task_id).second) {
      throw Error(Errc::InvalidArgument, fmt::format("task '{}' has more than one error label", l.task_id));
    }
    ++d.counts[l.category];
    ++d.total;
  }
  if (d.total == 0) return d;
  d.proportions.emplace();
  for (auto c : kErrorCategories) {
    (*d.proportions)[c] = static_cast<double>(d.counts[c]) / static_cast<double>(d.total);
    if (!d.modal || d.counts[c] > d.counts[*d.modal]) d.modal = c;
  }
  return d;
}

// ---------------------------------------------------------------------------

std::vector<HumanLabel> parse_human_labels(const json& doc) {
  auto fail = [](const std::string& why) { throw Error(Errc::ConfigError, why); };
  if (!doc.is_object() || doc.value("format_version", 0) != 1 || !doc.contains("labels") ||
      !doc["labels"].is_array()) {
    fail("label file must be {\"format_version\": 1, \"labels\": [...]}");
  }
  const auto default_annotator = doc.value("annotator", "");
  std::vector<HumanLabel> out;
  const auto& labels = doc["labels"];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    const auto at = fmt::format("labels[{}]", i);
    if (!l.is_object() || !l.contains("task_id") || !l["task_id"].is_string()) {
      fail(at + ".task_id: required string");
    }
    HumanLabel h;
    h.task_id = l["task_id"].get<std::string>();
    h.model_id = l.value("model_id", "");
    h.annotator = l.value("annotator", default_annotator);
    const auto status = l.value("status", "");
    if (status != "success" && status != "failure") fail(at + ".status: must be success or failure");
    h.status = status == "success" ? Status::success : Status::failure;
    if (auto c = l.find("error_category"); c != l.end() && !c->is_null()) {
      if (!c->is_string() || !parse_error_category(c->get<std::string>())) {
        fail(at + ".error_category: expected QueryError, RetrieveError, ToolError or OtherError");
      }
      if (h.status != Status::failure) fail(at + ".error_category: only failed tasks carry one");
      h.error_category = c->get<std::string>();
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<HumanLabel> load_human_labels(const std::filesystem::path& path) {
  try {
    return parse_human_labels(util::read_json_file(path, Errc::ConfigError));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<ErrorLabel> error_labels(const std::vector<HumanLabel>& labels) {
  std::vector<ErrorLabel> out;
  for (const auto& l : labels) {
    if (l.error_category) {
      out.push_back({l.model_id.empty() ? l.task_id : l.model_id + "/" + l.task_id,
                     *parse_error_category(*l.error_category), l.annotator});
    }
  }
  return out;
}

std::map<std::string, PriceEntry> parse_prices(const json& doc) {
  auto fail = [](const std::string& why) { throw Error(Errc::ConfigError, why); };
  if (!doc.is_object() || doc.value("format_version", 0) != 1 || !doc.contains("models") ||
      !doc["models"].is_object()) {
    fail("price file must be {\"format_version\": 1, \"models\": {...}}");
  }
  std::map<std::string, PriceEntry> out;
  for (const auto& [model, v] : doc["models"].items()) {
    PriceEntry e;
    if (!v.is_object()) fail(fmt::format("models.{}: must be an object", model));
    if (auto c = v.find("cost"); c != v.end()) {
      if (!c->is_number()) fail(fmt::format("models.{}.cost: must be a number", model));
      e.flat_cost = c->get<double>();
    } else if (v.contains("prompt_per_mtok") && v.contains("completion_per_mtok") &&
               v["prompt_per_mtok"].is_number() && v["completion_per_mtok"].is_number()) {
      e.per_token = llm::Price{v["prompt_per_mtok"].get<double>(), v["completion_per_mtok"].get<double>()};
    } else {
      fail(fmt::format("models.{}: give 'cost' or both 'prompt_per_mtok' and 'completion_per_mtok'", model));
    }
    out.emplace(model, e);
  }
  return out;
}

std::map<std::string, PriceEntry> load_prices(const std::filesystem::path& path) {
  try {
    return parse_prices(util::read_json_file(path, Errc::ConfigError));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

// ---------------------------------------------------------------------------

MetricsReport build_report(const std::vector<RunData>& runs,
                           const std::optional<std::vector<HumanLabel>>& labels,
                           const std::optional<std::map<std::string, PriceEntry>>& prices) {
  MetricsReport rep;
  std::vector<agent::Trajectory> all_traj;
  std::vector<Judgment> all_judgments;

  for (const auto& run : runs) {
    std::set<std::string> judged;
    for (const auto& j : run.judgments) judged.insert(j.task_id);
    std::vector<agent::Task> covered;
    for (const auto& t : run.tasks) {
      if (judged.count(t.task_id)) covered.push_back(t);
    }
    if (covered.size() != run.tasks.size()) {
      rep.notices.push_back(fmt::format("{}: {} task(s) without a judgment are left out",
                                        run.model_id, run.tasks.size() - covered.size()));
    }
    auto row = success_rates(run.judgments, covered);
    row.model_id = run.model_id;
    rep.success.push_back(std::move(row));
    all_traj.insert(all_traj.end(), run.trajectories.begin(), run.trajectories.end());
    for (auto j : run.judgments) {
      j.model_id = run.model_id;
      all_judgments.push_back(std::move(j));
    }
  }
  std::sort(rep.success.begin(), rep.success.end(), [](const SuccessRow& a, const SuccessRow& b) {
    if (a.overall.hundredths() != b.overall.hundredths()) {
      return a.overall.hundredths() > b.overall.hundredths();
    }
    return a.model_id < b.model_id;
  });
  rep.efficiency = efficiency_table(all_traj, all_judgments);

  if (!labels) {
    rep.notices.push_back("no human labels given: agreement and error distribution omitted");
  } else {
    rep.agreement.emplace();
    for (const auto& run : runs) {
      std::vector<HumanLabel> mine;
      for (const auto& l : *labels) {
        if (l.model_id.empty() || l.model_id == run.model_id) mine.push_back(l);
      }
      try {
        (*rep.agreement)[run.model_id] = agreement_rate(run.judgments, mine);
      } catch (const Error& e) {
        if (e.code() != Errc::CoverageMismatch) throw;
        rep.notices.push_back(fmt::format("{}: agreement skipped: {}", run.model_id, e.what()));
      }
    }
    rep.errors = error_distribution(error_labels(*labels));
  }

  if (!prices) {
    rep.notices.push_back("no price table given: Pareto frontier omitted");
  } else {
    std::vector<ParetoPoint> points;
    for (const auto& row : rep.success) {
      auto it = prices->find(row.model_id);
      if (it == prices->end()) {
        rep.notices.push_back(fmt::format("{}: no price entry, left out of the Pareto analysis", row.model_id));
        continue;
      }
      double cost = 0;
      if (it->second.flat_cost) {
        cost = *it->second.flat_cost;
      } else {
        std::size_t n = 0;
        for (const auto& t : all_traj) {
          if (t.model_id != row.model_id) continue;
          cost += it->second.per_token->cost(t.token_usage);
          ++n;
        }
        if (n) cost /= static_cast<double>(n);
      }
      if (!(cost > 0) || !std::isfinite(cost)) {
        rep.notices.push_back(fmt::format("{}: cost {} is not positive, left out of the Pareto analysis",
                                          row.model_id, cost));
        continue;
      }
      points.push_back({row.model_id, cost, row.overall.percent()});
    }
    rep.pareto_frontier = pareto_frontier(points);
    rep.pareto_points = std::move(points);
  }
  return rep;
}

namespace {

json rate_json(const Rate& r) {
  return {{"successes", r.successes}, {"total", r.total}, {"percent", r.str()}};
}

}  // namespace

json to_json(const MetricsReport& rep) {
  json success = json::array();
  for (const auto& row : rep.success) {
    json domains = json::object();
    for (auto d : kTableDomains) domains[std::string(agent::to_string(d))] = rate_json(row.domains.at(d));
    success.push_back({{"model_id", row.model_id}, {"domains", domains}, {"overall", rate_json(row.overall)}});
  }
  json efficiency = json::array();
  for (const auto& r : rep.efficiency) {
    efficiency.push_back({{"model_id", r.model_id},
                          {"trajectories", r.trajectories},
                          {"steps", r.steps},
                          {"tools", r.tools},
                          {"execute", r.executes},
                          {"route", r.routes},
                          {"overall", rate_json(r.overall)}});
  }
  json out = {{"format", "mcpgw-report"},
              {"format_version", 1},
              {"success", std::move(success)},
              {"efficiency", std::move(efficiency)},
              {"notices", rep.notices}};
  if (rep.agreement) {
    json a = json::object();
    for (const auto& [model, judges] : *rep.agreement) {
      for (const auto& [judge, rate] : judges) a[model][judge] = rate_json(rate);
    }
    out["agreement"] = std::move(a);
  }
  if (rep.errors) {
    json counts = json::object(), props = nullptr;
    for (const auto& [c, n] : rep.errors->counts) counts[std::string(to_string(c))] = n;
    if (rep.errors->proportions) {
      props = json::object();
      for (const auto& [c, p] : *rep.errors->proportions) props[std::string(to_string(c))] = p;
    }
    out["errors"] = {{"total", rep.errors->total},
                     {"counts", counts},
                     {"proportions", props},
                     {"modal", rep.errors->modal ? json(to_string(*rep.errors->modal)) : json(nullptr)}};
  }
  if (rep.pareto_points) {
    auto pts = [](const std::vector<ParetoPoint>& v) {
      json a = json::array();
      for (const auto& p : v) a.push_back({{"model_id", p.label}, {"cost", p.cost}, {"success", p.success}});
      return a;
    };
    out["pareto"] = {{"points", pts(*rep.pareto_points)}, {"frontier", pts(*rep.pareto_frontier)}};
  }
  return out;
}

std::string render_text(const MetricsReport& rep) {
  std::size_t w = 5;
  for (const auto& r : rep.success) w = std::max(w, r.model_id.size());
  for (const auto& r : rep.efficiency) w = std::max(w, r.model_id.size());

  std::string out = "Task success rate (%)\n";
  out += fmt::format("{:<{}}", "Model", w);
  for (auto d : kTableDomains) out += fmt::format(" | {:>9}", agent::to_string(d));
  out += " | Overall (%)\n";
  for (const auto& r : rep.success) {
    out += fmt::format("{:<{}}", r.model_id, w);
    for (auto d : kTableDomains) out += fmt::format(" | {:>9}", r.domains.at(d).str());
    out += fmt::format(" | {:>11}\n", r.overall.str());
  }

  out += "\nEfficiency (means per task)\n";
  out += fmt::format("{:<{}} | {:>6} | {:>6} | {:>7} | {:>6} | Overall (%)\n", "Model", w, "Steps",
                     "Tools", "execute", "route");
  for (const auto& r : rep.efficiency) {
    out += fmt::format("{:<{}} | {:>6} | {:>6} | {:>7} | {:>6} | {:>11}\n", r.model_id, w,
                       util::fixed_2dp(r.steps), util::fixed_2dp(r.tools),
                       util::fixed_2dp(r.executes), util::fixed_2dp(r.routes), r.overall.str());
  }

  if (rep.agreement) {
    out += "\nHuman agreement (%)\n";
    for (const auto& [model, judges] : *rep.agreement) {
      for (const auto& [judge, rate] : judges) {
        out += fmt::format("{} judged by {}: {} ({}/{})\n", model, judge, rate.str(), rate.successes,
                           rate.total);
      }
    }
  }
  if (rep.errors) {
    out += "\nError distribution\n";
    for (const auto& [c, n] : rep.errors->counts) {
      out += fmt::format("{:<13} {:>4}", to_string(c), n);
      if (rep.errors->proportions) {
        out += fmt::format("  {:>6}%", util::fixed_2dp(rep.errors->proportions->at(c) * 100));
      }
      out += '\n';
    }
    if (!rep.errors->proportions) out += "(no labelled failures; proportions undefined)\n";
  }
  if (rep.pareto_points) {
    out += "\nCost vs. success\n";
    for (const auto& p : *rep.pareto_points) {
      const bool on = std::find(rep.pareto_frontier->begin(), rep.pareto_frontier->end(), p) !=
                      rep.pareto_frontier->end();
      out += fmt::format("{:<{}} cost {:>12.6f}  success {:>6}  {}\n", p.label, w, p.cost,
                         util::fixed_2dp(p.success), on ? "frontier" : "");
    }
  }
  if (!rep.notices.empty()) {
    out += "\nNotices\n";
    for (const auto& n : rep.notices) out += "- " + n + "\n";
  }
  return out;
}

}  // namespace mcpgw::eval
