#include <gtest/gtest.h>

#include "eval_fixtures.hpp"
#include "mcpgw/error.hpp"
#include "mcpgw/eval/judge.hpp"
#include "mcpgw/eval/metrics.hpp"
#include "mcpgw/fixtures/backends.hpp"
#include "mcpgw/prompts.hpp"
#include "support.hpp"

namespace mcpgw::eval {
namespace {

using agent::Domain;
using fixtures::ScriptedChatBackend;
using fixtures::ScriptedTurn;
using test::TempDir;

ScriptedChatBackend replies(std::vector<std::string> texts, std::string model = "judge-x") {
  std::vector<ScriptedTurn> turns;
  for (auto& t : texts) {
    ScriptedTurn s;
    s.text = std::move(t);
    turns.push_back(std::move(s));
  }
  return ScriptedChatBackend(std::move(turns), std::move(model));
}

const agent::Task kTask{"f-1", Domain::Finance, "Multiply 1200 by 3.", {"Multiply", "Report 3600"}};

// --- key points ---------------------------------------------------------------

TEST(KeyPoints, FirstNumberedListAfterPreamble) {
  const auto kp = parse_key_points(
      "Sure! Here are the key points:\n\n1. **Find** a hotel\n2) Book it\n3. Pay\n\nNotes:\n1. ignored");
  EXPECT_EQ(kp, (std::vector<std::string>{"Find a hotel", "Book it", "Pay"}));
  EXPECT_TRUE(parse_key_points("no list here").empty());
  EXPECT_TRUE(parse_key_points("").empty());
}

TEST(KeyPoints, ExtractRetriesThenGivesUp) {
  auto ok = replies({"nothing", "1. Multiply\n2. Report"});
  EXPECT_EQ(extract_key_points(kTask, ok), (std::vector<std::string>{"Multiply", "Report"}));

  auto bad = replies({"", "", "", "1. too late"});
  try {
    extract_key_points(kTask, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnparseableResponse);
  }
  EXPECT_EQ(bad.consumed(), 3u);
}

// --- verdicts -------------------------------------------------------------------

TEST(Verdict, AcceptsCommonFormatting) {
  struct Case {
    std::string text;
    Status expected;
  };
  const std::vector<Case> cases = {
      {"Thoughts: fine\nStatus: success", Status::success},
      {"**Thoughts:** nope\n**Status:** Failure", Status::failure},
      {"thoughts: x\nSTATUS: SUCCESS.", Status::success},
      {"Thoughts: x\n> Status: \"failure\"", Status::failure},
      {"- Status: `success`\n- Thoughts: ok", Status::success},
      {"Status: success\nStatus: success", Status::success},
  };
  for (const auto& c : cases) {
    const auto v = parse_verdict(c.text);
    ASSERT_TRUE(v.parsed()) << c.text << " -> " << v.problem;
    EXPECT_EQ(*v.status, c.expected) << c.text;
    EXPECT_FALSE(v.thoughts.empty());
  }
  EXPECT_EQ(parse_verdict("Thoughts: all good\nStatus: success").thoughts, "all good");
}

TEST(Verdict, RejectsMissingUnknownOrConflicting) {
  for (const std::string text : {"Thoughts: looks fine", "Status: succeeded", "Status: partial",
                                 "Status: success\nStatus: failure", "", "Status:"}) {
    const auto v = parse_verdict(text);
    EXPECT_FALSE(v.parsed()) << text;
    EXPECT_FALSE(v.problem.empty()) << text;
  }
}

// --- judge ------------------------------------------------------------------------

std::vector<catalog::ToolRecord> srv_tools(std::size_t n) {
  std::vector<catalog::ToolRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"srv", "tool" + std::to_string(i), "does thing " + std::to_string(i), json::object()});
  }
  return out;
}

TEST(Judge, RuleBasedJudgeIsDeterministic) {
  const auto t = test::trajectory_with("f-1", "agent-m", 4, 1, 1, 1);
  fixtures::RuleBasedChatBackend a, b;
  const auto ja = judge(kTask, kTask.key_points, KeyPointSource::human, t, srv_tools(1), a);
  const auto jb = judge(kTask, kTask.key_points, KeyPointSource::human, t, srv_tools(1), b);
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(ja.status, Status::success);
  EXPECT_EQ(ja.model_id, "agent-m");
  EXPECT_EQ(ja.judge_model_id, "mock-rule");

  const auto failed = test::trajectory_with("f-1", "agent-m", 4, 0, 1, 1);
  EXPECT_EQ(judge(kTask, kTask.key_points, KeyPointSource::human, failed, srv_tools(1), a).status,
            Status::failure);
}

TEST(Judge, MissingToolDescriptionIsRejected) {
  const auto t = test::trajectory_with("f-1", "agent-m", 6, 2, 2, 1);
  fixtures::RuleBasedChatBackend chat;
  try {
    judge(kTask, kTask.key_points, KeyPointSource::human, t, srv_tools(1), chat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidArgument);
  }
}

TEST(Judge, RetriesUnparseableVerdicts) {
  const auto t = test::trajectory_with("f-1", "agent-m", 3, 0, 0, 1);
  auto chat = replies({"hmm", "Thoughts: wrong answer\nStatus: failure"});
  const auto j = judge(kTask, kTask.key_points, KeyPointSource::generated, t, {}, chat);
  EXPECT_EQ(j.status, Status::failure);
  EXPECT_EQ(j.thoughts, "wrong answer");
  EXPECT_EQ(j.key_points_source, KeyPointSource::generated);

  auto never = replies({"a", "b", "c"});
  try {
    judge(kTask, kTask.key_points, KeyPointSource::human, t, {}, never);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnparseableVerdict);
  }
}

TEST(Judge, PromptCarriesTaskKeyPointsAndResponse) {
  const auto t = test::trajectory_with("f-1", "agent-m", 4, 1, 1, 1);
  const auto p = evaluation_prompt(kTask, kTask.key_points, t, srv_tools(1));
  EXPECT_NE(p.find(kTask.instruction), std::string::npos);
  EXPECT_NE(p.find("1. Multiply\n2. Report 3600"), std::string::npos);
  EXPECT_NE(p.find("does thing 0"), std::string::npos);
  EXPECT_NE(p.find("done"), std::string::npos);
}

TEST(JudgmentFile, RoundTripAndVersion) {
  TempDir dir;
  JudgmentSet set;
  set.judgments.push_back({"a", "m", "j", "because", Status::success, KeyPointSource::generated});
  set.failures.push_back({"b", "no trajectory"});
  save_judgments(set, dir / "j.json");
  EXPECT_EQ(load_judgments(dir / "j.json"), set);
  auto doc = to_json(set);
  doc["format_version"] = 2;
  try {
    judgment_set_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::VersionMismatch);
  }
}

// --- success rates --------------------------------------------------------------------

TEST(Rates, HalfUpRounding) {
  EXPECT_EQ((Rate{75, 95}).str(), "78.95");
  EXPECT_EQ((Rate{2, 3}).str(), "66.67");
  EXPECT_EQ((Rate{1, 3}).str(), "33.33");
  EXPECT_EQ((Rate{1, 20000}).hundredths(), 1);  // exactly 0.005% rounds up
  EXPECT_EQ((Rate{0, 0}).str(), "n/a");
  EXPECT_EQ((Rate{0, 0}).hundredths(), 0);
  EXPECT_EQ((Rate{7, 7}).str(), "100.00");
}

TEST(Rates, PerDomainTable) {
  const auto j = test::judged_tasks({{Domain::Office, {28, 31}},
                                     {Domain::Leisure, {9, 14}},
                                     {Domain::Travel, {9, 12}},
                                     {Domain::Lifestyle, {12, 15}},
                                     {Domain::Finance, {11, 14}},
                                     {Domain::Shopping, {6, 9}}});
  const auto row = success_rates(j.judgments, j.tasks);
  EXPECT_EQ(row.domains.at(Domain::Office).str(), "90.32");
  EXPECT_EQ(row.domains.at(Domain::Leisure).str(), "64.29");
  EXPECT_EQ(row.domains.at(Domain::Travel).str(), "75.00");
  EXPECT_EQ(row.domains.at(Domain::Lifestyle).str(), "80.00");
  EXPECT_EQ(row.domains.at(Domain::Finance).str(), "78.57");
  EXPECT_EQ(row.domains.at(Domain::Shopping).str(), "66.67");
  EXPECT_EQ(row.overall, (Rate{75, 95}));
  EXPECT_EQ(row.overall.str(), "78.95");
}

TEST(Rates, AllFailedAndMissing) {
  const auto zero = test::judged_tasks({{Domain::Travel, {0, 4}}});
  EXPECT_EQ(success_rates(zero.judgments, zero.tasks).overall.str(), "0.00");

  auto j = test::judged_tasks({{Domain::Office, {1, 3}}});
  j.judgments.pop_back();
  try {
    success_rates(j.judgments, j.tasks);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingJudgment);
    EXPECT_NE(std::string(e.what()).find("Office-2"), std::string::npos);
  }
  auto dup = test::judged_tasks({{Domain::Office, {1, 2}}});
  dup.judgments.push_back(dup.judgments[0]);
  EXPECT_THROW(success_rates(dup.judgments, dup.tasks), Error);
}

// --- agreement ---------------------------------------------------------------------------

std::vector<HumanLabel> labels_matching(const std::vector<Judgment>& js, std::size_t flip) {
  std::vector<HumanLabel> out;
  for (std::size_t i = 0; i < js.size(); ++i) {
    HumanLabel l;
    l.task_id = js[i].task_id;
    l.status = js[i].status;
    if (i < flip) l.status = l.status == Status::success ? Status::failure : Status::success;
    out.push_back(l);
  }
  return out;
}

TEST(Agreement, Rates) {
  const auto j = test::judged_tasks({{Domain::Office, {50, 95}}});
  EXPECT_EQ(agreement_rate(j.judgments, labels_matching(j.judgments, 0)).at("judge-x").str(), "100.00");
  const auto r = agreement_rate(j.judgments, labels_matching(j.judgments, 18)).at("judge-x");
  EXPECT_EQ(r, (Rate{77, 95}));
  EXPECT_EQ(r.str(), "81.05");
  EXPECT_EQ(agreement_rate(j.judgments, labels_matching(j.judgments, 95)).at("judge-x").str(), "0.00");
}

TEST(Agreement, CoverageMustMatch) {
  const auto j = test::judged_tasks({{Domain::Office, {2, 4}}});
  auto labels = labels_matching(j.judgments, 0);
  labels.pop_back();
  try {
    agreement_rate(j.judgments, labels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CoverageMismatch);
  }
}

TEST(Agreement, OneRatePerJudge) {
  auto a = test::judged_tasks({{Domain::Office, {2, 4}}}, "m", "judge-a");
  const auto b = test::judged_tasks({{Domain::Office, {4, 4}}}, "m", "judge-b");
  const auto labels = labels_matching(a.judgments, 0);
  a.judgments.insert(a.judgments.end(), b.judgments.begin(), b.judgments.end());
  const auto rates = agreement_rate(a.judgments, labels);
  EXPECT_EQ(rates.at("judge-a").str(), "100.00");
  EXPECT_EQ(rates.at("judge-b").str(), "50.00");
}

// --- efficiency ----------------------------------------------------------------------------

TEST(Efficiency, MeansPerModel) {
  const std::vector<agent::Trajectory> ts = {test::trajectory_with("a", "m", 10, 1, 2, 2),
                                             test::trajectory_with("b", "m", 6, 1, 2, 2)};
  EXPECT_EQ(agent::trajectory_stats(ts[0]), (agent::TrajectoryStats{10, 1, 2, 2}));
  const auto rows = efficiency_table(ts, {});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].trajectories, 2u);
  EXPECT_DOUBLE_EQ(rows[0].steps, 8);
  EXPECT_DOUBLE_EQ(rows[0].tools, 1);
  EXPECT_DOUBLE_EQ(rows[0].executes, 2);
  EXPECT_DOUBLE_EQ(rows[0].routes, 2);
}

TEST(Efficiency, SortedBySuccess) {
  const auto ja = test::judged_tasks({{Domain::Office, {1, 2}}}, "weak");
  const auto jb = test::judged_tasks({{Domain::Office, {2, 2}}}, "strong");
  auto js = ja.judgments;
  js.insert(js.end(), jb.judgments.begin(), jb.judgments.end());
  const std::vector<agent::Trajectory> ts = {test::trajectory_with("a", "weak", 3, 0, 0, 1),
                                             test::trajectory_with("b", "strong", 3, 0, 0, 1)};
  const auto rows = efficiency_table(ts, js);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].model_id, "strong");
  EXPECT_EQ(rows[0].overall.str(), "100.00");
  EXPECT_EQ(rows[1].overall.str(), "50.00");
}

// --- pareto --------------------------------------------------------------------------------

TEST(Pareto, Examples) {
  const auto f = pareto_frontier({{"A", 1, 50}, {"B", 2, 60}, {"C", 3, 55}, {"D", 4, 80}});
  EXPECT_EQ(f, (std::vector<ParetoPoint>{{"A", 1, 50}, {"B", 2, 60}, {"D", 4, 80}}));
  // identical points both stay
  EXPECT_EQ(pareto_frontier({{"x", 1, 10}, {"y", 1, 10}}).size(), 2u);
  // same cost, lower success is dominated
  EXPECT_EQ(pareto_frontier({{"x", 1, 10}, {"y", 1, 9}}), (std::vector<ParetoPoint>{{"x", 1, 10}}));
  EXPECT_TRUE(pareto_frontier({}).empty());
  EXPECT_THROW(pareto_frontier({{"z", 0, 10}}), Error);
  EXPECT_THROW(pareto_frontier({{"z", -1, 10}}), Error);
  EXPECT_TRUE(dominates({"a", 1, 5}, {"b", 2, 5}));
  EXPECT_FALSE(dominates({"a", 1, 5}, {"b", 1, 5}));
}

// --- error distribution ----------------------------------------------------------------------

TEST(Errors, Distribution) {
  std::vector<ErrorLabel> labels;
  int n = 0;
  for (auto c : kErrorCategories) labels.push_back({"t" + std::to_string(n++), c, "a"});
  auto d = error_distribution(labels);
  EXPECT_EQ(d.total, 4u);
  for (auto c : kErrorCategories) EXPECT_DOUBLE_EQ(d.proportions->at(c), 0.25);
  EXPECT_EQ(d.modal, ErrorCategory::QueryError);  // first on ties

  labels.push_back({"t9", ErrorCategory::RetrieveError, "a"});
  EXPECT_EQ(error_distribution(labels).modal, ErrorCategory::RetrieveError);

  const auto empty = error_distribution({});
  EXPECT_EQ(empty.total, 0u);
  EXPECT_FALSE(empty.proportions.has_value());
  EXPECT_FALSE(empty.modal.has_value());
  EXPECT_EQ(empty.counts.size(), 4u);

  labels.push_back({"t0", ErrorCategory::ToolError, "b"});
  EXPECT_THROW(error_distribution(labels), Error);
}

// --- inputs ------------------------------------------------------------------------------------

TEST(Inputs, LabelsAndPrices) {
  const auto labels = load_human_labels(test::fixtures_dir() / "eval" / "human_labels.json");
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels[2].error_category, "ToolError");
  EXPECT_EQ(error_labels(labels).size(), 1u);

  const json success_with_category = {
      {"format_version", 1},
      {"labels", {{{"task_id", "a"}, {"status", "success"}, {"error_category", "ToolError"}}}}};
  EXPECT_THROW(parse_human_labels(success_with_category), Error);
  EXPECT_THROW(parse_human_labels({{"format_version", 1}, {"labels", {{{"task_id", "a"}, {"status", "meh"}}}}}),
               Error);

  const auto prices = parse_prices(json::parse(
      R"({"format_version": 1, "models": {"a": {"cost": 2.5}, "b": {"prompt_per_mtok": 1, "completion_per_mtok": 4}}})"));
  EXPECT_EQ(prices.at("a").flat_cost, 2.5);
  ASSERT_TRUE(prices.at("b").per_token.has_value());
  EXPECT_THROW(parse_prices(json::parse(R"({"format_version": 1, "models": {"a": {"prompt_per_mtok": 1}}})")),
               Error);
}

// --- report ---------------------------------------------------------------------------------------

RunData run_of(const std::string& model, int successes, int total, llm::TokenUsage usage) {
  auto j = test::judged_tasks({{Domain::Office, {successes, total}}}, model);
  RunData r{model, j.tasks, {}, j.judgments};
  for (const auto& t : j.tasks) {
    auto traj = test::trajectory_with(t.task_id, model, 3, 0, 0, 1);
    traj.token_usage = usage;
    r.trajectories.push_back(traj);
  }
  return r;
}

TEST(Report, TwoRunsSortedWithFrontier) {
  const std::vector<RunData> runs = {run_of("cheap", 1, 4, {1000, 100}), run_of("good", 3, 4, {4000, 400})};
  const std::map<std::string, PriceEntry> prices = {{"cheap", {llm::Price{1, 4}, std::nullopt}},
                                                    {"good", {llm::Price{1, 4}, std::nullopt}}};
  const auto rep = build_report(runs, std::nullopt, prices);
  ASSERT_EQ(rep.success.size(), 2u);
  EXPECT_EQ(rep.success[0].model_id, "good");
  EXPECT_EQ(rep.efficiency[0].model_id, "good");
  ASSERT_TRUE(rep.pareto_frontier.has_value());
  EXPECT_EQ(rep.pareto_frontier->size(), 2u);
  EXPECT_DOUBLE_EQ(rep.pareto_points->at(1).cost, 1000 * 1e-6 + 100 * 4e-6);
  EXPECT_FALSE(rep.agreement.has_value());

  const auto text = render_text(rep);
  EXPECT_NE(text.find("Task success rate"), std::string::npos);
  EXPECT_NE(text.find("75.00"), std::string::npos);
  EXPECT_NE(text.find("frontier"), std::string::npos);
  EXPECT_NE(text.find("no human labels"), std::string::npos);
  EXPECT_LT(text.find("good"), text.find("cheap"));
  EXPECT_EQ(to_json(rep)["success"].size(), 2u);
}

TEST(Report, WithoutPricesHasNoticeAndNoFrontier) {
  const auto rep = build_report({run_of("m", 2, 3, {10, 1})}, std::nullopt, std::nullopt);
  EXPECT_FALSE(rep.pareto_frontier.has_value());
  bool noticed = false;
  for (const auto& n : rep.notices) noticed |= n.find("price") != std::string::npos;
  EXPECT_TRUE(noticed);
}

}  // namespace
}  // namespace mcpgw::eval
