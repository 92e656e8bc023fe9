#include <gtest/gtest.h>

#include <cmath>

#include "qcsm/harness.hpp"
#include "qcsm/report.hpp"
#include "qcsm/stats.hpp"
#include "support/oracles.hpp"

using namespace qcsm;

namespace {

ScenarioConfig base() {
  const std::vector<ServiceId> ids{ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation};
  return build_scenario(ids, 50, 0);
}

const SummaryRow* find(const SummaryReport& r, const std::string& method, std::uint32_t services, std::uint32_t n,
                       const std::string& metric) {
  for (const auto& row : r.rows)
    if (row.method == method && row.services == services && row.n_sensors == n && row.metric == metric) return &row;
  return nullptr;
}

}  // namespace

TEST(Stats, TQuantilesMatchTables) {
  for (std::size_t df = 1; df <= 10; ++df) EXPECT_NEAR(t_quantile_975(df), oracle::t975_table(df), 5e-4);
}

TEST(Stats, IntervalExamples) {
  const std::vector<double> five{1, 2, 3, 4, 5};
  const auto s = summarize_samples(five);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  ASSERT_TRUE(s.ci95);
  EXPECT_NEAR((s.ci95->high - s.ci95->low) / 2, 2.776 * std::sqrt(2.5) / std::sqrt(5.0), 1e-3);
  EXPECT_NEAR((s.ci95->high - s.ci95->low) / 2, 1.963, 1e-3);

  const std::vector<double> same(5, 0.7);
  const auto z = summarize_samples(same);
  ASSERT_TRUE(z.ci95);
  EXPECT_EQ(z.ci95->high - z.ci95->low, 0.0);

  const std::vector<double> one{4.0};
  EXPECT_FALSE(summarize_samples(one).ci95.has_value());
}

TEST(Summarize, RelativeGapAndWarnings) {
  ExperimentResult r;
  r.experiment = "response";
  r.seeds = {0};
  r.rows = {{Method::QCSM, 2, 10, "response_time", 3.0, "ms", 0},
            {Method::Baseline, 2, 10, "response_time", 4.0, "ms", 0}};
  const auto report = summarize({r});
  ASSERT_EQ(report.warnings.size(), 1u);
  const auto* gap = find(report, "QCSM_vs_Baseline", 2, 10, "relative_gap_response_time");
  ASSERT_NE(gap, nullptr);
  EXPECT_DOUBLE_EQ(gap->value, 25.0);
  EXPECT_FALSE(gap->ci.has_value());
  const std::string csv = results_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kResultsHeader);
  EXPECT_NE(csv.find("response,QCSM,2,10,response_time,3,,,ms,1"), std::string::npos);
  EXPECT_THROW(summarize({}), ContractViolation);
}

TEST(Summarize, LifetimeGapIsPositiveWhenQcsmLastsLonger) {
  ExperimentResult r;
  r.experiment = "lifetime";
  r.seeds = {0, 1};
  for (std::uint64_t s : {0, 1}) {
    r.rows.push_back({Method::QCSM, 2, 50, "normalized_lifetime_all", 0.6, "fraction", s});
    r.rows.push_back({Method::Baseline, 2, 50, "normalized_lifetime_all", 0.5, "fraction", s});
  }
  const auto report = summarize({r});
  EXPECT_TRUE(report.warnings.empty());
  EXPECT_NEAR(find(report, "QCSM_vs_Baseline", 2, 50, "relative_gap_normalized_lifetime_all")->value, 20.0, 1e-12);
  const auto doc = summary_json({r}, report);
  EXPECT_EQ(doc["experiments"][0]["seeds"].size(), 2u);
}

TEST(ResponseExperiment, OrderingAndDegenerateCell) {
  ResponseOptions o;
  o.sensor_counts = {0, 10, 150};
  o.queries = 3;
  const auto run = run_response_time_experiment(base(), o, {0, 1});
  const auto report = summarize({run.result});
  for (std::uint32_t s : {2u, 3u}) {
    EXPECT_DOUBLE_EQ(find(report, "QCSM", s, 0, "response_time")->value, o.cost.c_query_base);
    EXPECT_DOUBLE_EQ(find(report, "Baseline", s, 0, "response_time")->value, o.cost.c_query_base);
    for (std::uint32_t n : {10u, 150u})
      EXPECT_LT(find(report, "QCSM", s, n, "response_time")->value,
                find(report, "Baseline", s, n, "response_time")->value);
  }
  EXPECT_GE(find(report, "QCSM_vs_Baseline", 3, 150, "relative_gap_response_time")->value,
            find(report, "QCSM_vs_Baseline", 2, 150, "relative_gap_response_time")->value);
  EXPECT_EQ(run.result.figure.rows.size(), 2u * 2u * 3u);
}

TEST(LifetimeExperiment, ZeroDurationLeavesEveryBatteryFull) {
  LifetimeOptions o;
  o.cycles = 0;
  const auto r = run_lifetime_experiment(base(), o, {0, 1});
  for (const auto& row : r.rows) {
    if (row.unit == "years") EXPECT_EQ(row.value, 10.0);
    if (row.unit == "fraction") EXPECT_EQ(row.value, 1.0);
  }
}

TEST(LifetimeExperiment, QcsmNeverShortensLifetime) {
  LifetimeOptions o;
  o.cycles = 3000;
  o.episodes = 3000;
  o.service_counts = {2};
  const auto r = run_lifetime_experiment(base(), o, {0, 1});
  const auto report = summarize({r});
  for (const char* metric : {"normalized_lifetime_DelaySensitive", "normalized_lifetime_DelayTolerant",
                             "normalized_lifetime_all"}) {
    EXPECT_GE(find(report, "QCSM", 2, 50, metric)->value, find(report, "Baseline", 2, 50, metric)->value) << metric;
  }
  for (const char* m : {"QCSM", "Baseline"})
    EXPECT_GE(find(report, m, 2, 50, "normalized_lifetime_DelayTolerant")->value,
              find(report, m, 2, 50, "normalized_lifetime_DelaySensitive")->value);
}

TEST(RewardExperiment, TracesAndFigureShape) {
  RewardOptions o;
  o.episodes = 1000;
  o.lrs = {0.7, 0.07};
  const auto cfg = base();
  const auto r = run_reward_experiment(cfg, o, {0, 1});
  ASSERT_EQ(r.traces.size(), 4u);
  const std::size_t windows = (1000 + cfg.batch_size - 1) / cfg.batch_size;
  EXPECT_EQ(r.figure.rows.size(), 4u * windows);
  for (const auto& t : r.traces) EXPECT_EQ(t.exploration_episodes, 100u);

  const auto again = run_reward_experiment(cfg, o, {0, 1});
  for (std::size_t i = 0; i < r.traces.size(); ++i) EXPECT_EQ(r.traces[i].cumulative, again.traces[i].cumulative);
  EXPECT_EQ(table_csv(r.figure), table_csv(again.figure));
}

TEST(Harness, RejectsEmptySeedLists) {
  EXPECT_THROW(run_reward_experiment(base(), {}, {}), ConfigError);
  EXPECT_THROW(run_lifetime_experiment(base(), {}, {}), ConfigError);
  EXPECT_THROW(run_response_time_experiment(base(), {}, {}), ConfigError);
}

TEST(Harness, CancellationStopsTheRun) {
  std::atomic<bool> cancel{true};
  HarnessOptions h;
  h.cancel = &cancel;
  EXPECT_THROW(run_lifetime_experiment(base(), {}, {0}, h), Cancelled);
}

TEST(Report, QTableExportCarriesLabelsAndHash) {
  const auto cfg = base();
  QTable q(8, 7);
  q.set_value(3, 2, 1.5);
  const auto doc = qtable_to_json(q, ActionSpace(cfg.services), cfg);
  EXPECT_EQ(doc["config_hash"], hex64(config_hash(cfg)));
  EXPECT_EQ(doc["actions"].size(), 7u);
  EXPECT_EQ(doc["states"][3]["values"][2], 1.5);
  EXPECT_EQ(doc["states"][3]["greedy_action"], 2);
}

TEST(Report, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.5}) EXPECT_EQ(std::stod(format_number(v)), v);
}
