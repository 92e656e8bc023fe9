#pragma once

// Aggregation and artifact writers: results CSV, summary JSON, per-figure
// tidy CSVs, Q-table export and reward traces.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcsm/harness.hpp"
#include "qcsm/mdp.hpp"
#include "qcsm/qlearning.hpp"
#include "qcsm/stats.hpp"

namespace qcsm {

/// One aggregated cell of the results CSV.
struct SummaryRow {
  std::string experiment;
  std::string method;
  std::uint32_t services = 0;
  std::uint32_t n_sensors = 0;
  std::string metric;
  double value = 0.0;
  std::optional<Interval> ci;
  std::string unit;
  std::size_t seed_count = 0;
};

struct Summary;

struct SummaryReport {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

/// Mean and 95% t-interval per (experiment, method, services, n, metric)
/// across seeds, plus `relative_gap_<metric>` rows (percent, positive when
/// QCSM is better). Fewer than two seeds leaves the interval empty and warns.
SummaryReport summarize(const std::vector<ExperimentResult>& results);

inline constexpr const char* kResultsHeader = "experiment,method,services,n_sensors,metric,value,ci_low,ci_high,unit,seed_count";

std::string results_csv(const SummaryReport& report);
json summary_json(const std::vector<ExperimentResult>& results, const SummaryReport& report);
std::string table_csv(const Table& table);

/// Q-values with state and action labels, keyed to the config hash.
json qtable_to_json(const QTable& q, const ActionSpace& actions, const ScenarioConfig& config);
/// episode,cumulative_reward,epsilon,lr,seed
std::string reward_trace_csv(const TrainingResult& result, double lr, std::uint64_t seed);

/// Writes `content` to `path` (binary, truncating). Throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

/// File name of the tidy table of an experiment: fig3_response.csv etc.
std::string figure_file(const std::string& experiment);

}  // namespace qcsm
