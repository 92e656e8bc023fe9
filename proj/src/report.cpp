#include "qcsm/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qcsm {

namespace {

using CellKey = std::tuple<std::string, std::uint32_t, std::uint32_t, std::string>;  // method, services, n, metric

/// Lower is better for response time; higher for everything else.
bool lower_is_better(const std::string& metric) { return metric == "response_time"; }

std::string ci_text(const std::optional<Interval>& ci, bool low) {
  if (!ci) return "";
  return format_number(low ? ci->low : ci->high);
}

}  // namespace

SummaryReport summarize(const std::vector<ExperimentResult>& results) {
  if (results.empty()) throw ContractViolation("summarize: no results");
  SummaryReport out;
  for (const auto& result : results) {
    if (result.seeds.size() < 2)
      out.warnings.push_back(result.experiment + ": fewer than 2 seeds, confidence intervals left empty");

    // keep first-seen order so the CSV follows the experiment's own ordering
    std::vector<CellKey> order;
    std::map<CellKey, std::pair<std::vector<double>, std::string>> cells;
    for (const auto& row : result.rows) {
      CellKey key{std::string(to_string(row.method)), row.services, row.n_sensors, row.metric};
      auto [it, inserted] = cells.try_emplace(key);
      if (inserted) {
        order.push_back(key);
        it->second.second = row.unit;
      }
      it->second.first.push_back(row.value);
    }

    std::map<CellKey, double> means;
    for (const auto& key : order) {
      const auto& [values, unit] = cells.at(key);
      const Summary s = summarize_samples(values);
      means[key] = s.mean;
      out.rows.push_back({result.experiment, std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                          s.mean, s.ci95, unit, values.size()});
    }

    // relative gap per paired cell, averaged over the per-seed gaps
    for (const auto& key : order) {
      if (std::get<0>(key) != "QCSM") continue;
      CellKey base_key = key;
      std::get<0>(base_key) = "Baseline";
      if (!cells.count(base_key)) continue;
      const auto& q = cells.at(key).first;
      const auto& b = cells.at(base_key).first;
      if (q.size() != b.size()) continue;
      std::vector<double> gaps;
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (b[i] == 0.0) continue;
        const double diff = lower_is_better(std::get<3>(key)) ? b[i] - q[i] : q[i] - b[i];
        gaps.push_back(100.0 * diff / b[i]);
      }
      if (gaps.empty()) continue;
      const Summary s = summarize_samples(gaps);
      out.rows.push_back({result.experiment, "QCSM_vs_Baseline", std::get<1>(key), std::get<2>(key),
                          "relative_gap_" + std::get<3>(key), s.mean, s.ci95, "percent", gaps.size()});
    }
  }
  return out;
}

std::string results_csv(const SummaryReport& report) {
  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const auto& r : report.rows) {
    os << r.experiment << ',' << r.method << ',' << r.services << ',' << r.n_sensors << ',' << r.metric << ','
       << format_number(r.value) << ',' << ci_text(r.ci, true) << ',' << ci_text(r.ci, false) << ',' << r.unit << ','
       << r.seed_count << '\n';
  }
  return os.str();
}

json summary_json(const std::vector<ExperimentResult>& results, const SummaryReport& report) {
  json doc = {{"experiments", json::array()}, {"warnings", report.warnings}};
  for (const auto& result : results) {
    json cells = json::array();
    for (const auto& r : report.rows) {
      if (r.experiment != result.experiment) continue;
      json cell = {{"method", r.method},  {"services", r.services}, {"n_sensors", r.n_sensors},
                   {"metric", r.metric},  {"value", r.value},       {"unit", r.unit},
                   {"seed_count", r.seed_count}};
      cell["ci95"] = r.ci ? json::array({r.ci->low, r.ci->high}) : json(nullptr);
      cells.push_back(std::move(cell));
    }
    doc["experiments"].push_back({{"experiment", result.experiment},
                                  {"config_hash", hex64(result.config_hash)},
                                  {"seeds", result.seeds},
                                  {"cells", std::move(cells)}});
  }
  return doc;
}

std::string table_csv(const Table& table) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return os.str();
}

json qtable_to_json(const QTable& q, const ActionSpace& actions, const ScenarioConfig& config) {
  json doc;
  doc["config_hash"] = hex64(config_hash(config));
  json labels = json::array();
  for (std::size_t a = 0; a < q.num_actions(); ++a) labels.push_back(actions.label(actions.at(a)));
  doc["actions"] = std::move(labels);
  json states = json::array();
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    json visits = json::array();
    for (std::size_t a = 0; a < q.num_actions(); ++a) visits.push_back(q.visits(s, a));
    const auto row = q.row(s);
    states.push_back({{"index", s},
                      {"label", actions.state_label(s)},
                      {"values", std::vector<double>(row.begin(), row.end())},
                      {"visits", std::move(visits)},
                      {"greedy_action", q.argmax(s)}});
  }
  doc["states"] = std::move(states);
  return doc;
}

std::string reward_trace_csv(const TrainingResult& result, double lr, std::uint64_t seed) {
  std::ostringstream os;
  os << "episode,cumulative_reward,epsilon,lr,seed\n";
  const std::string lr_text = format_number(lr);
  for (std::size_t e = 0; e < result.reward_trace.size(); ++e)
    os << e << ',' << format_number(result.reward_trace[e]) << ',' << format_number(result.epsilons[e]) << ','
       << lr_text << ',' << seed << '\n';
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string figure_file(const std::string& experiment) {
  if (experiment == "response") return "fig3_response.csv";
  if (experiment == "lifetime") return "fig4_lifetime.csv";
  if (experiment == "reward") return "fig5_reward.csv";
  throw ContractViolation("figure_file: unknown experiment " + experiment);
}

}  // namespace qcsm
