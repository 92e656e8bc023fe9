#pragma once

// End-to-end experiments: query response time vs. fleet size, device
// lifetime per QoS class, and cumulative reward vs. learning rate, each
// comparing the cognitive manager against the static baseline.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcsm/gateway.hpp"
#include "qcsm/mdp.hpp"
#include "qcsm/model.hpp"
#include "qcsm/qlearning.hpp"

namespace qcsm {

/// Thrown when a run is cancelled through HarnessOptions::cancel.
class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("cancelled") {}
};

/// Non-cognitive comparator: every service pinned to DelaySensitive, no
/// format normalization at ingest.
struct BaselineManager {
  static constexpr GatewayMode mode = GatewayMode::Baseline;
  static NetworkState assignment(std::size_t num_services) {
    return NetworkState{std::vector<QosClassId>(num_services, QosClassId::DelaySensitive)};
  }
};

enum class Method : std::uint8_t { QCSM, Baseline };
std::string_view to_string(Method method);

/// One measured value of one (method, services, n, seed) run.
struct MetricsRecord {
  Method method = Method::QCSM;
  std::uint32_t services = 0;
  std::uint32_t n_sensors = 0;
  std::string metric;
  double value = 0.0;
  std::string unit;
  std::uint64_t seed = 0;

  bool operator==(const MetricsRecord&) const = default;
};

/// Tidy per-figure table; cells are already formatted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RewardTrace {
  double lr = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> rewards;
  std::vector<double> cumulative;
  std::vector<double> epsilons;
  std::size_t exploration_episodes = 0;
};

struct ExperimentResult {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsRecord> rows;
  Table figure;
  /// Reward experiment only.
  std::vector<RewardTrace> traces;
};

struct HarnessOptions {
  /// Worker threads for independent cells; 0 = hardware concurrency.
  unsigned threads = 0;
  const std::atomic<bool>* cancel = nullptr;
  /// Progress lines for humans.
  std::function<void(const std::string&)> progress;
  /// When set, each lifetime run writes one fleet snapshot per cycle (NDJSON) here.
  std::optional<std::filesystem::path> dump_fleet_dir;
};

struct ResponseOptions {
  std::vector<std::uint32_t> sensor_counts{10, 50, 98, 150};
  std::vector<std::uint32_t> service_counts{2, 3};
  CostModel cost{};
  std::uint32_t warmup_cycles = 50;
  /// Queries issued after warm-up, one per cycle, each over the last `window_cycles`.
  std::uint32_t queries = 10;
  std::uint32_t window_cycles = 2;
  /// Keeps the QCSM pool of the largest 3-service cell of the first seed.
  bool keep_pool = false;
};

struct LifetimeOptions {
  std::vector<std::uint32_t> service_counts{2, 3};
  /// Overrides config.sim_cycles when set.
  std::optional<std::uint64_t> cycles;
  std::size_t episodes = 10000;
  double lr = 0.07;
  double gamma = 0.99;
};

struct RewardOptions {
  std::vector<double> lrs{0.7, 0.07, 0.007};
  std::size_t episodes = 10000;
  double gamma = 0.99;
  std::uint32_t n_sensors = 98;
  std::uint32_t services = 3;
};

/// Service list used for an experiment with `count` services (2 or 3).
std::vector<ServiceId> services_for(std::uint32_t count);

struct ResponseRun {
  ExperimentResult result;
  std::shared_ptr<AgentManager> kept_pool;
};

ResponseRun run_response_time_experiment(const ScenarioConfig& config, const ResponseOptions& response,
                                         const std::vector<std::uint64_t>& seeds,
                                         const HarnessOptions& options = {});
ExperimentResult run_lifetime_experiment(const ScenarioConfig& config, const LifetimeOptions& lifetime,
                                         const std::vector<std::uint64_t>& seeds,
                                         const HarnessOptions& options = {});
ExperimentResult run_reward_experiment(const ScenarioConfig& config, const RewardOptions& reward,
                                       const std::vector<std::uint64_t>& seeds,
                                       const HarnessOptions& options = {});

/// Mean reward over episodes [first, last).
double mean_reward(const RewardTrace& trace, std::size_t first, std::size_t last);

/// Shortest round-trip decimal form; stable across runs.
std::string format_number(double value);

}  // namespace qcsm
