#include "qcsm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "qcsm/environment.hpp"
#include "qcsm/stats.hpp"

namespace qcsm {

std::string_view to_string(Method method) { return method == Method::QCSM ? "QCSM" : "Baseline"; }

std::string format_number(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<ServiceId> services_for(std::uint32_t count) {
  switch (count) {
    case 1: return {ServiceId::Transportation};
    case 2: return {ServiceId::WindTurbine, ServiceId::Transportation};
    case 3: return {ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation};
    default: throw ConfigError("services_for: service count must be 1, 2 or 3");
  }
}

double mean_reward(const RewardTrace& trace, std::size_t first, std::size_t last) {
  last = std::min(last, trace.rewards.size());
  if (first >= last) throw ContractViolation("mean_reward: empty range");
  double sum = 0.0;
  for (std::size_t e = first; e < last; ++e) sum += trace.rewards[e];
  return sum / static_cast<double>(last - first);
}

namespace {

void check_cancel(const HarnessOptions& options) {
  if (options.cancel && options.cancel->load()) throw Cancelled();
}

void report(const HarnessOptions& options, const std::string& line) {
  if (options.progress) options.progress(line);
}

/// Runs f(0..n-1) on a small worker pool. Each index owns its output slot,
/// so results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

/// Copy of `base` with the given service set, fleet size and seed.
ScenarioConfig derive_config(const ScenarioConfig& base, std::uint32_t services, std::uint32_t n,
                             std::uint64_t seed) {
  ScenarioConfig cfg = base;
  cfg.services.clear();
  for (ServiceId id : services_for(services)) {
    auto it = std::find_if(base.services.begin(), base.services.end(),
                           [&](const ServiceSpec& s) { return s.id == id; });
    cfg.services.push_back(it != base.services.end() ? *it : standard_service(id));
  }
  cfg.num_sensors = n;
  cfg.seed = seed;
  require_valid(cfg, true);
  return cfg;
}

struct Aggregate {
  Summary summary;
  std::string ci_low;
  std::string ci_high;
};

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a{summarize_samples(values), "", ""};
  if (a.summary.ci95) {
    a.ci_low = format_number(a.summary.ci95->low);
    a.ci_high = format_number(a.summary.ci95->high);
  }
  return a;
}

// ---- response time ---------------------------------------------------------

struct ResponseCell {
  std::uint32_t services;
  std::uint32_t n;
  std::uint64_t seed;
  double qcsm_ms = 0.0;
  double baseline_ms = 0.0;
  double records = 0.0;
  std::shared_ptr<AgentManager> pool;
};

void run_response_cell(const ScenarioConfig& base, const ResponseOptions& opt, ResponseCell& cell,
                       bool keep, const HarnessOptions& options) {
  if (cell.n == 0) {
    // no fleet: both managers answer from an empty pool
    const AgentManager q(GatewayMode::QCSM, opt.cost, {});
    const AgentManager b(GatewayMode::Baseline, opt.cost, {});
    cell.qcsm_ms = q.query(std::nullopt, {}).response_time_ms;
    cell.baseline_ms = b.query(std::nullopt, {}).response_time_ms;
    return;
  }
  const ScenarioConfig cfg = derive_config(base, cell.services, cell.n, cell.seed);
  const auto routes = routes_for(cfg);
  auto qcsm = std::make_shared<AgentManager>(GatewayMode::QCSM, opt.cost, routes);
  AgentManager baseline(GatewayMode::Baseline, opt.cost, routes);

  // identical traffic for both managers; all services stay DelaySensitive
  NetworkSimulation sim(cfg, cell.seed, true);
  sim.apply(BaselineManager::assignment(cfg.services.size()));
  const auto sink = [&](const Envelope& e, std::uint64_t cycle) {
    qcsm->ingest(e, cycle);
    baseline.ingest(e, cycle);
  };

  const std::uint64_t total = std::uint64_t{opt.warmup_cycles} + opt.queries;
  for (std::uint64_t c = 0; c < total; ++c) {
    if (c % 64 == 0) check_cancel(options);
    sim.advance(sink);
    if (c < opt.warmup_cycles) continue;
    const CycleWindow window{c + 1 >= opt.window_cycles ? c + 1 - opt.window_cycles : 0, c};
    const QueryResult q = qcsm->query(std::nullopt, window);
    const QueryResult b = baseline.query(std::nullopt, window);
    cell.qcsm_ms += q.response_time_ms;
    cell.baseline_ms += b.response_time_ms;
    cell.records += static_cast<double>(q.documents.size());
  }
  if (opt.queries > 0) {
    cell.qcsm_ms /= opt.queries;
    cell.baseline_ms /= opt.queries;
    cell.records /= opt.queries;
  }
  if (keep) cell.pool = std::move(qcsm);
}

// ---- lifetime ---------------------------------------------------------------

constexpr std::size_t kAllClasses = 2;

struct LifetimeCell {
  std::uint32_t services;
  std::uint64_t seed;
  // [method][DS, DT, all] mean normalized lifetime; NaN when the group is empty
  std::array<std::array<double, 3>, 2> lifetime{};
  std::array<std::array<std::uint32_t, 3>, 2> count{};
};

/// Class a service nominally needs: DelaySensitive when its delay bound does
/// not allow waiting longer than one cycle.
QosClassId nominal_class(const ScenarioConfig& cfg, ServiceId id) {
  return cfg.services[cfg.service_position(id)].max_delay_ms <= cfg.cycle_ms ? QosClassId::DelaySensitive
                                                                              : QosClassId::DelayTolerant;
}

void simulate_lifetime(const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t cycles,
                       const CandidateDatastore* candidate, LifetimeCell& cell, std::size_t method,
                       const HarnessOptions& options, const std::string& tag) {
  NetworkSimulation sim(cfg, seed, true);
  const ActionSpace actions(cfg.services);
  sim.apply(BaselineManager::assignment(cfg.services.size()));

  std::ofstream dump;
  if (options.dump_fleet_dir) {
    dump.open(*options.dump_fleet_dir / ("fleet_" + tag + ".ndjson"), std::ios::binary);
    if (!dump) throw std::runtime_error("cannot write fleet dump in " + options.dump_fleet_dir->string());
  }
  for (std::uint64_t c = 0; c < cycles; ++c) {
    if (c % 256 == 0) check_cancel(options);
    if (candidate && c % cfg.decision_cycles == 0) {
      const NetworkState current = sim.state();
      sim.apply(actions.apply(current, recommend(*candidate, actions, current.index())));
    }
    sim.advance();
    if (dump.is_open()) dump << sim.fleet().snapshot(sim.cycle()).dump() << '\n';
  }

  std::array<double, 3> sum{};
  auto& count = cell.count[method];
  for (const auto& node : sim.fleet().nodes()) {
    const auto k = static_cast<std::size_t>(nominal_class(cfg, node.service));
    sum[k] += node.lifetime_fraction;
    sum[kAllClasses] += node.lifetime_fraction;
    ++count[k];
    ++count[kAllClasses];
  }
  for (std::size_t k = 0; k < 3; ++k)
    cell.lifetime[method][k] = count[k] ? sum[k] / count[k] : std::numeric_limits<double>::quiet_NaN();
}

std::string_view class_label(std::size_t k) {
  return k == kAllClasses ? "all" : to_string(static_cast<QosClassId>(k));
}

// ---- reward ----------------------------------------------------------------

struct RewardCell {
  double lr;
  std::uint64_t seed;
  RewardTrace trace;
};

}  // namespace

ResponseRun run_response_time_experiment(const ScenarioConfig& config, const ResponseOptions& response,
                                         const std::vector<std::uint64_t>& seeds,
                                         const HarnessOptions& options) {
  if (seeds.empty()) throw ConfigError("response experiment: seed list is empty");
  std::vector<ResponseCell> cells;
  for (auto s : response.service_counts)
    for (auto n : response.sensor_counts)
      for (auto seed : seeds) cells.push_back({s, n, seed, 0.0, 0.0, 0.0, nullptr});

  const std::uint32_t largest = response.sensor_counts.empty()
                                    ? 0
                                    : *std::max_element(response.sensor_counts.begin(), response.sensor_counts.end());
  const std::uint32_t most_services =
      response.service_counts.empty()
          ? 0
          : *std::max_element(response.service_counts.begin(), response.service_counts.end());

  report(options, "response: " + std::to_string(cells.size()) + " runs");
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    check_cancel(options);
    auto& cell = cells[i];
    const bool keep = response.keep_pool && cell.n == largest && cell.services == most_services &&
                      cell.seed == seeds.front();
    run_response_cell(config, response, cell, keep, options);
  });

  ResponseRun out;
  auto& result = out.result;
  result.experiment = "response";
  result.config_hash = config_hash(config);
  result.seeds = seeds;
  result.figure.header = {"method", "services", "n_sensors", "response_time_ms", "ci_low",
                          "ci_high", "seed_count", "records_per_query"};
  for (const auto& cell : cells) {
    result.rows.push_back({Method::QCSM, cell.services, cell.n, "response_time", cell.qcsm_ms, "ms", cell.seed});
    result.rows.push_back(
        {Method::Baseline, cell.services, cell.n, "response_time", cell.baseline_ms, "ms", cell.seed});
    if (cell.pool) out.kept_pool = cell.pool;
  }

  for (Method m : {Method::QCSM, Method::Baseline}) {
    for (auto s : response.service_counts) {
      for (auto n : response.sensor_counts) {
        std::vector<double> values;
        double records = 0.0;
        for (const auto& cell : cells) {
          if (cell.services != s || cell.n != n) continue;
          values.push_back(m == Method::QCSM ? cell.qcsm_ms : cell.baseline_ms);
          records += cell.records;
        }
        const Aggregate a = aggregate(values);
        result.figure.rows.push_back({std::string(to_string(m)), std::to_string(s), std::to_string(n),
                                      format_number(a.summary.mean), a.ci_low, a.ci_high,
                                      std::to_string(values.size()),
                                      format_number(records / static_cast<double>(values.size()))});
      }
    }
  }
  return out;
}

ExperimentResult run_lifetime_experiment(const ScenarioConfig& config, const LifetimeOptions& lifetime,
                                         const std::vector<std::uint64_t>& seeds,
                                         const HarnessOptions& options) {
  if (seeds.empty()) throw ConfigError("lifetime experiment: seed list is empty");
  const std::uint64_t cycles = lifetime.cycles.value_or(config.sim_cycles);
  if (options.dump_fleet_dir) std::filesystem::create_directories(*options.dump_fleet_dir);

  std::vector<LifetimeCell> cells;
  for (auto s : lifetime.service_counts)
    for (auto seed : seeds) cells.push_back({s, seed});

  report(options, "lifetime: " + std::to_string(cells.size()) + " runs of " + std::to_string(cycles) + " cycles");
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    check_cancel(options);
    auto& cell = cells[i];
    const ScenarioConfig cfg = derive_config(config, cell.services, config.num_sensors, cell.seed);
    const std::string tag = std::to_string(cell.services) + "svc_s" + std::to_string(cell.seed);

    simulate_lifetime(cfg, cell.seed, cycles, nullptr, cell, static_cast<std::size_t>(Method::Baseline), options,
                      "Baseline_" + tag);
    if (cycles == 0) {
      // nothing drains; the policy cannot matter
      cell.lifetime[0] = cell.lifetime[1];
      cell.count[0] = cell.count[1];
      return;
    }
    AssignmentEnvironment env(cfg, cell.seed);
    TrainingOptions train;
    train.episodes = lifetime.episodes;
    train.lr = lifetime.lr;
    train.gamma = lifetime.gamma;
    train.seed = cell.seed;
    const TrainingResult trained = run_training(env, train);
    check_cancel(options);
    simulate_lifetime(cfg, cell.seed, cycles, &trained.candidate, cell, static_cast<std::size_t>(Method::QCSM),
                      options, "QCSM_" + tag);
    report(options, "lifetime: " + tag + " done");
  });

  ExperimentResult result;
  result.experiment = "lifetime";
  result.config_hash = config_hash(config);
  result.seeds = seeds;
  for (const auto& cell : cells) {
    for (Method m : {Method::QCSM, Method::Baseline}) {
      const auto mi = static_cast<std::size_t>(m);
      for (std::size_t k = 0; k < 3; ++k) {
        if (!cell.count[mi][k]) continue;
        const double v = cell.lifetime[mi][k];
        const std::string cls(class_label(k));
        result.rows.push_back({m, cell.services, config.num_sensors, "normalized_lifetime_" + cls, v, "fraction",
                               cell.seed});
        result.rows.push_back({m, cell.services, config.num_sensors, "lifetime_" + cls, v * kMaxLifetimeYears,
                               "years", cell.seed});
      }
    }
  }

  result.figure.header = {"method",  "services", "qos_class",  "normalized_lifetime",
                          "ci_low",  "ci_high",  "lifetime_years", "seed_count"};
  for (Method m : {Method::QCSM, Method::Baseline}) {
    const auto mi = static_cast<std::size_t>(m);
    for (auto s : lifetime.service_counts) {
      for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> values;
        for (const auto& cell : cells)
          if (cell.services == s && cell.count[mi][k]) values.push_back(cell.lifetime[mi][k]);
        if (values.empty()) continue;
        const Aggregate a = aggregate(values);
        result.figure.rows.push_back({std::string(to_string(m)), std::to_string(s), std::string(class_label(k)),
                                      format_number(a.summary.mean), a.ci_low, a.ci_high,
                                      format_number(a.summary.mean * kMaxLifetimeYears),
                                      std::to_string(values.size())});
      }
    }
  }
  return result;
}

ExperimentResult run_reward_experiment(const ScenarioConfig& config, const RewardOptions& reward,
                                       const std::vector<std::uint64_t>& seeds, const HarnessOptions& options) {
  if (seeds.empty()) throw ConfigError("reward experiment: seed list is empty");
  if (reward.episodes < 1) throw ConfigError("reward experiment: episodes must be >= 1");
  std::vector<RewardCell> cells;
  for (double lr : reward.lrs)
    for (auto seed : seeds) cells.push_back({lr, seed, {}});

  report(options, "reward: " + std::to_string(cells.size()) + " training runs of " +
                      std::to_string(reward.episodes) + " episodes");
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    check_cancel(options);
    auto& cell = cells[i];
    const ScenarioConfig cfg = derive_config(config, reward.services, reward.n_sensors, cell.seed);
    AssignmentEnvironment env(cfg, cell.seed);
    TrainingOptions train;
    train.episodes = reward.episodes;
    train.lr = cell.lr;
    train.gamma = reward.gamma;
    train.seed = cell.seed;
    TrainingResult trained = run_training(env, train);
    cell.trace.lr = cell.lr;
    cell.trace.seed = cell.seed;
    cell.trace.rewards = std::move(trained.rewards);
    cell.trace.cumulative = std::move(trained.reward_trace);
    cell.trace.epsilons = std::move(trained.epsilons);
    cell.trace.exploration_episodes = (reward.episodes + 9) / 10;
    report(options, "reward: lr=" + format_number(cell.lr) + " seed=" + std::to_string(cell.seed) + " done");
  });

  ExperimentResult result;
  result.experiment = "reward";
  result.config_hash = config_hash(config);
  result.seeds = seeds;
  result.figure.header = {"lr", "seed", "episode", "cumulative_reward", "window_mean_reward", "epsilon"};
  const std::size_t window = std::max<std::uint32_t>(1, config.batch_size);
  for (const auto& cell : cells) {
    const auto& t = cell.trace;
    const std::size_t total = t.rewards.size();
    const std::size_t tail = std::max<std::size_t>(1, total / 10);
    const std::string lr = "@lr=" + format_number(cell.lr);
    result.rows.push_back({Method::QCSM, reward.services, reward.n_sensors, "terminal_cumulative_reward" + lr,
                           t.cumulative.back(), "reward", cell.seed});
    result.rows.push_back({Method::QCSM, reward.services, reward.n_sensors, "exploration_mean_reward" + lr,
                           mean_reward(t, 0, t.exploration_episodes), "reward", cell.seed});
    result.rows.push_back({Method::QCSM, reward.services, reward.n_sensors, "final_mean_reward" + lr,
                           mean_reward(t, total - tail, total), "reward", cell.seed});
    for (std::size_t start = 0; start < total; start += window) {
      const std::size_t end = std::min(total, start + window);
      result.figure.rows.push_back({format_number(cell.lr), std::to_string(cell.seed), std::to_string(end),
                                    format_number(t.cumulative[end - 1]), format_number(mean_reward(t, start, end)),
                                    format_number(t.epsilons[end - 1])});
    }
    result.traces.push_back(cell.trace);
  }
  return result;
}

}  // namespace qcsm
