#include "qcsm/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "qcsm/environment.hpp"
#include "qcsm/harness.hpp"
#include "qcsm/pool_server.hpp"
#include "qcsm/report.hpp"

namespace qcsm {

namespace fs = std::filesystem;

namespace {

struct LoadedConfig {
  ScenarioConfig config;
  std::string path;
  std::uint64_t file_hash = 0;
};

LoadedConfig read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  const std::string text = bytes.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return {config_from_json(doc), path, fnv1a64(text)};
}

/// Collects the artifacts of one invocation and writes the manifest once.
class Run {
 public:
  Run(std::vector<std::string> command_line, fs::path out)
      : command_line_(std::move(command_line)), out_(std::move(out)), start_(std::chrono::steady_clock::now()) {}

  const fs::path& out() const { return out_; }

  /// Creates the output directory and checks it accepts files.
  void prepare() {
    std::error_code ec;
    fs::create_directories(out_, ec);
    const fs::path probe = out_ / ".write_probe";
    std::ofstream test(probe, std::ios::binary);
    if (ec || !test) throw std::ios_base::failure("output directory not writable: " + out_.string());
    test.close();
    fs::remove(probe, ec);
  }

  void write(const std::string& name, const std::string& content) {
    write_file(out_ / name, content);
    artifacts_.push_back(name);
  }
  void record(const std::string& name) { artifacts_.push_back(name); }

  void set_config(const LoadedConfig& loaded) {
    config_hash_ = hex64(config_hash(loaded.config));
    config_file_hash_ = hex64(loaded.file_hash);
    config_path_ = loaded.path;
  }
  void set_seeds(std::vector<std::uint64_t> seeds) { seeds_ = std::move(seeds); }

  void finish(bool complete) {
    if (finished_) return;
    finished_ = true;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest = {{"command_line", command_line_},
                     {"config_path", config_path_},
                     {"config_hash", config_hash_},
                     {"config_file_hash", config_file_hash_},
                     {"seeds", seeds_},
                     {"artifacts", artifacts_},
                     {"tool_version", kToolVersion},
                     {"duration_s", seconds},
                     {"complete", complete}};
    write_file(out_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::vector<std::string> command_line_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> artifacts_;
  std::vector<std::uint64_t> seeds_;
  std::string config_hash_;
  std::string config_file_hash_;
  std::string config_path_;
  bool finished_ = false;
};

fs::path output_dir(const std::string& flag) {
  if (const char* env = std::getenv("QCSM_OUT"); env && *env) return env;
  return flag;
}

bool cancelled(const std::atomic<bool>* cancel) { return cancel && cancel->load(); }

struct TrainArgs {
  std::string config;
  double lr = 0.07;
  double gamma = 0.99;
  long long episodes = 10000;
  std::uint64_t seed = 0;
  std::string out = "out";
};

struct ExperimentArgs {
  std::string figure;
  std::string config;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string out = "out";
  unsigned threads = 0;
  std::optional<long long> episodes;
  std::optional<long long> cycles;
  bool dump_fleet = false;
  std::optional<int> serve_port;
};

int cmd_train(const TrainArgs& args, Run& run, const std::atomic<bool>* cancel) {
  if (args.episodes < 1) throw ConfigError("--episodes must be >= 1");
  if (!(args.lr >= 0.0 && args.lr <= 1.0)) throw ConfigError("--lr must be in [0, 1]");
  if (!(args.gamma >= 0.0 && args.gamma < 1.0)) throw ConfigError("--gamma must be in [0, 1)");
  const LoadedConfig loaded = read_config(args.config);
  require_valid(loaded.config);
  run.set_config(loaded);
  run.set_seeds({args.seed});
  run.prepare();

  std::cout << "training: " << args.episodes << " episodes, lr=" << format_number(args.lr)
            << ", seed=" << args.seed << std::endl;
  AssignmentEnvironment env(loaded.config, args.seed);
  TrainingOptions options;
  options.episodes = static_cast<std::size_t>(args.episodes);
  options.lr = args.lr;
  options.gamma = args.gamma;
  options.seed = args.seed;
  const TrainingResult result = run_training(env, options);
  if (cancelled(cancel)) throw Cancelled();

  run.write("qtable.json", qtable_to_json(result.q, env.actions(), loaded.config).dump(2) + "\n");
  run.write("reward_trace.csv", reward_trace_csv(result, args.lr, args.seed));
  std::cout << "final cumulative reward " << format_number(result.reward_trace.back()) << std::endl;
  run.finish(true);
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& args, Run& run, const std::atomic<bool>* cancel) {
  if (args.figure != "response" && args.figure != "lifetime" && args.figure != "reward")
    throw ConfigError("--figure must be one of response, lifetime, reward");
  if (args.seeds.empty()) throw ConfigError("--seeds must not be empty");
  if (args.episodes && *args.episodes < 1) throw ConfigError("--episodes must be >= 1");
  if (args.cycles && *args.cycles < 0) throw ConfigError("--cycles must be >= 0");
  if (args.serve_port && args.figure != "response") throw ConfigError("--serve applies to --figure response");
  const LoadedConfig loaded = read_config(args.config);
  require_valid(loaded.config, true);
  run.set_config(loaded);
  run.set_seeds(args.seeds);
  run.prepare();

  std::mutex print_mutex;
  HarnessOptions options;
  options.threads = args.threads;
  options.cancel = cancel;
  options.progress = [&](const std::string& line) {
    std::lock_guard lock(print_mutex);
    std::cout << line << std::endl;
  };
  if (args.dump_fleet) options.dump_fleet_dir = run.out() / "fleet";

  ExperimentResult result;
  std::shared_ptr<AgentManager> pool;
  if (args.figure == "response") {
    ResponseOptions response;
    response.cost = loaded.config.cost;
    response.keep_pool = args.serve_port.has_value();
    ResponseRun r = run_response_time_experiment(loaded.config, response, args.seeds, options);
    result = std::move(r.result);
    pool = std::move(r.kept_pool);
  } else if (args.figure == "lifetime") {
    LifetimeOptions lifetime;
    if (args.episodes) lifetime.episodes = static_cast<std::size_t>(*args.episodes);
    if (args.cycles) lifetime.cycles = static_cast<std::uint64_t>(*args.cycles);
    result = run_lifetime_experiment(loaded.config, lifetime, args.seeds, options);
    if (args.dump_fleet) run.record("fleet/");
  } else {
    RewardOptions reward;
    if (args.episodes) reward.episodes = static_cast<std::size_t>(*args.episodes);
    result = run_reward_experiment(loaded.config, reward, args.seeds, options);
  }

  run.write(figure_file(result.experiment), table_csv(result.figure));
  const SummaryReport summary = summarize({result});
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
  run.write("results.csv", results_csv(summary));
  run.write("summary.json", summary_json({result}, summary).dump(2) + "\n");
  for (const auto& row : summary.rows)
    if (row.metric.rfind("relative_gap_", 0) == 0 && (row.metric == "relative_gap_response_time" ||
                                                     row.metric == "relative_gap_normalized_lifetime_all"))
      std::cout << row.experiment << " services=" << row.services << " n=" << row.n_sensors << " "
                << row.metric << " = " << format_number(row.value) << "%\n";
  run.finish(true);

  if (args.serve_port && pool) {
    PoolServer server(*pool);
    const int port = server.start("127.0.0.1", *args.serve_port);
    if (port < 0) {
      std::cerr << "error: cannot bind 127.0.0.1:" << *args.serve_port << '\n';
      return kExitIo;
    }
    std::cout << "serving data pool on http://127.0.0.1:" << port << "/pool (Ctrl-C to stop)" << std::endl;
    while (!cancelled(cancel)) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  }
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  ScenarioConfig config;
  try {
    config = read_config(path).config;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  const auto problems = validate(config);
  for (const auto& p : problems) std::cerr << p << '\n';
  if (!problems.empty()) return kExitConfig;
  std::cout << path << ": ok (config hash " << hex64(config_hash(config)) << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, const std::atomic<bool>* cancel) {
  CLI::App app{"Cognitive QoS and data-format management for smart-city IoT: simulator and experiments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a Q-table on one scenario");
  train_cmd->add_option("--config", train.config, "Scenario config (JSON)")->required();
  train_cmd->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--gamma", train.gamma, "Discount factor")->capture_default_str();
  train_cmd->add_option("--episodes", train.episodes, "Training episodes")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Seed")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Output directory (QCSM_OUT overrides)")->capture_default_str();

  ExperimentArgs experiment;
  auto* exp_cmd = app.add_subcommand("experiment", "Run one experiment against the baseline");
  exp_cmd->add_option("--figure", experiment.figure, "response | lifetime | reward")->required();
  exp_cmd->add_option("--config", experiment.config, "Scenario config (JSON)")->required();
  exp_cmd->add_option("--seeds", experiment.seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
  exp_cmd->add_option("--out", experiment.out, "Output directory (QCSM_OUT overrides)")->capture_default_str();
  exp_cmd->add_option("--threads", experiment.threads, "Worker threads (0 = all cores)")->capture_default_str();
  exp_cmd->add_option("--episodes", experiment.episodes, "Training episodes (lifetime, reward)");
  exp_cmd->add_option("--cycles", experiment.cycles, "Simulated cycles (lifetime)");
  exp_cmd->add_flag("--dump-fleet", experiment.dump_fleet, "Write one fleet snapshot per cycle (lifetime)");
  exp_cmd->add_option("--serve", experiment.serve_port, "Serve the QCSM data pool read-only on this port (response)");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario config");
  validate_cmd->add_option("--config", validate_path, "Scenario config (JSON)")->required();

  std::vector<const char*> argv;
  argv.push_back("qcsm");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (validate_cmd->parsed()) return cmd_validate(validate_path);

  std::vector<std::string> command_line{"qcsm"};
  command_line.insert(command_line.end(), args.begin(), args.end());
  Run run(command_line, output_dir(train_cmd->parsed() ? train.out : experiment.out));
  try {
    if (train_cmd->parsed()) return cmd_train(train, run, cancel);
    return cmd_experiment(experiment, run, cancel);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Cancelled&) {
    std::cerr << "interrupted; manifest marked incomplete\n";
    try {
      run.finish(false);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
    }
    return kExitInterrupted;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    try {
      run.finish(false);
    } catch (const std::exception&) {
    }
    return kExitIo;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qcsm
