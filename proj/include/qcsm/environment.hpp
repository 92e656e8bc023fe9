#pragma once

// Discrete-time network model shared by training and the experiments, and
// the tabular environment the Q-learner interacts with.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "qcsm/datastores.hpp"
#include "qcsm/fleet.hpp"
#include "qcsm/mdp.hpp"
#include "qcsm/qlearning.hpp"

namespace qcsm {

/// Queue occupancy of one cycle, measured after reports arrive and before service.
struct CycleLoad {
  std::array<std::uint32_t, 2> waiting{0, 0};
  std::uint32_t reports = 0;
};

/// Per-cycle mechanics: churn, due reports join their class queue, the agent
/// manager serves each queue up to its capacity. With `materialize` set every
/// report is a real envelope whose payload size drains the sender's battery.
class NetworkSimulation {
 public:
  using Sink = std::function<void(const Envelope&, std::uint64_t cycle)>;

  NetworkSimulation(const ScenarioConfig& config, std::uint64_t seed, bool materialize);

  CycleLoad advance(const Sink& sink = {});

  /// Worst-case delay and loss per service over a window of cycles. Delay is
  /// the mean wait for the next reporting slot plus queueing delay.
  Observation measure(std::span<const CycleLoad> window) const;
  /// Reporting byte rate of active nodes relative to all-DelaySensitive.
  double drain_norm() const;

  void apply(const NetworkState& state);
  NetworkState state() const;

  Fleet& fleet() { return fleet_; }
  const Fleet& fleet() const { return fleet_; }
  const ScenarioConfig& config() const { return config_; }
  std::uint64_t cycle() const { return cycle_; }

 private:
  ScenarioConfig config_;
  Fleet fleet_;
  RandomStream churn_rng_;
  std::vector<RandomStream> traffic_rngs_;
  bool materialize_;
  std::uint64_t cycle_ = 0;
};

/// QoS assignment MDP over a live fleet. One step applies an action and runs
/// `decision_cycles` simulation cycles; the reward scores the measured KPIs.
/// Batteries are not drained during training.
class AssignmentEnvironment {
 public:
  AssignmentEnvironment(const ScenarioConfig& config, std::uint64_t seed);

  std::size_t num_states() const { return actions_.num_states(); }
  std::size_t num_actions() const { return actions_.size(); }
  /// Fresh fleet, all services DelaySensitive (state 0).
  std::size_t reset();
  StepOutcome step(std::size_t action);
  /// Forces the current assignment without advancing time.
  void set_state(std::size_t state);

  std::size_t state() const { return state_; }
  const ActionSpace& actions() const { return actions_; }
  const Observation& last_observation() const { return last_; }
  const RunningDatastore& running() const { return running_; }
  const NetworkSimulation& simulation() const { return sim_; }

 private:
  ScenarioConfig config_;
  std::uint64_t seed_;
  ActionSpace actions_;
  NetworkSimulation sim_;
  RunningDatastore running_;
  std::size_t state_ = 0;
  Observation last_;
  std::vector<CycleLoad> window_;
};

}  // namespace qcsm
