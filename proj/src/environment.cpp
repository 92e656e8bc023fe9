#include "qcsm/environment.hpp"

#include <algorithm>

namespace qcsm {

NetworkSimulation::NetworkSimulation(const ScenarioConfig& config, std::uint64_t seed, bool materialize)
    : config_(config),
      fleet_(spawn_fleet(config)),
      churn_rng_(derive_stream(seed, "churn")),
      materialize_(materialize) {
  // per-node streams: a node's readings do not depend on other nodes' reporting
  traffic_rngs_.reserve(fleet_.nodes().size());
  for (const auto& n : fleet_.nodes())
    traffic_rngs_.push_back(derive_stream(splitmix64(seed) + n.id, "traffic"));
}

CycleLoad NetworkSimulation::advance(const Sink& sink) {
  CycleLoad load;
  fleet_.churn(churn_rng_, config_.churn_probability);
  if (materialize_) {
    for (const auto& envelope : generate_traffic(fleet_, cycle_, std::span<RandomStream>(traffic_rngs_))) {
      fleet_.apply_drain(envelope.source_id, static_cast<std::int64_t>(envelope.payload.size()));
      fleet_.enqueue(envelope.source_id);
      ++load.reports;
      if (sink) sink(envelope, cycle_);
    }
  } else {
    for (const auto& n : fleet_.nodes()) {
      if (!fleet_.is_due(n, cycle_)) continue;
      fleet_.enqueue(n.id);
      ++load.reports;
    }
  }
  for (QosClassId c : kQosClasses) {
    load.waiting[static_cast<std::size_t>(c)] = fleet_.queued_count(c);
    fleet_.serve(c, config_.qos(c).service_capacity_per_cycle);
  }
  ++cycle_;
  return load;
}

Observation NetworkSimulation::measure(std::span<const CycleLoad> window) const {
  Observation obs;
  for (const auto& spec : config_.services) {
    const QosClassId c = fleet_.class_of(spec.id);
    const auto ci = static_cast<std::size_t>(c);
    const double capacity = config_.qos(c).service_capacity_per_cycle;
    std::uint32_t worst = 0;
    for (const auto& l : window) worst = std::max(worst, l.waiting[ci]);
    const double slot_wait = config_.cycle_ms * (fleet_.interval_cycles(c) - 1) / 2.0;
    const double queueing = config_.cycle_ms * worst / capacity;
    const double loss = std::min(1.0, 0.01 * std::max(0.0, worst - capacity));
    obs.services.push_back({spec, slot_wait + queueing, loss});
  }
  obs.drain_norm = drain_norm();
  return obs;
}

double NetworkSimulation::drain_norm() const {
  double actual = 0.0;
  double all_sensitive = 0.0;
  for (const auto& n : fleet_.nodes()) {
    if (!n.active) continue;
    const double weight = n.device_class.max_payload_bytes;
    all_sensitive += weight / fleet_.interval_cycles(QosClassId::DelaySensitive);
    actual += weight / fleet_.interval_cycles(fleet_.class_of_node(n));
  }
  return all_sensitive > 0.0 ? actual / all_sensitive : 1.0;
}

void NetworkSimulation::apply(const NetworkState& state) {
  for (std::size_t j = 0; j < config_.services.size(); ++j)
    fleet_.assign(config_.services[j].id, state.assignment.at(j));
}

NetworkState NetworkSimulation::state() const {
  NetworkState s;
  for (const auto& spec : config_.services) s.assignment.push_back(fleet_.class_of(spec.id));
  return s;
}

AssignmentEnvironment::AssignmentEnvironment(const ScenarioConfig& config, std::uint64_t seed)
    : config_(config),
      seed_(seed),
      actions_(config.services),
      sim_(config, seed, false),
      running_(config.datastore_window_x) {}

std::size_t AssignmentEnvironment::reset() {
  sim_ = NetworkSimulation(config_, seed_, false);
  running_ = RunningDatastore(config_.datastore_window_x);
  state_ = 0;
  return state_;
}

void AssignmentEnvironment::set_state(std::size_t state) {
  sim_.apply(NetworkState::from_index(state, config_.services.size()));
  state_ = state;
}

StepOutcome AssignmentEnvironment::step(std::size_t action) {
  const std::size_t next = actions_.next_state(state_, action);
  set_state(next);
  window_.clear();
  for (std::uint32_t k = 0; k < config_.decision_cycles; ++k) window_.push_back(sim_.advance());
  last_ = sim_.measure(window_);
  const double r = reward(last_, config_.reward);

  json record = {{"cycle", sim_.cycle()}, {"state", next}, {"reward", r}, {"drain_norm", last_.drain_norm}};
  for (const auto& s : last_.services)
    record[std::string(to_string(s.spec.id))] = {{"delay_ms", s.delay_ms}, {"loss_rate", s.loss_rate}};
  running_.push(static_cast<double>(sim_.cycle()) * config_.cycle_ms / 1000.0, std::move(record));
  return {next, r};
}

}  // namespace qcsm
