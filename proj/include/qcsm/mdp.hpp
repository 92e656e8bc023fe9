#pragma once

// State, action and reward of the QoS assignment problem. A state assigns a
// QoS class to every service; an action reassigns one service or does nothing.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qcsm/model.hpp"

namespace qcsm {

struct NetworkState {
  /// Class of each service, in scenario service order.
  std::vector<QosClassId> assignment;

  /// sum_j bit_j * 2^j with bit_j = 1 for DelayTolerant.
  std::size_t index() const;
  static NetworkState from_index(std::size_t index, std::size_t num_services);
  bool operator==(const NetworkState&) const = default;
};

struct Action {
  enum class Kind : std::uint8_t { NoOp, Assign };
  Kind kind = Kind::NoOp;
  ServiceId service = ServiceId::WindTurbine;
  QosClassId cls = QosClassId::DelaySensitive;

  static Action noop() { return {}; }
  static Action assign(ServiceId s, QosClassId c) { return {Kind::Assign, s, c}; }
  bool operator==(const Action&) const = default;
};

/// Indexes actions as 0 = NoOp, 1 + 2j + c = Assign(service j, class c).
class ActionSpace {
 public:
  explicit ActionSpace(std::vector<ServiceId> services) : services_(std::move(services)) {}
  explicit ActionSpace(std::span<const ServiceSpec> services);

  std::size_t size() const { return 2 * services_.size() + 1; }
  std::size_t num_states() const { return std::size_t{1} << services_.size(); }
  std::size_t index(const Action& a) const;
  Action at(std::size_t index) const;
  NetworkState apply(const NetworkState& s, const Action& a) const;
  std::size_t next_state(std::size_t state, std::size_t action) const;

  std::string label(const Action& a) const;
  std::string state_label(std::size_t state) const;
  std::span<const ServiceId> services() const { return services_; }

 private:
  std::size_t position(ServiceId s) const;
  std::vector<ServiceId> services_;
};

struct ServiceObservation {
  ServiceSpec spec;
  double delay_ms = 0.0;
  double loss_rate = 0.0;

  bool satisfied() const { return delay_ms <= spec.max_delay_ms && loss_rate <= spec.max_loss_rate; }
};

/// Measured KPIs of every service plus the fleet drain rate relative to an
/// all-DelaySensitive fleet, in (0, 1].
struct Observation {
  std::vector<ServiceObservation> services;
  double drain_norm = 1.0;
};

/// R = w_kpi * sum_j sat_j - w_energy * drain_norm, sat_j = +1 if service j
/// meets its delay and loss KPIs, else -1. Only the post-transition
/// observation matters.
double reward(const Observation& next, const RewardWeights& weights);
double reward(const Observation& prev, const Action& action, const Observation& next,
              const RewardWeights& weights);

}  // namespace qcsm
