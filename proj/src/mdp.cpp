#include "qcsm/mdp.hpp"

#include "qcsm/errors.hpp"

namespace qcsm {

std::size_t NetworkState::index() const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < assignment.size(); ++j)
    if (assignment[j] == QosClassId::DelayTolerant) idx |= std::size_t{1} << j;
  return idx;
}

NetworkState NetworkState::from_index(std::size_t index, std::size_t num_services) {
  if (index >= (std::size_t{1} << num_services)) throw ContractViolation("state index out of range");
  NetworkState s;
  for (std::size_t j = 0; j < num_services; ++j)
    s.assignment.push_back((index >> j) & 1 ? QosClassId::DelayTolerant : QosClassId::DelaySensitive);
  return s;
}

ActionSpace::ActionSpace(std::span<const ServiceSpec> services) {
  for (const auto& s : services) services_.push_back(s.id);
}

std::size_t ActionSpace::position(ServiceId s) const {
  for (std::size_t j = 0; j < services_.size(); ++j)
    if (services_[j] == s) return j;
  throw ContractViolation("action names a service outside the scenario");
}

std::size_t ActionSpace::index(const Action& a) const {
  if (a.kind == Action::Kind::NoOp) return 0;
  return 1 + 2 * position(a.service) + static_cast<std::size_t>(a.cls);
}

Action ActionSpace::at(std::size_t index) const {
  if (index >= size()) throw ContractViolation("action index out of range");
  if (index == 0) return Action::noop();
  const std::size_t j = (index - 1) / 2;
  return Action::assign(services_[j], static_cast<QosClassId>((index - 1) % 2));
}

NetworkState ActionSpace::apply(const NetworkState& s, const Action& a) const {
  NetworkState next = s;
  if (a.kind == Action::Kind::Assign) next.assignment.at(position(a.service)) = a.cls;
  return next;
}

std::size_t ActionSpace::next_state(std::size_t state, std::size_t action) const {
  return apply(NetworkState::from_index(state, services_.size()), at(action)).index();
}

std::string ActionSpace::label(const Action& a) const {
  if (a.kind == Action::Kind::NoOp) return "NoOp";
  return "Assign(" + std::string(to_string(a.service)) + "," + std::string(to_string(a.cls)) + ")";
}

std::string ActionSpace::state_label(std::size_t state) const {
  const auto s = NetworkState::from_index(state, services_.size());
  std::string out;
  for (std::size_t j = 0; j < services_.size(); ++j) {
    if (j) out += ",";
    out += std::string(to_string(services_[j])) + "=" +
           (s.assignment[j] == QosClassId::DelaySensitive ? "DS" : "DT");
  }
  return out;
}

double reward(const Observation& next, const RewardWeights& weights) {
  double satisfaction = 0.0;
  for (const auto& s : next.services) satisfaction += s.satisfied() ? 1.0 : -1.0;
  return weights.kpi * satisfaction - weights.energy * next.drain_norm;
}

double reward(const Observation&, const Action&, const Observation& next, const RewardWeights& weights) {
  return reward(next, weights);
}

}  // namespace qcsm
