#include "qcsm/qlearning.hpp"

#include <algorithm>
#include <cmath>

namespace qcsm {

double QTable::max_value(std::size_t s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

std::size_t QTable::argmax(std::size_t s) const {
  const auto r = row(s);
  // max_element returns the first maximum
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

std::vector<std::size_t> QTable::greedy_policy() const {
  std::vector<std::size_t> out(states_);
  for (std::size_t s = 0; s < states_; ++s) out[s] = argmax(s);
  return out;
}

double bellman_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, double lr,
                      double gamma) {
  if (!(lr >= 0.0 && lr <= 1.0)) throw ContractViolation("bellman_update: lr must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractViolation("bellman_update: gamma must lie in [0, 1)");
  const std::size_t cell = q.at(s, a);
  const double target = r + gamma * q.max_value(s_next);
  q.values_[cell] += lr * (target - q.values_[cell]);
  ++q.visits_[cell];
  return q.values_[cell];
}

std::size_t select_action(const QTable& q, std::size_t s, double epsilon, RandomStream& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ContractViolation("select_action: epsilon outside [0,1]");
  if (rng.uniform() < epsilon) return static_cast<std::size_t>(rng.below(q.num_actions()));
  return q.argmax(s);
}

double epsilon_schedule(std::size_t episode, std::size_t total) {
  if (episode >= total) throw ContractViolation("epsilon_schedule: episode must be < total");
  constexpr double kFloor = 0.05;
  const std::size_t warmup = (total + 9) / 10;  // ceil(0.1 * total)
  if (episode < warmup) return 1.0;
  if (total - 1 <= warmup) return kFloor;
  const double progress = static_cast<double>(episode - warmup) / static_cast<double>(total - 1 - warmup);
  return 1.0 - (1.0 - kFloor) * progress;
}

}  // namespace qcsm
