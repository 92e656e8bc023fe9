#pragma once

// Tabular Q-learning: Bellman update, epsilon-greedy policy with a
// pure-exploration warm-up, and the training loop over any tabular environment.

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcsm/datastores.hpp"
#include "qcsm/errors.hpp"
#include "qcsm/rng.hpp"

namespace qcsm {

class QTable {
 public:
  QTable(std::size_t num_states, std::size_t num_actions)
      : states_(num_states), actions_(num_actions), values_(num_states * num_actions, 0.0),
        visits_(num_states * num_actions, 0) {}

  std::size_t num_states() const { return states_; }
  std::size_t num_actions() const { return actions_; }

  double value(std::size_t s, std::size_t a) const { return values_[at(s, a)]; }
  void set_value(std::size_t s, std::size_t a, double v) { values_[at(s, a)] = v; }
  std::uint64_t visits(std::size_t s, std::size_t a) const { return visits_[at(s, a)]; }
  std::span<const double> row(std::size_t s) const { return {values_.data() + at(s, 0), actions_}; }

  double max_value(std::size_t s) const;
  /// Lowest index among the maximal entries of row s.
  std::size_t argmax(std::size_t s) const;
  /// argmax of every row.
  std::vector<std::size_t> greedy_policy() const;

  bool operator==(const QTable&) const = default;

 private:
  friend double bellman_update(QTable&, std::size_t, std::size_t, double, std::size_t, double, double);
  std::size_t at(std::size_t s, std::size_t a) const {
    if (s >= states_ || a >= actions_) throw ContractViolation("QTable index out of range");
    return s * actions_ + a;
  }

  std::size_t states_;
  std::size_t actions_;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

/// Q(s,a) += lr * (r + gamma * max_a' Q(s',a') - Q(s,a)); returns the new value.
/// Requires lr in [0,1] and gamma in [0,1).
double bellman_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, double lr,
                      double gamma);

/// Uniform random action with probability epsilon, otherwise argmax.
std::size_t select_action(const QTable& q, std::size_t s, double epsilon, RandomStream& rng);

/// 1.0 during the first 10% of episodes, then linear down to 0.05 at the last episode.
double epsilon_schedule(std::size_t episode, std::size_t total);

struct StepOutcome {
  std::size_t next_state;
  double reward;
};

template <class E>
concept TabularEnvironment = requires(E env, std::size_t action) {
  { env.num_states() } -> std::convertible_to<std::size_t>;
  { env.num_actions() } -> std::convertible_to<std::size_t>;
  { env.reset() } -> std::convertible_to<std::size_t>;
  { env.step(action) } -> std::convertible_to<StepOutcome>;
};

struct TrainingOptions {
  std::size_t episodes = 10000;
  double lr = 0.07;
  double gamma = 0.99;
  std::uint64_t seed = 0;
  /// Overrides the schedule when set.
  std::optional<double> fixed_epsilon;
};

struct TrainingResult {
  QTable q;
  /// Running sum of rewards after each episode.
  std::vector<double> reward_trace;
  std::vector<double> rewards;
  std::vector<double> epsilons;
  CandidateDatastore candidate;
};

/// One environment step per episode: act, observe (R, S'), update Q, pick the
/// next action with the policy, advance. The greedy action set is published
/// to the candidate store at the end.
template <TabularEnvironment Env>
TrainingResult run_training(Env& env, const TrainingOptions& options) {
  if (options.episodes < 1) throw ContractViolation("run_training: episodes must be >= 1");
  if (!(options.lr >= 0.0 && options.lr <= 1.0)) throw ContractViolation("run_training: lr outside [0,1]");
  if (!(options.gamma >= 0.0 && options.gamma < 1.0))
    throw ContractViolation("run_training: gamma outside [0,1)");

  TrainingResult out{QTable(env.num_states(), env.num_actions()), {}, {}, {}, {}};
  out.reward_trace.reserve(options.episodes);
  out.rewards.reserve(options.episodes);
  out.epsilons.reserve(options.episodes);
  RandomStream rng = derive_stream(options.seed, "policy");
  auto epsilon_at = [&](std::size_t e) {
    return options.fixed_epsilon ? *options.fixed_epsilon : epsilon_schedule(e, options.episodes);
  };

  std::size_t state = env.reset();
  double eps = epsilon_at(0);
  std::size_t action = select_action(out.q, state, eps, rng);
  double cumulative = 0.0;
  for (std::size_t e = 0; e < options.episodes; ++e) {
    const StepOutcome step = env.step(action);
    bellman_update(out.q, state, action, step.reward, step.next_state, options.lr, options.gamma);
    cumulative += step.reward;
    out.rewards.push_back(step.reward);
    out.reward_trace.push_back(cumulative);
    out.epsilons.push_back(eps);
    if (e + 1 < options.episodes) {
      eps = epsilon_at(e + 1);
      action = select_action(out.q, step.next_state, eps, rng);
    }
    state = step.next_state;
  }
  out.candidate.publish(options.episodes, out.q.greedy_policy());
  return out;
}

}  // namespace qcsm
