#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They deliberately avoid the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcsm/environment.hpp"
#include "qcsm/fleet.hpp"
#include "qcsm/harness.hpp"
#include "qcsm/qlearning.hpp"

namespace oracle {

using json = nlohmann::json;

// ---- random JSON documents ---------------------------------------------------

class DocumentGenerator {
 public:
  explicit DocumentGenerator(std::uint64_t seed) : rng_(seed) {}

  json document() { return value(0, /*force_container=*/true); }

 private:
  std::uint64_t pick(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }

  std::string text() {
    static const std::vector<std::string> pieces{"a", "b", "z", "0", " ", "\"", "\\", "\n", "é", "ß", "€", "😀", "\x7f"};
    std::string s;
    for (auto k = pick(12); k > 0; --k) s += pieces[pick(pieces.size())];
    return s;
  }

  double real() {
    switch (pick(5)) {
      case 0: return static_cast<double>(static_cast<std::int64_t>(pick(2000)) - 1000) / 4.0;  // half-exact
      case 1: return std::ldexp(static_cast<double>(pick(1 << 20)), -static_cast<int>(pick(30)));
      case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
      case 3: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng_), static_cast<int>(pick(600)) - 300);
      default: return pick(2) ? 0.0 : -0.0;
    }
  }

  json integer() {
    switch (pick(4)) {
      case 0: return static_cast<std::int64_t>(pick(48)) - 24;
      case 1: return static_cast<std::int64_t>(pick(1ULL << 40)) - (1LL << 39);
      case 2: return static_cast<std::uint64_t>(rng_());
      default: return std::numeric_limits<std::int64_t>::min() + static_cast<std::int64_t>(pick(1000));
    }
  }

  json value(int depth, bool force_container = false) {
    const std::uint64_t kind = force_container ? 6 + pick(2) : pick(depth >= 4 ? 6 : 8);
    switch (kind) {
      case 0: return nullptr;
      case 1: return pick(2) == 1;
      case 2: return integer();
      case 3: return real();
      case 4: return text();
      case 5: return integer();
      case 6: {
        json arr = json::array();
        for (auto k = pick(6); k > 0; --k) arr.push_back(value(depth + 1));
        return arr;
      }
      default: {
        json obj = json::object();
        for (auto k = pick(6); k > 0; --k) obj[text()] = value(depth + 1);
        return obj;
      }
    }
  }

  std::mt19937_64 rng_;
};

// ---- density -----------------------------------------------------------------

struct Counts {
  std::uint32_t active = 0;
  std::uint32_t waiting = 0;
};

/// O_i and V_i by a plain scan of the node list.
inline Counts brute_force_counts(const qcsm::Fleet& fleet, qcsm::QosClassId cls) {
  Counts c;
  for (const auto& n : fleet.nodes()) {
    if (!n.active) continue;
    if (fleet.class_of(n.service) == cls) ++c.active;
    if (n.queued_for && *n.queued_for == cls) ++c.waiting;
  }
  return c;
}

// ---- value iteration -----------------------------------------------------------

/// Deterministic tabular MDP: next[s][a] and reward r[s][a].
struct TabularMdp {
  std::vector<std::vector<std::size_t>> next;
  std::vector<std::vector<double>> reward;
};

/// Q* by synchronous value iteration until the update is below `tol`.
inline std::vector<std::vector<double>> value_iteration(const TabularMdp& mdp, double gamma, double tol = 1e-13) {
  const std::size_t S = mdp.next.size();
  const std::size_t A = mdp.next.front().size();
  std::vector<std::vector<double>> q(S, std::vector<double>(A, 0.0));
  for (int iter = 0; iter < 1000000; ++iter) {
    std::vector<double> v(S);
    for (std::size_t s = 0; s < S; ++s) v[s] = *std::max_element(q[s].begin(), q[s].end());
    double delta = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        const double updated = mdp.reward[s][a] + gamma * v[mdp.next[s][a]];
        delta = std::max(delta, std::abs(updated - q[s][a]));
        q[s][a] = updated;
      }
    }
    if (delta < tol) break;
  }
  return q;
}

/// Actions within `tol` of the row maximum.
inline std::vector<std::size_t> optimal_actions(const std::vector<double>& row, double tol) {
  const double best = *std::max_element(row.begin(), row.end());
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < row.size(); ++a)
    if (row[a] >= best - tol) out.push_back(a);
  return out;
}

/// Table-driven environment over a TabularMdp; episodes start in state 0.
class TableEnvironment {
 public:
  explicit TableEnvironment(TabularMdp mdp) : mdp_(std::move(mdp)) {}
  std::size_t num_states() const { return mdp_.next.size(); }
  std::size_t num_actions() const { return mdp_.next.front().size(); }
  std::size_t reset() { return state_ = 0; }
  qcsm::StepOutcome step(std::size_t action) {
    const std::size_t s = mdp_.next[state_][action];
    const double r = mdp_.reward[state_][action];
    state_ = s;
    return {s, r};
  }
  const TabularMdp& mdp() const { return mdp_; }

 private:
  TabularMdp mdp_;
  std::size_t state_ = 0;
};

/// Two states; arriving in state 1 pays 1. Action 0 stays, action 1 switches.
inline TabularMdp two_state_toy() {
  TabularMdp m;
  m.next = {{0, 1}, {1, 0}};
  m.reward = {{0.0, 1.0}, {1.0, 0.0}};
  return m;
}

/// Assignment MDP over a frozen fleet (no churn): the reward of arriving in
/// s' is measured once per state from a fresh simulation, so the MDP is
/// deterministic. Transitions follow the action encoding 0 = NoOp,
/// 1 + 2j + c = put service j into class c, written out here from bits.
inline TabularMdp frozen_assignment_mdp(qcsm::ScenarioConfig config, std::uint64_t seed) {
  config.churn_probability = 0.0;
  const std::size_t J = config.services.size();
  const std::size_t S = std::size_t{1} << J;
  const std::size_t A = 2 * J + 1;

  std::vector<double> arrive(S);
  for (std::size_t s = 0; s < S; ++s) {
    qcsm::AssignmentEnvironment env(config, seed);
    env.reset();
    env.set_state(s);
    arrive[s] = env.step(0).reward;
  }

  TabularMdp m;
  m.next.assign(S, std::vector<std::size_t>(A));
  m.reward.assign(S, std::vector<double>(A));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      std::size_t n = s;
      if (a > 0) {
        const std::size_t j = (a - 1) / 2;
        const std::size_t c = (a - 1) % 2;
        n = c ? (s | (std::size_t{1} << j)) : (s & ~(std::size_t{1} << j));
      }
      m.next[s][a] = n;
      m.reward[s][a] = arrive[n];
    }
  }
  return m;
}

inline double sup_norm_error(const qcsm::QTable& q, const std::vector<std::vector<double>>& reference) {
  double err = 0.0;
  for (std::size_t s = 0; s < q.num_states(); ++s)
    for (std::size_t a = 0; a < q.num_actions(); ++a) err = std::max(err, std::abs(q.value(s, a) - reference[s][a]));
  return err;
}

// ---- statistics --------------------------------------------------------------

/// 97.5% Student-t quantiles for df = 1..10 from printed tables.
inline double t975_table(std::size_t df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
  return table[df - 1];
}

}  // namespace oracle
