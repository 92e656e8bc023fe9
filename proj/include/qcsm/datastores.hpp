#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "qcsm/mdp.hpp"

namespace qcsm {

/// Sliding-window log of observations covering [t - x, t] seconds.
class RunningDatastore {
 public:
  struct Entry {
    double time_s;
    json record;
  };

  explicit RunningDatastore(double window_s) : window_s_(window_s) {}

  /// Appends and evicts everything older than time_s - window.
  void push(double time_s, json record);
  void evict(double now_s);

  const std::deque<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double window_s() const { return window_s_; }

 private:
  double window_s_;
  std::deque<Entry> entries_;
};

/// Recommended action sets published by training: one greedy action per state.
class CandidateDatastore {
 public:
  struct Entry {
    std::uint64_t timestamp;
    std::vector<std::size_t> greedy_actions;
  };

  void publish(std::uint64_t timestamp, std::vector<std::size_t> greedy_actions);
  bool empty() const { return entries_.empty(); }
  const Entry& latest() const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Stored greedy action for `state`. Throws NotTrained on an empty store.
Action recommend(const CandidateDatastore& candidate, const ActionSpace& actions, std::size_t state);

}  // namespace qcsm
