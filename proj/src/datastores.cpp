#include "qcsm/datastores.hpp"

#include "qcsm/errors.hpp"

namespace qcsm {

void RunningDatastore::push(double time_s, json record) {
  entries_.push_back({time_s, std::move(record)});
  evict(time_s);
}

void RunningDatastore::evict(double now_s) {
  while (!entries_.empty() && entries_.front().time_s < now_s - window_s_) entries_.pop_front();
}

void CandidateDatastore::publish(std::uint64_t timestamp, std::vector<std::size_t> greedy_actions) {
  entries_.push_back({timestamp, std::move(greedy_actions)});
}

const CandidateDatastore::Entry& CandidateDatastore::latest() const {
  if (entries_.empty()) throw NotTrained("candidate datastore is empty");
  return entries_.back();
}

Action recommend(const CandidateDatastore& candidate, const ActionSpace& actions, std::size_t state) {
  const auto& greedy = candidate.latest().greedy_actions;
  if (state >= greedy.size()) throw ContractViolation("recommend: state index out of range");
  return actions.at(greedy[state]);
}

}  // namespace qcsm
