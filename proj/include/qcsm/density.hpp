#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "qcsm/fleet.hpp"

namespace qcsm {

/// Congestion indicator of one QoS class: active devices over waiting devices.
struct QosDensity {
  int class_index = 1;  // 1 = DelaySensitive, 2 = DelayTolerant
  double alpha = 0.0;
  /// Set when the queue was empty and alpha fell back to O_i.
  bool fallback = false;

  bool operator==(const QosDensity&) const = default;
};

QosClassId class_from_index(int class_index);

/// alpha = O_i / V_i. Throws DensityUndefined when V_i == 0 and
/// ContractViolation for an index outside {1, 2}.
QosDensity compute_density(const Fleet& fleet, int class_index);

/// Like compute_density, but substitutes alpha = O_i (flagged) for an empty queue.
QosDensity density_or_fallback(const Fleet& fleet, int class_index);

/// Recomputes both class densities only when the active-device count m
/// changed since the last call. One call per cycle batches all churn events
/// of that cycle into at most one recomputation.
class DensityTracker {
 public:
  const std::array<QosDensity, 2>& update(const Fleet& fleet);
  std::optional<std::uint32_t> last_m() const { return last_m_; }
  std::uint64_t recomputations() const { return recomputations_; }

 private:
  std::optional<std::uint32_t> last_m_;
  std::array<QosDensity, 2> cached_{};
  std::uint64_t recomputations_ = 0;
};

/// Free form of the tracker step: densities if m != previous_m, else nullopt.
std::optional<std::array<QosDensity, 2>> recompute_on_change(const Fleet& fleet,
                                                             std::uint32_t previous_m);

}  // namespace qcsm
