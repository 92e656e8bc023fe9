#include "qcsm/density.hpp"

#include "qcsm/errors.hpp"

namespace qcsm {

QosClassId class_from_index(int class_index) {
  if (class_index == 1) return QosClassId::DelaySensitive;
  if (class_index == 2) return QosClassId::DelayTolerant;
  throw ContractViolation("class index must be 1 or 2");
}

QosDensity compute_density(const Fleet& fleet, int class_index) {
  const QosClassId cls = class_from_index(class_index);
  const auto waiting = fleet.queued_count(cls);
  if (waiting == 0) throw DensityUndefined("no device waiting in class " + std::to_string(class_index));
  return {class_index, static_cast<double>(fleet.active_count(cls)) / waiting, false};
}

QosDensity density_or_fallback(const Fleet& fleet, int class_index) {
  try {
    return compute_density(fleet, class_index);
  } catch (const DensityUndefined&) {
    return {class_index, static_cast<double>(fleet.active_count(class_from_index(class_index))), true};
  }
}

const std::array<QosDensity, 2>& DensityTracker::update(const Fleet& fleet) {
  const auto m = fleet.active_total();
  if (last_m_ && *last_m_ == m) return cached_;
  cached_ = {density_or_fallback(fleet, 1), density_or_fallback(fleet, 2)};
  last_m_ = m;
  ++recomputations_;
  return cached_;
}

std::optional<std::array<QosDensity, 2>> recompute_on_change(const Fleet& fleet,
                                                             std::uint32_t previous_m) {
  if (fleet.active_total() == previous_m) return std::nullopt;
  return std::array<QosDensity, 2>{density_or_fallback(fleet, 1), density_or_fallback(fleet, 2)};
}

}  // namespace qcsm
