#pragma once

// Sensor layer: battery-powered constrained devices that report periodically
// according to the QoS class of their service and wait in the class queue
// until the agent manager serves them.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "qcsm/envelope.hpp"
#include "qcsm/model.hpp"
#include "qcsm/rng.hpp"

namespace qcsm {

inline constexpr double kMaxLifetimeYears = 10.0;

struct SensorNode {
  std::uint32_t id = 0;
  DeviceClass device_class{};
  ServiceId service = ServiceId::WindTurbine;
  bool is_master = false;
  double lifetime_fraction = 1.0;  // 1.0 == kMaxLifetimeYears
  bool active = true;
  std::optional<QosClassId> queued_for;

  bool operator==(const SensorNode&) const = default;
};

/// Linear battery model: each requested byte costs `drain_per_byte` of the
/// lifetime. Throws ContractViolation for negative byte counts.
SensorNode drain(SensorNode node, std::int64_t bytes_requested, double drain_per_byte = 1e-7);
double remaining_lifetime_years(const SensorNode& node);

/// Readings carried per report so that the JSON form stays within `cap` bytes.
std::uint32_t samples_per_report(std::uint32_t cap);

/// Synthetic reading record {"cycle", "id", "value": [samples]} sized by
/// device class. Samples have quarter-unit resolution over [-20, 60).
struct ReadingRecord {
  std::uint32_t id = 0;
  std::uint64_t cycle = 0;
  std::vector<double> samples;

  json to_json() const;
};

ReadingRecord reading_record(const SensorNode& node, std::uint64_t cycle, RandomStream& rng);

/// Direct serializers, byte-identical to to_json().dump() and
/// encode_cbor(to_json()) respectively.
Bytes serialize_json(const ReadingRecord& record);
Bytes serialize_cbor(const ReadingRecord& record);
Envelope make_envelope(std::uint32_t source_id, Protocol protocol, const ReadingRecord& record);

class Fleet {
 public:
  Fleet(std::vector<SensorNode> nodes, const ScenarioConfig& config);

  std::span<const SensorNode> nodes() const { return nodes_; }
  const SensorNode& node(std::uint32_t id) const { return nodes_.at(id); }
  std::span<const ServiceSpec> services() const { return services_; }
  Protocol protocol_of(ServiceId service) const;

  QosClassId class_of(ServiceId service) const { return assignment_[index(service)]; }
  QosClassId class_of_node(const SensorNode& n) const { return class_of(n.service); }
  /// Reassigns a service. Nodes already waiting move to the new class queue.
  void assign(ServiceId service, QosClassId cls);
  std::uint32_t interval_cycles(QosClassId cls) const { return interval_[idx(cls)]; }

  /// O_i: active nodes whose service is assigned to `cls`.
  std::uint32_t active_count(QosClassId cls) const { return active_[idx(cls)]; }
  /// V_i: active nodes waiting in the `cls` queue.
  std::uint32_t queued_count(QosClassId cls) const {
    return static_cast<std::uint32_t>(queue_[idx(cls)].size());
  }
  std::uint32_t active_total() const { return active_[0] + active_[1]; }

  /// Depleted nodes cannot be reactivated; deactivated nodes leave their queue.
  void set_active(std::uint32_t id, bool active);
  /// Active node whose reporting slot falls on `cycle`. Slots are staggered by id.
  bool is_due(const SensorNode& n, std::uint64_t cycle) const;
  /// Joins the class queue unless already waiting. Returns true if it joined.
  bool enqueue(std::uint32_t id);
  /// Serves up to `capacity` waiting nodes of `cls` in FIFO order.
  std::uint32_t serve(QosClassId cls, std::uint32_t capacity);
  void apply_drain(std::uint32_t id, std::int64_t bytes);
  /// Each non-master node toggles its active flag with `probability`.
  std::uint32_t churn(RandomStream& rng, double probability);

  double drain_per_byte() const { return drain_per_byte_; }
  json snapshot(std::uint64_t cycle) const;

 private:
  static std::size_t idx(QosClassId c) { return static_cast<std::size_t>(c); }
  std::size_t index(ServiceId s) const;
  void remove_from_queue(SensorNode& n);

  std::vector<SensorNode> nodes_;
  std::vector<ServiceSpec> services_;
  std::vector<QosClassId> assignment_;
  std::array<std::uint32_t, 2> interval_{1, 1};
  std::array<std::uint32_t, 2> active_{0, 0};
  std::array<std::deque<std::uint32_t>, 2> queue_;
  double drain_per_byte_ = 1e-7;
};

/// n nodes, tiers round-robin by id, services in blocks of three ids so every
/// service gets every tier; the lowest id of each service is its master.
/// All services start DelaySensitive.
Fleet spawn_fleet(const ScenarioConfig& config);

/// One envelope per active node due this cycle, in the node's protocol and encoding.
std::vector<Envelope> generate_traffic(const Fleet& fleet, std::uint64_t cycle, RandomStream& rng);
/// Same, drawing each node's readings from its own stream (indexed by node id).
std::vector<Envelope> generate_traffic(const Fleet& fleet, std::uint64_t cycle,
                                       std::span<RandomStream> node_streams);

}  // namespace qcsm
