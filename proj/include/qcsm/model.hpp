#pragma once

// Shared domain vocabulary: device classes, smart-city services and their
// KPIs, QoS classes, and the scenario configuration every module consumes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qcsm {

using json = nlohmann::json;

enum class DeviceTier : std::uint8_t { Class0, Class1, Class2 };

struct DeviceClass {
  DeviceTier tier;
  std::uint32_t max_payload_bytes;
  bool supports_server_stack;

  bool operator==(const DeviceClass&) const = default;
};

/// Per-tier payload bounds. Class 0 is the tightest.
struct PayloadCaps {
  std::uint32_t class0 = 64;
  std::uint32_t class1 = 256;
  std::uint32_t class2 = 1024;

  std::uint32_t of(DeviceTier tier) const;
  bool operator==(const PayloadCaps&) const = default;
};

DeviceClass device_class(DeviceTier tier, const PayloadCaps& caps = {});

enum class ServiceId : std::uint8_t { WindTurbine, SolarPanel, Transportation };
enum class Protocol : std::uint8_t { CoAP, HTTP, MQTT };

struct ServiceSpec {
  ServiceId id;
  double max_delay_ms;
  double max_loss_rate;
  Protocol protocol;

  bool operator==(const ServiceSpec&) const = default;
};

/// KPI row of the smart-city scenario table for `id`.
ServiceSpec standard_service(ServiceId id);

enum class QosClassId : std::uint8_t { DelaySensitive, DelayTolerant };
inline constexpr std::array<QosClassId, 2> kQosClasses{QosClassId::DelaySensitive,
                                                       QosClassId::DelayTolerant};

struct QosClass {
  QosClassId id;
  double reporting_interval_ms;
  std::uint32_t service_capacity_per_cycle;

  /// 1-based class index i as used in the density formula.
  int index() const { return id == QosClassId::DelaySensitive ? 1 : 2; }
  bool operator==(const QosClass&) const = default;
};

/// Per-record and per-query processing costs of the agent manager, in ms.
struct CostModel {
  double c_parse_json = 0.010;
  double c_parse_cbor = 0.008;
  double c_convert = 0.015;
  double c_query_base = 1.0;

  bool operator==(const CostModel&) const = default;
};

struct RewardWeights {
  double kpi = 1.0;
  double energy = 0.5;

  bool operator==(const RewardWeights&) const = default;
};

struct ScenarioConfig {
  std::vector<ServiceSpec> services;
  std::uint32_t num_sensors = 50;
  std::uint64_t sim_cycles = 12000;
  double cycle_ms = 100.0;
  std::uint64_t seed = 0;
  double churn_probability = 0.01;
  std::uint32_t datastore_window_x = 60;  // seconds

  std::array<QosClass, 2> qos_classes{QosClass{QosClassId::DelaySensitive, 100.0, 50},
                                      QosClass{QosClassId::DelayTolerant, 500.0, 10}};
  PayloadCaps payload_caps;
  double drain_per_byte = 2.5e-7;
  CostModel cost;
  RewardWeights reward;
  std::uint32_t decision_cycles = 5;  // simulation cycles per learning step
  std::uint32_t batch_size = 128;     // reward-trace aggregation window

  const QosClass& qos(QosClassId id) const { return qos_classes[static_cast<std::size_t>(id)]; }
  /// Reporting interval of `id` in whole cycles.
  std::uint32_t interval_cycles(QosClassId id) const;
  /// Position of `id` in `services`, or services.size() when absent.
  std::size_t service_position(ServiceId id) const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Materializes the scenario table for the requested services.
/// Throws ConfigError on duplicates or when n < |services|.
ScenarioConfig build_scenario(std::span<const ServiceId> services, std::uint32_t n,
                              std::uint64_t seed);

/// Every invariant violation, one message per violation, each naming its field.
/// `experiment` additionally requires 2 or 3 services.
std::vector<std::string> validate(const ScenarioConfig& config, bool experiment = false);
void require_valid(const ScenarioConfig& config, bool experiment = false);

json config_to_json(const ScenarioConfig& config);
/// Strict: unknown keys and wrong types raise ConfigError. Missing keys take
/// defaults. Does not run `validate`.
ScenarioConfig config_from_json(const json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical serialization (sorted keys, compact) and its FNV-1a hash.
std::string canonical_config(const ScenarioConfig& config);
std::uint64_t config_hash(const ScenarioConfig& config);
std::string hex64(std::uint64_t value);

std::string_view to_string(DeviceTier tier);
std::string_view to_string(ServiceId id);
std::string_view to_string(Protocol protocol);
std::string_view to_string(QosClassId id);
ServiceId parse_service(std::string_view name);
Protocol parse_protocol(std::string_view name);

}  // namespace qcsm
