#pragma once

// IoT agent manager: the message handler ingests envelopes, the proxy
// normalizes CBOR payloads to canonical JSON, and the data pool keeps an
// append-only log served to the management layer.

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcsm/envelope.hpp"
#include "qcsm/model.hpp"

namespace qcsm {

enum class GatewayMode : std::uint8_t { QCSM, Baseline };

std::string_view to_string(GatewayMode mode);

struct DataPoolRecord {
  std::uint32_t source_id = 0;
  ServiceId service = ServiceId::WindTurbine;
  Protocol protocol = Protocol::MQTT;
  /// Canonical JSON text when normalized, otherwise the payload bytes verbatim.
  std::string document;
  Encoding original_encoding = Encoding::JSON;
  std::uint64_t ingested_cycle = 0;
  bool normalized = false;

  bool operator==(const DataPoolRecord&) const = default;
};

struct IngestResult {
  DataPoolRecord record;
  double cost_ms = 0.0;
};

/// Compact JSON with sorted keys and shortest round-trip floats.
std::string canonical_json(const json& document);

/// Pure ingest step. QCSM normalizes every payload to canonical JSON and pays
/// the conversion for CBOR; Baseline stores the bytes untouched.
/// DecodeError / UnsupportedItem / json::parse_error propagate.
IngestResult handle_message(const Envelope& envelope, ServiceId service, GatewayMode mode,
                            const CostModel& cost, std::uint64_t cycle);

struct CycleWindow {
  std::uint64_t first = 0;
  std::uint64_t last = UINT64_MAX;
};

struct QueryResult {
  std::vector<json> documents;
  double response_time_ms = 0.0;
};

/// Selects records by service and ingest cycle and returns them as JSON.
/// Response time = per-protocol dispatch base cost + per-record cost. QCSM
/// reads one normalized pool (one dispatch, c_parse_json per record); Baseline
/// dispatches once per distinct protocol among the matches and pays
/// c_parse_cbor + c_convert for every CBOR-origin record at query time.
QueryResult query(std::span<const DataPoolRecord> pool, std::optional<ServiceId> selector,
                  CycleWindow window, GatewayMode mode, const CostModel& cost);

/// Newline-delimited canonical JSON, one record per line.
std::string pool_dump(std::span<const DataPoolRecord> pool);
json record_to_json(const DataPoolRecord& record);

/// Thread-safe agent manager front end. Malformed messages are dropped and counted.
class AgentManager {
 public:
  AgentManager(GatewayMode mode, CostModel cost, std::map<Protocol, ServiceId> routes);

  /// Returns false if the envelope was rejected.
  bool ingest(const Envelope& envelope, std::uint64_t cycle);

  /// Immutable copy of the pool at call time.
  std::vector<DataPoolRecord> snapshot() const;
  QueryResult query(std::optional<ServiceId> selector, CycleWindow window) const;

  GatewayMode mode() const { return mode_; }
  const CostModel& cost() const { return cost_; }
  std::uint64_t rejected() const { return rejected_.load(); }
  double ingest_cost_ms() const;
  std::size_t size() const;

 private:
  GatewayMode mode_;
  CostModel cost_;
  std::map<Protocol, ServiceId> routes_;
  mutable std::mutex mutex_;
  std::vector<DataPoolRecord> pool_;
  double ingest_cost_ms_ = 0.0;
  std::atomic<std::uint64_t> rejected_{0};
};

/// Protocol -> service routing table of a scenario.
std::map<Protocol, ServiceId> routes_for(const ScenarioConfig& config);

}  // namespace qcsm
