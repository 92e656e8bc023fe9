#include "qcsm/gateway.hpp"

#include <set>

#include "qcsm/errors.hpp"

namespace qcsm {

std::string_view to_string(GatewayMode mode) { return mode == GatewayMode::QCSM ? "QCSM" : "Baseline"; }

std::string canonical_json(const json& document) { return document.dump(); }

IngestResult handle_message(const Envelope& envelope, ServiceId service, GatewayMode mode,
                            const CostModel& cost, std::uint64_t cycle) {
  IngestResult out;
  auto& r = out.record;
  r.source_id = envelope.source_id;
  r.service = service;
  r.protocol = envelope.protocol;
  r.original_encoding = envelope.encoding;
  r.ingested_cycle = cycle;

  const bool cbor = envelope.encoding == Encoding::CBOR;
  json document = cbor ? decode_cbor(envelope.payload)
                       : json::parse(envelope.payload.begin(), envelope.payload.end());
  if (mode == GatewayMode::QCSM) {
    r.document = canonical_json(document);
    r.normalized = true;
    out.cost_ms = cbor ? cost.c_parse_cbor + cost.c_convert : cost.c_parse_json;
  } else {
    r.document.assign(envelope.payload.begin(), envelope.payload.end());
    out.cost_ms = cbor ? cost.c_parse_cbor : cost.c_parse_json;
  }
  return out;
}

QueryResult query(std::span<const DataPoolRecord> pool, std::optional<ServiceId> selector,
                  CycleWindow window, GatewayMode mode, const CostModel& cost) {
  if (window.first > window.last) throw ContractViolation("query: window.first > window.last");
  QueryResult out;
  std::set<Protocol> dispatched;
  double per_record = 0.0;
  for (const auto& r : pool) {
    if (selector && r.service != *selector) continue;
    if (r.ingested_cycle < window.first || r.ingested_cycle > window.last) continue;
    const bool raw_cbor = !r.normalized && r.original_encoding == Encoding::CBOR;
    if (raw_cbor) {
      const auto* p = reinterpret_cast<const std::uint8_t*>(r.document.data());
      out.documents.push_back(decode_cbor({p, r.document.size()}));
    } else {
      out.documents.push_back(json::parse(r.document));
    }
    if (mode == GatewayMode::Baseline) {
      dispatched.insert(r.protocol);
      per_record += raw_cbor ? cost.c_parse_cbor + cost.c_convert : cost.c_parse_json;
    } else {
      per_record += cost.c_parse_json;
    }
  }
  const double dispatches = std::max<std::size_t>(1, dispatched.size());
  out.response_time_ms = cost.c_query_base * dispatches + per_record;
  return out;
}

namespace {

std::string to_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

}  // namespace

json record_to_json(const DataPoolRecord& r) {
  json j = {{"source_id", r.source_id},
            {"service", to_string(r.service)},
            {"protocol", to_string(r.protocol)},
            {"original_encoding", to_string(r.original_encoding)},
            {"ingested_cycle", r.ingested_cycle}};
  if (r.normalized || r.original_encoding == Encoding::JSON)
    j["document"] = json::parse(r.document);
  else
    j["payload_hex"] = to_hex(r.document);
  return j;
}

std::string pool_dump(std::span<const DataPoolRecord> pool) {
  std::string out;
  for (const auto& r : pool) {
    out += canonical_json(record_to_json(r));
    out += '\n';
  }
  return out;
}

AgentManager::AgentManager(GatewayMode mode, CostModel cost, std::map<Protocol, ServiceId> routes)
    : mode_(mode), cost_(cost), routes_(std::move(routes)) {}

bool AgentManager::ingest(const Envelope& envelope, std::uint64_t cycle) {
  auto route = routes_.find(envelope.protocol);
  if (route == routes_.end() || envelope.transport != transport_for(envelope.protocol)) {
    ++rejected_;
    return false;
  }
  IngestResult result;
  try {
    result = handle_message(envelope, route->second, mode_, cost_, cycle);
  } catch (const std::exception&) {
    ++rejected_;
    return false;
  }
  std::lock_guard lock(mutex_);
  pool_.push_back(std::move(result.record));
  ingest_cost_ms_ += result.cost_ms;
  return true;
}

std::vector<DataPoolRecord> AgentManager::snapshot() const {
  std::lock_guard lock(mutex_);
  return pool_;
}

QueryResult AgentManager::query(std::optional<ServiceId> selector, CycleWindow window) const {
  const auto pool = snapshot();
  return qcsm::query(pool, selector, window, mode_, cost_);
}

double AgentManager::ingest_cost_ms() const {
  std::lock_guard lock(mutex_);
  return ingest_cost_ms_;
}

std::size_t AgentManager::size() const {
  std::lock_guard lock(mutex_);
  return pool_.size();
}

std::map<Protocol, ServiceId> routes_for(const ScenarioConfig& config) {
  std::map<Protocol, ServiceId> routes;
  for (const auto& s : config.services) routes[s.protocol] = s.id;
  return routes;
}

}  // namespace qcsm
