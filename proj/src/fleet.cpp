#include "qcsm/fleet.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "qcsm/errors.hpp"

namespace qcsm {

SensorNode drain(SensorNode node, std::int64_t bytes_requested, double drain_per_byte) {
  if (bytes_requested < 0) throw ContractViolation("drain: bytes_requested must be non-negative");
  if (bytes_requested == 0) return node;
  node.lifetime_fraction =
      std::max(0.0, node.lifetime_fraction - drain_per_byte * static_cast<double>(bytes_requested));
  if (node.lifetime_fraction == 0.0) node.active = false;
  return node;
}

double remaining_lifetime_years(const SensorNode& node) {
  return kMaxLifetimeYears * node.lifetime_fraction;
}

std::uint32_t samples_per_report(std::uint32_t cap) {
  // worst case: 48 bytes of record framing, 7 bytes per sample ("-19.75,")
  constexpr std::uint32_t kFraming = 48;
  constexpr std::uint32_t kPerSample = 7;
  return cap > kFraming + kPerSample ? (cap - kFraming) / kPerSample : 1;
}

ReadingRecord reading_record(const SensorNode& node, std::uint64_t cycle, RandomStream& rng) {
  ReadingRecord r{node.id, cycle, {}};
  const auto count = samples_per_report(node.device_class.max_payload_bytes);
  r.samples.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) r.samples.push_back(-20.0 + 0.25 * static_cast<double>(rng.below(320)));
  return r;
}

json ReadingRecord::to_json() const {
  return {{"id", id}, {"cycle", cycle}, {"value", samples}};
}

namespace {

void append(Bytes& out, std::string_view text) { out.insert(out.end(), text.begin(), text.end()); }

void append_number(Bytes& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string_view text(buf, static_cast<std::size_t>(end - buf));
  append(out, text);
  if (text.find_first_of(".e") == std::string_view::npos) append(out, ".0");
}

void append_cbor_head(Bytes& out, std::uint8_t major, std::uint64_t arg) {
  const auto m = static_cast<std::uint8_t>(major << 5);
  if (arg < 24) {
    out.push_back(m | static_cast<std::uint8_t>(arg));
    return;
  }
  int width = arg <= 0xff ? 1 : arg <= 0xffff ? 2 : arg <= 0xffffffffULL ? 4 : 8;
  out.push_back(m | static_cast<std::uint8_t>(width == 1 ? 24 : width == 2 ? 25 : width == 4 ? 26 : 27));
  for (int s = 8 * (width - 1); s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(arg >> s));
}

}  // namespace

Bytes serialize_json(const ReadingRecord& r) {
  Bytes out;
  out.reserve(48 + 7 * r.samples.size());
  append(out, "{\"cycle\":");
  append(out, std::to_string(r.cycle));
  append(out, ",\"id\":");
  append(out, std::to_string(r.id));
  append(out, ",\"value\":[");
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    if (k) out.push_back(',');
    append_number(out, r.samples[k]);
  }
  append(out, "]}");
  return out;
}

Bytes serialize_cbor(const ReadingRecord& r) {
  Bytes out;
  out.reserve(24 + 9 * r.samples.size());
  append_cbor_head(out, 5, 3);
  append_cbor_head(out, 3, 5);
  append(out, "cycle");
  append_cbor_head(out, 0, r.cycle);
  append_cbor_head(out, 3, 2);
  append(out, "id");
  append_cbor_head(out, 0, r.id);
  append_cbor_head(out, 3, 5);
  append(out, "value");
  append_cbor_head(out, 4, r.samples.size());
  for (double v : r.samples) {
    std::uint16_t half;
    if (to_half_bits(v, half)) {
      out.push_back(0xf9);
      out.push_back(static_cast<std::uint8_t>(half >> 8));
      out.push_back(static_cast<std::uint8_t>(half));
    } else {
      // outside the quarter grid; fall back to the generic encoder
      const Bytes item = encode_cbor(json(v));
      out.insert(out.end(), item.begin(), item.end());
    }
  }
  return out;
}

Envelope make_envelope(std::uint32_t source_id, Protocol protocol, const ReadingRecord& record) {
  Envelope e;
  e.source_id = source_id;
  e.protocol = protocol;
  e.transport = transport_for(protocol);
  e.encoding = encoding_for(protocol);
  e.emitted_cycle = record.cycle;
  e.payload = e.encoding == Encoding::CBOR ? serialize_cbor(record) : serialize_json(record);
  return e;
}

Fleet::Fleet(std::vector<SensorNode> nodes, const ScenarioConfig& config)
    : nodes_(std::move(nodes)),
      services_(config.services),
      assignment_(config.services.size(), QosClassId::DelaySensitive),
      drain_per_byte_(config.drain_per_byte) {
  for (QosClassId c : kQosClasses) interval_[idx(c)] = config.interval_cycles(c);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (nodes_[k].id != k) throw ContractViolation("Fleet: node ids must be dense and ordered");
    nodes_[k].queued_for.reset();
    if (nodes_[k].active) ++active_[idx(class_of_node(nodes_[k]))];
  }
}

std::size_t Fleet::index(ServiceId s) const {
  for (std::size_t k = 0; k < services_.size(); ++k)
    if (services_[k].id == s) return k;
  throw ContractViolation("Fleet: service not part of this scenario");
}

Protocol Fleet::protocol_of(ServiceId service) const { return services_[index(service)].protocol; }

void Fleet::remove_from_queue(SensorNode& n) {
  if (!n.queued_for) return;
  auto& q = queue_[idx(*n.queued_for)];
  q.erase(std::find(q.begin(), q.end(), n.id));
  n.queued_for.reset();
}

void Fleet::assign(ServiceId service, QosClassId cls) {
  const std::size_t s = index(service);
  const QosClassId old = assignment_[s];
  if (old == cls) return;
  assignment_[s] = cls;
  // requeue waiting nodes in their original order
  auto& from = queue_[idx(old)];
  std::deque<std::uint32_t> kept;
  for (std::uint32_t id : from) {
    if (nodes_[id].service == service) {
      queue_[idx(cls)].push_back(id);
      nodes_[id].queued_for = cls;
    } else {
      kept.push_back(id);
    }
  }
  from = std::move(kept);
  for (const auto& n : nodes_) {
    if (n.service != service || !n.active) continue;
    --active_[idx(old)];
    ++active_[idx(cls)];
  }
}

void Fleet::set_active(std::uint32_t id, bool active) {
  SensorNode& n = nodes_.at(id);
  if (n.active == active) return;
  if (active && n.lifetime_fraction <= 0.0) return;
  n.active = active;
  const auto c = idx(class_of_node(n));
  if (active) {
    ++active_[c];
  } else {
    --active_[c];
    remove_from_queue(n);
  }
}

bool Fleet::is_due(const SensorNode& n, std::uint64_t cycle) const {
  return n.active && (cycle + n.id) % interval_cycles(class_of_node(n)) == 0;
}

bool Fleet::enqueue(std::uint32_t id) {
  SensorNode& n = nodes_.at(id);
  if (!n.active || n.queued_for) return false;
  const QosClassId c = class_of_node(n);
  n.queued_for = c;
  queue_[idx(c)].push_back(id);
  return true;
}

std::uint32_t Fleet::serve(QosClassId cls, std::uint32_t capacity) {
  auto& q = queue_[idx(cls)];
  std::uint32_t served = 0;
  while (served < capacity && !q.empty()) {
    nodes_[q.front()].queued_for.reset();
    q.pop_front();
    ++served;
  }
  return served;
}

void Fleet::apply_drain(std::uint32_t id, std::int64_t bytes) {
  SensorNode& n = nodes_.at(id);
  const bool was_active = n.active;
  n = drain(n, bytes, drain_per_byte_);
  if (was_active && !n.active) {
    --active_[idx(class_of_node(n))];
    remove_from_queue(n);
  }
}

std::uint32_t Fleet::churn(RandomStream& rng, double probability) {
  if (probability <= 0.0) return 0;
  std::uint32_t toggles = 0;
  for (auto& n : nodes_) {
    if (n.is_master) continue;
    if (!rng.bernoulli(probability)) continue;
    const bool before = n.active;
    set_active(n.id, !n.active);
    toggles += n.active != before;
  }
  return toggles;
}

json Fleet::snapshot(std::uint64_t cycle) const {
  json nodes = json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"id", n.id},
                     {"device_class", to_string(n.device_class.tier)},
                     {"max_payload_bytes", n.device_class.max_payload_bytes},
                     {"service", to_string(n.service)},
                     {"qos_class", to_string(class_of_node(n))},
                     {"is_master", n.is_master},
                     {"lifetime_fraction", n.lifetime_fraction},
                     {"active", n.active},
                     {"queued_for", n.queued_for ? json(to_string(*n.queued_for)) : json(nullptr)}});
  }
  return {{"cycle", cycle}, {"nodes", std::move(nodes)}};
}

Fleet spawn_fleet(const ScenarioConfig& config) {
  require_valid(config);
  const std::size_t services = config.services.size();
  std::vector<SensorNode> nodes;
  nodes.reserve(config.num_sensors);
  std::vector<bool> has_master(services, false);
  for (std::uint32_t id = 0; id < config.num_sensors; ++id) {
    SensorNode n;
    n.id = id;
    n.device_class = device_class(static_cast<DeviceTier>(id % 3), config.payload_caps);
    // blocks of three keep tiers balanced within each service; with fewer
    // than 3 * services nodes fall back to plain round-robin
    const std::size_t s = config.num_sensors >= 3 * services ? (id / 3) % services : id % services;
    n.service = config.services[s].id;
    if (!has_master[s]) {
      n.is_master = true;
      has_master[s] = true;
    }
    nodes.push_back(n);
  }
  return Fleet(std::move(nodes), config);
}

std::vector<Envelope> generate_traffic(const Fleet& fleet, std::uint64_t cycle, RandomStream& rng) {
  std::vector<Envelope> out;
  for (const auto& n : fleet.nodes()) {
    if (!fleet.is_due(n, cycle)) continue;
    out.push_back(make_envelope(n.id, fleet.protocol_of(n.service), reading_record(n, cycle, rng)));
  }
  return out;
}

std::vector<Envelope> generate_traffic(const Fleet& fleet, std::uint64_t cycle,
                                       std::span<RandomStream> node_streams) {
  if (node_streams.size() < fleet.nodes().size())
    throw ContractViolation("generate_traffic: one stream per node required");
  std::vector<Envelope> out;
  for (const auto& n : fleet.nodes()) {
    if (!fleet.is_due(n, cycle)) continue;
    out.push_back(make_envelope(n.id, fleet.protocol_of(n.service), reading_record(n, cycle, node_streams[n.id])));
  }
  return out;
}

}  // namespace qcsm
