#include "qcsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <type_traits>
#include <set>
#include <sstream>

#include "qcsm/errors.hpp"
#include "qcsm/rng.hpp"

namespace qcsm {

std::uint32_t PayloadCaps::of(DeviceTier tier) const {
  switch (tier) {
    case DeviceTier::Class0: return class0;
    case DeviceTier::Class1: return class1;
    case DeviceTier::Class2: return class2;
  }
  return class0;
}

DeviceClass device_class(DeviceTier tier, const PayloadCaps& caps) {
  return DeviceClass{tier, caps.of(tier), tier == DeviceTier::Class2};
}

ServiceSpec standard_service(ServiceId id) {
  switch (id) {
    case ServiceId::WindTurbine: return {id, 300.0, 0.10, Protocol::CoAP};
    case ServiceId::SolarPanel: return {id, 300.0, 0.10, Protocol::HTTP};
    case ServiceId::Transportation: return {id, 100.0, 0.05, Protocol::MQTT};
  }
  throw ContractViolation("unknown service id");
}

std::uint32_t ScenarioConfig::interval_cycles(QosClassId id) const {
  const double cycles = qos(id).reporting_interval_ms / cycle_ms;
  return static_cast<std::uint32_t>(std::max(1.0, std::round(cycles)));
}

std::size_t ScenarioConfig::service_position(ServiceId id) const {
  auto it = std::find_if(services.begin(), services.end(),
                         [id](const ServiceSpec& s) { return s.id == id; });
  return static_cast<std::size_t>(it - services.begin());
}

ScenarioConfig build_scenario(std::span<const ServiceId> services, std::uint32_t n,
                              std::uint64_t seed) {
  if (services.empty()) throw ConfigError("services: at least one service is required");
  std::set<ServiceId> seen;
  ScenarioConfig config;
  for (ServiceId id : services) {
    if (!seen.insert(id).second)
      throw ConfigError("services: duplicate service id " + std::string(to_string(id)));
    config.services.push_back(standard_service(id));
  }
  if (n < services.size())
    throw ConfigError("num_sensors: " + std::to_string(n) + " is below the number of services (" +
                      std::to_string(services.size()) + ")");
  config.num_sensors = n;
  config.seed = seed;
  return config;
}

namespace {

bool is_multiple(double value, double step) {
  const double q = value / step;
  return std::abs(q - std::round(q)) < 1e-9 && std::round(q) >= 1.0;
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& c, bool experiment) {
  std::vector<std::string> errors;
  auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };

  if (c.services.empty()) fail("services: at least one service is required");
  if (experiment && (c.services.size() < 2 || c.services.size() > 3))
    fail("services: experiments need 2 or 3 services, got " + std::to_string(c.services.size()));
  std::set<ServiceId> ids;
  std::set<Protocol> protocols;
  for (const auto& s : c.services) {
    const std::string name(to_string(s.id));
    if (!ids.insert(s.id).second) fail("services: duplicate service id " + name);
    if (!protocols.insert(s.protocol).second)
      fail("services: protocol " + std::string(to_string(s.protocol)) + " of " + name +
           " is already used by another service");
    if (!(s.max_delay_ms > 0)) fail("services." + name + ".max_delay_ms: must be positive");
    if (!(s.max_loss_rate >= 0 && s.max_loss_rate <= 1))
      fail("services." + name + ".max_loss_rate: must lie in [0, 1]");
  }
  if (c.num_sensors < 1) fail("num_sensors: must be positive");
  if (c.num_sensors < c.services.size())
    fail("num_sensors: " + std::to_string(c.num_sensors) + " is below the number of services");
  if (c.sim_cycles < 1) fail("sim_cycles: must be positive");
  if (!(c.cycle_ms > 0)) fail("cycle_ms: must be positive");
  if (!(c.churn_probability >= 0 && c.churn_probability <= 1))
    fail("churn_probability: " + std::to_string(c.churn_probability) + " is outside [0, 1]");
  if (c.datastore_window_x < 1) fail("datastore_window_x: must be positive");

  for (QosClassId id : kQosClasses) {
    const auto& q = c.qos(id);
    const std::string name = "qos_classes." + std::string(to_string(id));
    if (q.id != id) fail(name + ": class id mismatch");
    if (c.cycle_ms > 0 && !is_multiple(q.reporting_interval_ms, c.cycle_ms))
      fail(name + ".reporting_interval_ms: must be a positive multiple of cycle_ms");
    if (q.service_capacity_per_cycle < 1) fail(name + ".service_capacity_per_cycle: must be positive");
  }
  if (!(c.qos(QosClassId::DelaySensitive).reporting_interval_ms <
        c.qos(QosClassId::DelayTolerant).reporting_interval_ms))
    fail("qos_classes: DelaySensitive must report more often than DelayTolerant");

  const auto& p = c.payload_caps;
  if (!(p.class0 > 0 && p.class0 < p.class1 && p.class1 < p.class2))
    fail("payload_caps: require 0 < Class0 < Class1 < Class2");
  if (!(c.drain_per_byte >= 0)) fail("drain_per_byte: must be non-negative");
  const auto& k = c.cost;
  if (!(k.c_parse_json >= 0 && k.c_parse_cbor >= 0 && k.c_convert >= 0 && k.c_query_base >= 0))
    fail("cost_model: all costs must be non-negative");
  if (!(c.reward.kpi >= 0 && c.reward.energy >= 0))
    fail("reward_weights: weights must be non-negative");
  if (c.decision_cycles < 1) fail("decision_cycles: must be positive");
  if (c.batch_size < 1) fail("batch_size: must be positive");
  return errors;
}

void require_valid(const ScenarioConfig& config, bool experiment) {
  auto errors = validate(config, experiment);
  if (errors.empty()) return;
  std::string msg;
  for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
  throw ConfigError(msg);
}

// ---------------------------------------------------------------- names

std::string_view to_string(DeviceTier tier) {
  switch (tier) {
    case DeviceTier::Class0: return "Class0";
    case DeviceTier::Class1: return "Class1";
    case DeviceTier::Class2: return "Class2";
  }
  return "?";
}

std::string_view to_string(ServiceId id) {
  switch (id) {
    case ServiceId::WindTurbine: return "WindTurbine";
    case ServiceId::SolarPanel: return "SolarPanel";
    case ServiceId::Transportation: return "Transportation";
  }
  return "?";
}

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::CoAP: return "CoAP";
    case Protocol::HTTP: return "HTTP";
    case Protocol::MQTT: return "MQTT";
  }
  return "?";
}

std::string_view to_string(QosClassId id) {
  return id == QosClassId::DelaySensitive ? "DelaySensitive" : "DelayTolerant";
}

ServiceId parse_service(std::string_view name) {
  for (auto id : {ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation})
    if (to_string(id) == name) return id;
  throw ConfigError("services: unknown service id '" + std::string(name) + "'");
}

Protocol parse_protocol(std::string_view name) {
  for (auto p : {Protocol::CoAP, Protocol::HTTP, Protocol::MQTT})
    if (to_string(p) == name) return p;
  throw ConfigError("protocol: unknown protocol '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- json

json config_to_json(const ScenarioConfig& c) {
  json services = json::array();
  for (const auto& s : c.services)
    services.push_back({{"id", to_string(s.id)},
                        {"max_delay_ms", s.max_delay_ms},
                        {"max_loss_rate", s.max_loss_rate},
                        {"protocol", to_string(s.protocol)}});
  json qos = json::object();
  for (QosClassId id : kQosClasses)
    qos[std::string(to_string(id))] = {
        {"reporting_interval_ms", c.qos(id).reporting_interval_ms},
        {"service_capacity_per_cycle", c.qos(id).service_capacity_per_cycle}};
  return {
      {"services", services},
      {"num_sensors", c.num_sensors},
      {"sim_cycles", c.sim_cycles},
      {"cycle_ms", c.cycle_ms},
      {"seed", c.seed},
      {"churn_probability", c.churn_probability},
      {"datastore_window_x", c.datastore_window_x},
      {"qos_classes", qos},
      {"payload_caps",
       {{"Class0", c.payload_caps.class0}, {"Class1", c.payload_caps.class1}, {"Class2", c.payload_caps.class2}}},
      {"drain_per_byte", c.drain_per_byte},
      {"cost_model",
       {{"c_parse_json", c.cost.c_parse_json},
        {"c_parse_cbor", c.cost.c_parse_cbor},
        {"c_convert", c.cost.c_convert},
        {"c_query_base", c.cost.c_query_base}}},
      {"reward_weights", {{"kpi", c.reward.kpi}, {"energy", c.reward.energy}}},
      {"decision_cycles", c.decision_cycles},
      {"batch_size", c.batch_size},
  };
}

namespace {

// Walks one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    const std::string where = path_.empty() ? key : path_ + "." + key;
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError(where + ": expected a number");
      out = it->template get<double>();
    } else {
      if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned()))
        throw ConfigError(where + ": expected a non-negative integer");
      const auto v = it->template get<std::uint64_t>();
      if (v > std::numeric_limits<T>::max()) throw ConfigError(where + ": value out of range");
      out = static_cast<T>(v);
    }
  }

  const json* child(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key()))
        throw ConfigError((path_.empty() ? "" : path_ + ".") + it.key() + ": unknown key");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

ServiceSpec service_from_json(const json& item) {
  if (item.is_string()) return standard_service(parse_service(item.get<std::string>()));
  ObjectReader r(item, "services[]");
  const json* id = r.child("id");
  if (!id || !id->is_string()) throw ConfigError("services[].id: required string");
  ServiceSpec spec = standard_service(parse_service(id->get<std::string>()));
  r.read("max_delay_ms", spec.max_delay_ms);
  r.read("max_loss_rate", spec.max_loss_rate);
  if (const json* p = r.child("protocol")) {
    if (!p->is_string()) throw ConfigError("services[].protocol: expected a string");
    spec.protocol = parse_protocol(p->get<std::string>());
  }
  r.finish();
  return spec;
}

}  // namespace

ScenarioConfig config_from_json(const json& doc) {
  ScenarioConfig c;
  ObjectReader r(doc, "");
  const json* services = r.child("services");
  if (!services || !services->is_array()) throw ConfigError("services: required array");
  for (const auto& item : *services) c.services.push_back(service_from_json(item));
  r.read("num_sensors", c.num_sensors);
  r.read("sim_cycles", c.sim_cycles);
  r.read("cycle_ms", c.cycle_ms);
  r.read("seed", c.seed);
  r.read("churn_probability", c.churn_probability);
  r.read("datastore_window_x", c.datastore_window_x);
  if (const json* q = r.child("qos_classes")) {
    ObjectReader qr(*q, "qos_classes");
    for (QosClassId id : kQosClasses) {
      const std::string name(to_string(id));
      if (const json* cls = qr.child(name.c_str())) {
        ObjectReader cr(*cls, "qos_classes." + name);
        auto& target = c.qos_classes[static_cast<std::size_t>(id)];
        cr.read("reporting_interval_ms", target.reporting_interval_ms);
        cr.read("service_capacity_per_cycle", target.service_capacity_per_cycle);
        cr.finish();
      }
    }
    qr.finish();
  }
  if (const json* p = r.child("payload_caps")) {
    ObjectReader pr(*p, "payload_caps");
    pr.read("Class0", c.payload_caps.class0);
    pr.read("Class1", c.payload_caps.class1);
    pr.read("Class2", c.payload_caps.class2);
    pr.finish();
  }
  r.read("drain_per_byte", c.drain_per_byte);
  if (const json* k = r.child("cost_model")) {
    ObjectReader kr(*k, "cost_model");
    kr.read("c_parse_json", c.cost.c_parse_json);
    kr.read("c_parse_cbor", c.cost.c_parse_cbor);
    kr.read("c_convert", c.cost.c_convert);
    kr.read("c_query_base", c.cost.c_query_base);
    kr.finish();
  }
  if (const json* w = r.child("reward_weights")) {
    ObjectReader wr(*w, "reward_weights");
    wr.read("kpi", c.reward.kpi);
    wr.read("energy", c.reward.energy);
    wr.finish();
  }
  r.read("decision_cycles", c.decision_cycles);
  r.read("batch_size", c.batch_size);
  r.finish();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return config_from_json(doc);
}

std::string canonical_config(const ScenarioConfig& config) { return config_to_json(config).dump(); }

std::uint64_t config_hash(const ScenarioConfig& config) { return fnv1a64(canonical_config(config)); }

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace qcsm
