#include <gtest/gtest.h>

#include <map>

#include "qcsm/cbor.hpp"
#include "qcsm/errors.hpp"
#include "qcsm/fleet.hpp"

using namespace qcsm;

namespace {

ScenarioConfig scenario(std::vector<ServiceId> ids, std::uint32_t n) {
  auto c = build_scenario(ids, n, 0);
  c.churn_probability = 0.0;
  return c;
}

}  // namespace

TEST(SpawnFleet, MastersAndCounts) {
  const auto fleet = spawn_fleet(scenario({ServiceId::WindTurbine, ServiceId::Transportation}, 10));
  EXPECT_EQ(fleet.nodes().size(), 10u);
  std::map<ServiceId, int> masters;
  int non_masters = 0;
  for (const auto& n : fleet.nodes()) n.is_master ? ++masters[n.service] : ++non_masters;
  EXPECT_EQ(masters.size(), 2u);
  for (auto [service, count] : masters) EXPECT_EQ(count, 1) << to_string(service);
  EXPECT_EQ(non_masters, 8);
}

TEST(SpawnFleet, ClassHistogramFor98) {
  const auto fleet = spawn_fleet(
      scenario({ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation}, 98));
  std::map<DeviceTier, int> hist;
  for (const auto& n : fleet.nodes()) ++hist[n.device_class.tier];
  EXPECT_EQ(hist[DeviceTier::Class0], 33);
  EXPECT_EQ(hist[DeviceTier::Class1], 33);
  EXPECT_EQ(hist[DeviceTier::Class2], 32);
}

TEST(SpawnFleet, Deterministic) {
  const auto c = scenario({ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation}, 50);
  const auto a = spawn_fleet(c);
  const auto b = spawn_fleet(c);
  EXPECT_EQ(a.snapshot(0), b.snapshot(0));
}

TEST(Drain, Examples) {
  SensorNode n;
  EXPECT_EQ(drain(n, 0, 1e-7).lifetime_fraction, 1.0);
  const auto empty = drain(n, 10'000'000, 1e-7);
  EXPECT_EQ(empty.lifetime_fraction, 0.0);
  EXPECT_FALSE(empty.active);
  EXPECT_THROW(drain(n, -1, 1e-7), ContractViolation);
}

TEST(Drain, Additive) {
  SensorNode n;
  const auto twice = drain(drain(n, 1024, 0.5e-3), 1024, 0.5e-3);
  const auto once = drain(n, 2048, 0.5e-3);
  EXPECT_EQ(twice.lifetime_fraction, once.lifetime_fraction);
}

TEST(Lifetime, Years) {
  SensorNode n;
  EXPECT_EQ(remaining_lifetime_years(n), 10.0);
  n.lifetime_fraction = 0.5;
  EXPECT_EQ(remaining_lifetime_years(n), 5.0);
  n.lifetime_fraction = 0.0;
  EXPECT_EQ(remaining_lifetime_years(n), 0.0);
}

TEST(Fleet, CountsQueuesAndReassignment) {
  auto fleet = spawn_fleet(scenario({ServiceId::WindTurbine, ServiceId::Transportation}, 12));
  const auto ds = QosClassId::DelaySensitive;
  const auto dt = QosClassId::DelayTolerant;
  EXPECT_EQ(fleet.active_count(ds), 12u);
  for (const auto& n : fleet.nodes()) EXPECT_TRUE(fleet.enqueue(n.id));
  EXPECT_FALSE(fleet.enqueue(0));
  EXPECT_EQ(fleet.queued_count(ds), 12u);

  fleet.assign(ServiceId::WindTurbine, dt);
  EXPECT_EQ(fleet.queued_count(ds) + fleet.queued_count(dt), 12u);
  EXPECT_EQ(fleet.queued_count(dt), fleet.active_count(dt));

  EXPECT_EQ(fleet.serve(dt, 2), 2u);
  fleet.set_active(fleet.nodes().back().id, false);
  for (QosClassId c : kQosClasses) EXPECT_LE(fleet.queued_count(c), fleet.active_count(c));
}

TEST(Fleet, DepletedNodesStayInactive) {
  auto c = scenario({ServiceId::WindTurbine, ServiceId::Transportation}, 6);
  c.drain_per_byte = 1e-3;
  auto fleet = spawn_fleet(c);
  fleet.apply_drain(5, 2000);
  EXPECT_FALSE(fleet.node(5).active);
  fleet.set_active(5, true);
  EXPECT_FALSE(fleet.node(5).active);
}

TEST(Fleet, ChurnNeverTouchesMasters) {
  auto fleet = spawn_fleet(scenario({ServiceId::WindTurbine, ServiceId::Transportation}, 30));
  auto rng = derive_stream(1, "churn");
  for (int k = 0; k < 50; ++k) fleet.churn(rng, 0.5);
  for (const auto& n : fleet.nodes())
    if (n.is_master) EXPECT_TRUE(n.active);
}

TEST(Traffic, InactiveFleetIsSilent) {
  auto fleet = spawn_fleet(scenario({ServiceId::WindTurbine, ServiceId::Transportation}, 4));
  auto rng = derive_stream(0, "traffic");
  for (const auto& n : fleet.nodes()) fleet.set_active(n.id, false);
  EXPECT_TRUE(generate_traffic(fleet, 0, rng).empty());
}

TEST(Traffic, IntervalArithmetic) {
  auto rng = derive_stream(0, "traffic");
  auto coap = spawn_fleet(scenario({ServiceId::WindTurbine}, 1));
  std::size_t cbor = 0;
  for (std::uint64_t c = 0; c < 5; ++c)
    for (const auto& e : generate_traffic(coap, c, rng)) cbor += e.encoding == Encoding::CBOR;
  EXPECT_EQ(cbor, 5u);

  auto http = spawn_fleet(scenario({ServiceId::SolarPanel}, 1));
  http.assign(ServiceId::SolarPanel, QosClassId::DelayTolerant);
  std::size_t json_count = 0;
  for (std::uint64_t c = 0; c < 5; ++c)
    for (const auto& e : generate_traffic(http, c, rng)) json_count += e.encoding == Encoding::JSON;
  EXPECT_EQ(json_count, 1u);
}

TEST(Traffic, PayloadsFitDeviceCapsAndAreWellFormed) {
  auto fleet = spawn_fleet(
      scenario({ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation}, 30));
  auto rng = derive_stream(3, "traffic");
  for (std::uint64_t c = 0; c < 20; ++c) {
    for (const auto& e : generate_traffic(fleet, c, rng)) {
      EXPECT_LE(e.payload.size(), fleet.node(e.source_id).device_class.max_payload_bytes);
      EXPECT_TRUE(is_well_formed(e));
      EXPECT_EQ(e.transport, e.protocol == Protocol::CoAP ? Transport::UDP : Transport::TCP);
    }
  }
}

TEST(ReadingRecord, DirectSerializersMatchGenericOnes) {
  auto fleet = spawn_fleet(
      scenario({ServiceId::WindTurbine, ServiceId::SolarPanel, ServiceId::Transportation}, 9));
  auto rng = derive_stream(11, "traffic");
  for (std::uint64_t cycle : {0ULL, 23ULL, 24ULL, 255ULL, 70000ULL, 5000000000ULL}) {
    for (const auto& n : fleet.nodes()) {
      const auto r = reading_record(n, cycle, rng);
      const auto doc = r.to_json();
      const std::string text = doc.dump();
      EXPECT_EQ(serialize_json(r), Bytes(text.begin(), text.end()));
      EXPECT_EQ(serialize_cbor(r), encode_cbor(doc));
    }
  }
  ReadingRecord odd{1, 2, {0.1, -1e300, 1e-7, 3.0, -0.0}};
  const std::string text = odd.to_json().dump();
  EXPECT_EQ(serialize_json(odd), Bytes(text.begin(), text.end()));
  EXPECT_EQ(serialize_cbor(odd), encode_cbor(odd.to_json()));
}

TEST(ReadingRecord, SampleCountsPerTier) {
  EXPECT_EQ(samples_per_report(64), 2u);
  EXPECT_EQ(samples_per_report(256), 29u);
  EXPECT_EQ(samples_per_report(1024), 139u);
}

TEST(Fleet, SnapshotListsEveryNode) {
  const auto fleet = spawn_fleet(scenario({ServiceId::WindTurbine, ServiceId::Transportation}, 5));
  const auto snap = fleet.snapshot(7);
  EXPECT_EQ(snap["cycle"], 7);
  ASSERT_EQ(snap["nodes"].size(), 5u);
  for (const char* key : {"id", "device_class", "service", "is_master", "lifetime_fraction", "active"})
    EXPECT_TRUE(snap["nodes"][0].contains(key)) << key;
}
