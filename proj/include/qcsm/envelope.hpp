#pragma once

#include <cstdint>

#include "qcsm/cbor.hpp"
#include "qcsm/model.hpp"

namespace qcsm {

enum class Transport : std::uint8_t { TCP, UDP };
enum class Encoding : std::uint8_t { JSON, CBOR };

/// One application message as it reaches the message handler.
struct Envelope {
  std::uint32_t source_id = 0;
  Protocol protocol = Protocol::MQTT;
  Transport transport = Transport::TCP;
  Encoding encoding = Encoding::JSON;
  Bytes payload;
  std::uint64_t emitted_cycle = 0;

  bool operator==(const Envelope&) const = default;
};

/// CoAP rides UDP; MQTT and HTTP ride TCP.
Transport transport_for(Protocol protocol);
/// CoAP agents speak CBOR; MQTT and HTTP agents speak JSON.
Encoding encoding_for(Protocol protocol);

/// Builds a well-formed envelope, serializing `document` in the protocol's encoding.
Envelope make_envelope(std::uint32_t source_id, Protocol protocol, const json& document,
                       std::uint64_t cycle);

/// Checks the transport constraint and that the payload parses in its encoding.
bool is_well_formed(const Envelope& envelope);

std::string_view to_string(Transport transport);
std::string_view to_string(Encoding encoding);

}  // namespace qcsm
