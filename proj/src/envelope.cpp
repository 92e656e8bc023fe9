#include "qcsm/envelope.hpp"

namespace qcsm {

Transport transport_for(Protocol protocol) {
  return protocol == Protocol::CoAP ? Transport::UDP : Transport::TCP;
}

Encoding encoding_for(Protocol protocol) {
  return protocol == Protocol::CoAP ? Encoding::CBOR : Encoding::JSON;
}

Envelope make_envelope(std::uint32_t source_id, Protocol protocol, const json& document,
                       std::uint64_t cycle) {
  Envelope e;
  e.source_id = source_id;
  e.protocol = protocol;
  e.transport = transport_for(protocol);
  e.encoding = encoding_for(protocol);
  e.emitted_cycle = cycle;
  if (e.encoding == Encoding::CBOR) {
    e.payload = encode_cbor(document);
  } else {
    const std::string text = document.dump();
    e.payload.assign(text.begin(), text.end());
  }
  return e;
}

bool is_well_formed(const Envelope& e) {
  if (e.transport != transport_for(e.protocol)) return false;
  try {
    if (e.encoding == Encoding::CBOR)
      decode_cbor(e.payload);
    else if (!json::accept(e.payload.begin(), e.payload.end()))
      return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

std::string_view to_string(Transport transport) { return transport == Transport::TCP ? "TCP" : "UDP"; }
std::string_view to_string(Encoding encoding) { return encoding == Encoding::JSON ? "JSON" : "CBOR"; }

}  // namespace qcsm
