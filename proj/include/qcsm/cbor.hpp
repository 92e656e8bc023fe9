#pragma once

// CBOR (RFC 8949) codec restricted to the JSON data model: maps with text
// keys, arrays, text, integers, floats, booleans and null. The encoder emits
// preferred serialization (shortest argument and float widths) with definite
// lengths only. Map entries are emitted in the document's key order.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace qcsm {

using Bytes = std::vector<std::uint8_t>;

/// Throws DecodeError for malformed input and UnsupportedItem for
/// well-formed items outside the JSON subset.
nlohmann::json decode_cbor(std::span<const std::uint8_t> payload);

Bytes encode_cbor(const nlohmann::json& document);

/// Half-precision bit pattern for `value` if it is exactly representable.
bool to_half_bits(double value, std::uint16_t& bits);
double from_half_bits(std::uint16_t bits);

}  // namespace qcsm
