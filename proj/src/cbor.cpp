#include "qcsm/cbor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "qcsm/errors.hpp"

namespace qcsm {

namespace {

constexpr int kMaxDepth = 256;

enum Major : std::uint8_t {
  kUnsigned = 0,
  kNegative = 1,
  kByteString = 2,
  kText = 3,
  kArray = 4,
  kMap = 5,
  kTag = 6,
  kSimple = 7,
};

void put_head(Bytes& out, std::uint8_t major, std::uint64_t arg) {
  const std::uint8_t m = static_cast<std::uint8_t>(major << 5);
  if (arg < 24) {
    out.push_back(m | static_cast<std::uint8_t>(arg));
  } else if (arg <= 0xff) {
    out.push_back(m | 24);
    out.push_back(static_cast<std::uint8_t>(arg));
  } else if (arg <= 0xffff) {
    out.push_back(m | 25);
    for (int s = 8; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(arg >> s));
  } else if (arg <= 0xffffffffULL) {
    out.push_back(m | 26);
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(arg >> s));
  } else {
    out.push_back(m | 27);
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(arg >> s));
  }
}

void put_float(Bytes& out, double value) {
  std::uint16_t half;
  if (std::isnan(value)) {
    out.insert(out.end(), {0xf9, 0x7e, 0x00});
  } else if (to_half_bits(value, half)) {
    out.push_back(0xf9);
    out.push_back(static_cast<std::uint8_t>(half >> 8));
    out.push_back(static_cast<std::uint8_t>(half));
  } else if (static_cast<double>(static_cast<float>(value)) == value) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
    out.push_back(0xfa);
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(bits >> s));
  } else {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    out.push_back(0xfb);
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(bits >> s));
  }
}

void encode_into(Bytes& out, const nlohmann::json& j) {
  using value_t = nlohmann::json::value_t;
  switch (j.type()) {
    case value_t::null: out.push_back(0xf6); break;
    case value_t::boolean: out.push_back(j.get<bool>() ? 0xf5 : 0xf4); break;
    case value_t::number_unsigned: put_head(out, kUnsigned, j.get<std::uint64_t>()); break;
    case value_t::number_integer: {
      const auto v = j.get<std::int64_t>();
      if (v >= 0)
        put_head(out, kUnsigned, static_cast<std::uint64_t>(v));
      else
        put_head(out, kNegative, static_cast<std::uint64_t>(-1 - v));
      break;
    }
    case value_t::number_float: put_float(out, j.get<double>()); break;
    case value_t::string: {
      const auto& s = j.get_ref<const std::string&>();
      put_head(out, kText, s.size());
      out.insert(out.end(), s.begin(), s.end());
      break;
    }
    case value_t::array:
      put_head(out, kArray, j.size());
      for (const auto& item : j) encode_into(out, item);
      break;
    case value_t::object:
      put_head(out, kMap, j.size());
      for (auto it = j.begin(); it != j.end(); ++it) {
        put_head(out, kText, it.key().size());
        out.insert(out.end(), it.key().begin(), it.key().end());
        encode_into(out, it.value());
      }
      break;
    case value_t::binary:
    case value_t::discarded:
      throw ContractViolation("encode_cbor: value is not a JSON document");
  }
}

bool valid_utf8(const std::uint8_t* p, std::size_t n) {
  std::size_t i = 0;
  while (i < n) {
    const std::uint8_t c = p[i];
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((p[i + k] & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (p[i + k] & 0x3f);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff))
      return false;
    i += len;
  }
  return true;
}

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> in) : in_(in) {}

  nlohmann::json document() {
    auto value = item(0);
    if (pos_ != in_.size()) throw DecodeError("trailing bytes after top-level item", pos_);
    return value;
  }

 private:
  std::uint8_t byte() {
    if (pos_ >= in_.size()) throw DecodeError("unexpected end of input", pos_);
    return in_[pos_++];
  }

  std::uint64_t be(int width) {
    if (in_.size() - pos_ < static_cast<std::size_t>(width))
      throw DecodeError("unexpected end of input", pos_);
    std::uint64_t v = 0;
    for (int k = 0; k < width; ++k) v = (v << 8) | in_[pos_++];
    return v;
  }

  // Argument of the head starting at `start`; AI 31 is handled by callers.
  std::uint64_t argument(std::uint8_t ai, std::size_t start) {
    if (ai < 24) return ai;
    switch (ai) {
      case 24: return be(1);
      case 25: return be(2);
      case 26: return be(4);
      case 27: return be(8);
      default: throw DecodeError("reserved additional information value", start);
    }
  }

  std::size_t length(std::uint64_t n, std::size_t start) {
    // every element needs at least one byte
    if (n > in_.size() - pos_) throw DecodeError("length exceeds remaining input", start);
    return static_cast<std::size_t>(n);
  }

  nlohmann::json item(int depth) {
    if (depth > kMaxDepth) throw DecodeError("nesting too deep", pos_);
    const std::size_t start = pos_;
    const std::uint8_t head = byte();
    const std::uint8_t major = head >> 5;
    const std::uint8_t ai = head & 0x1f;

    if (ai == 31) {
      switch (major) {
        case kByteString:
        case kText:
        case kArray:
        case kMap: throw UnsupportedItem("indefinite-length item", start);
        case kSimple: throw DecodeError("unexpected break", start);
        default: throw DecodeError("indefinite length not allowed for major type", start);
      }
    }

    if (major == kSimple) return simple(ai, start);
    const std::uint64_t arg = argument(ai, start);

    switch (major) {
      case kUnsigned: return nlohmann::json(arg);
      case kNegative:
        if (arg > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
          throw UnsupportedItem("negative integer below -2^63", start);
        return nlohmann::json(-1 - static_cast<std::int64_t>(arg));
      case kByteString: throw UnsupportedItem("byte string", start);
      case kText: {
        const std::size_t n = length(arg, start);
        const std::uint8_t* p = in_.data() + pos_;
        if (!valid_utf8(p, n)) throw DecodeError("invalid UTF-8 in text string", start);
        pos_ += n;
        return nlohmann::json(std::string(reinterpret_cast<const char*>(p), n));
      }
      case kArray: {
        const std::size_t n = length(arg, start);
        auto out = nlohmann::json::array();
        for (std::size_t k = 0; k < n; ++k) out.push_back(item(depth + 1));
        return out;
      }
      case kMap: {
        const std::size_t n = length(arg, start);
        auto out = nlohmann::json::object();
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t key_at = pos_;
          if (key_at >= in_.size()) throw DecodeError("unexpected end of input", key_at);
          if ((in_[key_at] >> 5) != kText) {
            // still reject malformed keys as malformed
            item(depth + 1);
            throw UnsupportedItem("non-text map key", key_at);
          }
          auto key = item(depth + 1);
          auto& name = key.get_ref<const std::string&>();
          if (out.contains(name)) throw DecodeError("duplicate map key", key_at);
          out[name] = item(depth + 1);
        }
        return out;
      }
      case kTag: throw UnsupportedItem("tagged item", start);
    }
    throw DecodeError("unreachable major type", start);
  }

  nlohmann::json simple(std::uint8_t ai, std::size_t start) {
    switch (ai) {
      case 20: return false;
      case 21: return true;
      case 22: return nullptr;
      case 23: throw UnsupportedItem("undefined", start);
      case 24: {
        const auto v = byte();
        if (v < 32) throw DecodeError("simple value encoded in two bytes", start);
        throw UnsupportedItem("unassigned simple value", start);
      }
      case 25: return from_half_bits(static_cast<std::uint16_t>(be(2)));
      case 26: return static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(be(4))));
      case 27: return std::bit_cast<double>(be(8));
      case 28:
      case 29:
      case 30: throw DecodeError("reserved additional information value", start);
      default: throw UnsupportedItem("unassigned simple value", start);
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

bool to_half_bits(double value, std::uint16_t& bits) {
  if (std::isnan(value)) {
    bits = 0x7e00;
    return true;
  }
  const std::uint16_t sign = std::signbit(value) ? 0x8000 : 0;
  const double a = std::fabs(value);
  if (a == 0.0) {
    bits = sign;
    return true;
  }
  if (std::isinf(a)) {
    bits = sign | 0x7c00;
    return true;
  }
  int e;
  std::frexp(a, &e);
  const int exponent = e - 1;  // a = 1.f * 2^exponent
  if (exponent > 15) return false;
  if (exponent >= -14) {
    const double mant = (std::ldexp(a, -exponent) - 1.0) * 1024.0;
    if (mant != std::floor(mant)) return false;
    bits = static_cast<std::uint16_t>(sign | ((exponent + 15) << 10) | static_cast<int>(mant));
    return true;
  }
  const double sub = std::ldexp(a, 24);
  if (sub != std::floor(sub) || sub >= 1024.0) return false;
  bits = static_cast<std::uint16_t>(sign | static_cast<int>(sub));
  return true;
}

double from_half_bits(std::uint16_t h) {
  const int exp = (h >> 10) & 0x1f;
  const int mant = h & 0x3ff;
  double v;
  if (exp == 0)
    v = std::ldexp(mant, -24);
  else if (exp != 31)
    v = std::ldexp(mant + 1024, exp - 25);
  else
    v = mant == 0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  return (h & 0x8000) ? -v : v;
}

nlohmann::json decode_cbor(std::span<const std::uint8_t> payload) {
  return Decoder(payload).document();
}

Bytes encode_cbor(const nlohmann::json& document) {
  Bytes out;
  encode_into(out, document);
  return out;
}

}  // namespace qcsm
