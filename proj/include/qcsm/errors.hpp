#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcsm {

/// Scenario configuration failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed CBOR input. `offset` is the byte where decoding stopped.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed CBOR that has no JSON representation (tags, byte strings, ...).
class UnsupportedItem : public std::runtime_error {
 public:
  UnsupportedItem(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// QoS density requested for a class with an empty queue.
class DensityUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Recommendation requested before any training run published actions.
class NotTrained : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcsm
