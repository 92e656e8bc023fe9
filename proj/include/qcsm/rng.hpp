#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qcsm {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seeded random stream. Distributions are implemented here rather than
/// through <random> adaptors so traces are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Named sub-stream of a root seed. Adding a new name never perturbs the
/// sequences of existing names.
RandomStream derive_stream(std::uint64_t seed, std::string_view name);

}  // namespace qcsm
