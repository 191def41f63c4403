#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace psaf {

/// Deterministic random stream.
///
/// Streams are derived from a root seed and a stream name, so a run can hand
/// out independent generators ("env", "prey", "agent/0", ...) whose sequences
/// do not depend on how much any other stream has been consumed. The helpers
/// below avoid the standard distributions, whose algorithms differ between
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  static Rng stream(std::uint64_t root_seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace psaf
