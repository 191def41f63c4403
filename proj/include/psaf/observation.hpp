#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace psaf {

using Action = int;

/// An agent's local view: relative coordinates divided by `scale` (the grid
/// size), so every value lies in [-1, 1].
struct Observation {
  std::vector<double> values;
  int scale = 1;

  bool operator==(const Observation&) const = default;
};

/// Exact integer signature of an observation (the un-normalised grid offsets).
/// Keys visit counters and the state broadcast between agents.
struct StateKey {
  std::vector<int> offsets;

  bool operator==(const StateKey&) const = default;
  auto operator<=>(const StateKey&) const = default;

  // "dx;dy;..." form used in CSV files and configs.
  std::string to_string() const;
  static StateKey parse(std::string_view text);
};

StateKey state_key(const Observation& obs);

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (int v : key.offsets) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 0x100000001B3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace psaf
