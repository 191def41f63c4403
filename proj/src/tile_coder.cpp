#include "psaf/tile_coder.hpp"

#include <cmath>
#include <string>

#include "psaf/errors.hpp"

namespace psaf {
namespace {

constexpr std::uint64_t kHashSeed = 0x51ED270B27A1F3C5ULL;

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

TileCoder::TileCoder(std::size_t dimensions, int num_tilings, double tile_width,
                     std::size_t table_size)
    : dimensions_(dimensions),
      num_tilings_(num_tilings),
      tile_width_(tile_width),
      table_size_(table_size) {
  if (num_tilings <= 0) throw std::invalid_argument("num_tilings must be positive");
  if (!(tile_width > 0.0)) throw std::invalid_argument("tile_width must be positive");
  if (table_size == 0) throw std::invalid_argument("table_size must be positive");
  offsets_.reserve(static_cast<std::size_t>(num_tilings));
  for (int t = 0; t < num_tilings; ++t) {
    offsets_.push_back(static_cast<double>(t) / num_tilings * tile_width);
  }
}

std::vector<std::int64_t> TileCoder::tile_coordinates(const std::vector<double>& values,
                                                      int tiling) const {
  std::vector<std::int64_t> coords(values.size());
  const double shift = offsets_[static_cast<std::size_t>(tiling)];
  for (std::size_t d = 0; d < values.size(); ++d) {
    coords[d] = static_cast<std::int64_t>(std::floor((values[d] + shift) / tile_width_));
  }
  return coords;
}

void TileCoder::features(const Observation& obs, std::vector<std::size_t>& out) const {
  if (obs.values.size() != dimensions_) {
    throw DimensionError("tile coder expects " + std::to_string(dimensions_) +
                         " dimensions, observation has " + std::to_string(obs.values.size()));
  }
  out.clear();
  for (int t = 0; t < num_tilings_; ++t) {
    const double shift = offsets_[static_cast<std::size_t>(t)];
    std::uint64_t h = mix(kHashSeed ^ static_cast<std::uint64_t>(t));
    for (double v : obs.values) {
      auto coord = static_cast<std::int64_t>(std::floor((v + shift) / tile_width_));
      h = mix(h ^ static_cast<std::uint64_t>(coord));
    }
    out.push_back(static_cast<std::size_t>(h % table_size_));
  }
}

std::vector<std::size_t> TileCoder::features(const Observation& obs) const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(num_tilings_));
  features(obs, out);
  return out;
}

}  // namespace psaf
