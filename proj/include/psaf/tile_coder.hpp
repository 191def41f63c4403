#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psaf/observation.hpp"

namespace psaf {

/// Hashed grid tile coding over a fixed number of dimensions.
///
/// Tiling t is displaced by t / num_tilings * tile_width along every
/// dimension. Each tile is hashed with its tiling index into
/// [0, table_size); collisions are tolerated.
class TileCoder {
 public:
  TileCoder(std::size_t dimensions, int num_tilings, double tile_width, std::size_t table_size);

  std::size_t dimensions() const { return dimensions_; }
  int num_tilings() const { return num_tilings_; }
  double tile_width() const { return tile_width_; }
  std::size_t table_size() const { return table_size_; }
  double offset(int tiling) const { return offsets_[static_cast<std::size_t>(tiling)]; }

  // Integer tile coordinates of `values` in one tiling.
  std::vector<std::int64_t> tile_coordinates(const std::vector<double>& values, int tiling) const;

  // One index per tiling. Throws DimensionError on a length mismatch.
  std::vector<std::size_t> features(const Observation& obs) const;
  void features(const Observation& obs, std::vector<std::size_t>& out) const;

  bool operator==(const TileCoder&) const = default;

 private:
  std::size_t dimensions_;
  int num_tilings_;
  double tile_width_;
  std::size_t table_size_;
  std::vector<double> offsets_;
};

}  // namespace psaf
