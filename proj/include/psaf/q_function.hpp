#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "psaf/observation.hpp"
#include "psaf/tile_coder.hpp"

namespace psaf {

enum class Backend { ExactTabular, TileLinear };

/// Action-value function over sparse binary features.
///
/// ExactTabular gives every distinct StateKey its own feature, so a weight is
/// exactly Q(s, a). TileLinear uses the tile coder's active tiles and
/// Q(s, a) is the sum of the active weights for a. Unwritten entries read 0.
class QFunction {
 public:
  static QFunction exact_tabular(int num_actions);
  static QFunction tile_linear(const TileCoder& coder, int num_actions);

  Backend backend() const { return coder_ ? Backend::TileLinear : Backend::ExactTabular; }
  int num_actions() const { return num_actions_; }
  const TileCoder* tile_coder() const { return coder_ ? &*coder_ : nullptr; }

  double value(const Observation& s, Action a) const;
  std::vector<double> row(const Observation& s) const;
  void row(const Observation& s, std::vector<double>& out) const;

  // Overwrites so that value(s, a) == v afterwards. TileLinear spreads v
  // evenly over the active tiles, which also moves neighbouring states.
  void set(const Observation& s, Action a, double v);

  // Active feature indices of s. Interns unseen tabular states.
  void active_features(const Observation& s, std::vector<std::size_t>& out);
  double value(std::span<const std::size_t> features, Action a) const;

  double weight(Action a, std::size_t feature) const;
  void add_weight(Action a, std::size_t feature, double delta) {
    weights_[static_cast<std::size_t>(a)][feature] += delta;
  }
  void set_weight(Action a, std::size_t feature, double w);

  // Order-sensitive digest of every stored value.
  std::uint64_t content_hash() const;

 private:
  QFunction(std::optional<TileCoder> coder, int num_actions);

  std::optional<std::size_t> find_state(const Observation& s) const;

  std::optional<TileCoder> coder_;
  int num_actions_;
  std::unordered_map<StateKey, std::size_t, StateKeyHash> state_index_;
  std::vector<std::vector<double>> weights_;  // [action][feature]
};

}  // namespace psaf
