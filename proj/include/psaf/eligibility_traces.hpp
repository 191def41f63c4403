#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "psaf/observation.hpp"

namespace psaf {

class QFunction;

/// Sparse accumulating traces keyed by (feature, action).
///
/// Entries whose value decays below `prune_below` are dropped, so a dropped
/// trace is never off by more than that amount.
class EligibilityTraces {
 public:
  struct Entry {
    std::size_t feature;
    Action action;
    double value;
  };

  static constexpr double kDefaultPruneBelow = 1e-12;

  explicit EligibilityTraces(double prune_below = kDefaultPruneBelow)
      : prune_below_(prune_below) {}

  void clear();

  // Scales every trace by `decay` (gamma * lambda), then adds 1 to each
  // active feature of the visited pair.
  void decay_and_bump(std::span<const std::size_t> features, Action a, double decay);

  double value(std::size_t feature, Action a) const;
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  static std::uint64_t key(std::size_t feature, Action a) {
    return (static_cast<std::uint64_t>(feature) << 8) | static_cast<std::uint64_t>(a);
  }

  double prune_below_;
  std::vector<Entry> entries_;
  std::unordered_map<std::uint64_t, std::size_t> position_;
};

// Q += alpha * delta * e for every traced entry.
void apply_update(QFunction& q, const EligibilityTraces& traces, double alpha, double delta);

}  // namespace psaf
