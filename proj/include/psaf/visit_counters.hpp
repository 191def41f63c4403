#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "psaf/observation.hpp"

namespace psaf {

/// n_visit(s) and m_visit(s, a), counting executed state-action pairs only.
class VisitCounters {
 public:
  explicit VisitCounters(int num_actions) : num_actions_(num_actions) {}

  void record(const StateKey& s, Action a);

  std::uint64_t n_visit(const StateKey& s) const;
  std::uint64_t m_visit(const StateKey& s, Action a) const;
  // m_visit for every action of s (zeros when unvisited).
  std::vector<std::uint64_t> m_visit_row(const StateKey& s) const;

  int num_actions() const { return num_actions_; }
  std::size_t num_states() const { return rows_.size(); }

 private:
  struct Row {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> m;
  };

  int num_actions_;
  std::unordered_map<StateKey, Row, StateKeyHash> rows_;
};

}  // namespace psaf
