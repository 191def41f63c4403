#include "psaf/visit_counters.hpp"

#include "psaf/errors.hpp"

namespace psaf {

void VisitCounters::record(const StateKey& s, Action a) {
  if (a < 0 || a >= num_actions_) throw ContractViolation("action out of range");
  auto [it, inserted] = rows_.try_emplace(s);
  if (inserted) it->second.m.assign(static_cast<std::size_t>(num_actions_), 0);
  ++it->second.n;
  ++it->second.m[static_cast<std::size_t>(a)];
}

std::uint64_t VisitCounters::n_visit(const StateKey& s) const {
  auto it = rows_.find(s);
  return it == rows_.end() ? 0 : it->second.n;
}

std::uint64_t VisitCounters::m_visit(const StateKey& s, Action a) const {
  auto it = rows_.find(s);
  return it == rows_.end() ? 0 : it->second.m[static_cast<std::size_t>(a)];
}

std::vector<std::uint64_t> VisitCounters::m_visit_row(const StateKey& s) const {
  auto it = rows_.find(s);
  if (it == rows_.end()) return std::vector<std::uint64_t>(static_cast<std::size_t>(num_actions_), 0);
  return it->second.m;
}

}  // namespace psaf
