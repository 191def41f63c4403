#include "psaf/eligibility_traces.hpp"

#include "psaf/errors.hpp"
#include "psaf/q_function.hpp"

namespace psaf {

void EligibilityTraces::clear() {
  entries_.clear();
  position_.clear();
}

void EligibilityTraces::decay_and_bump(std::span<const std::size_t> features, Action a,
                                       double decay) {
  if (a < 0 || a > 255) throw ContractViolation("trace action index out of range");
  std::size_t i = 0;
  while (i < entries_.size()) {
    entries_[i].value *= decay;
    if (entries_[i].value < prune_below_) {
      position_.erase(key(entries_[i].feature, entries_[i].action));
      if (i + 1 != entries_.size()) {
        entries_[i] = entries_.back();
        position_[key(entries_[i].feature, entries_[i].action)] = i;
      }
      entries_.pop_back();
      continue;
    }
    ++i;
  }
  for (std::size_t f : features) {
    auto [it, inserted] = position_.try_emplace(key(f, a), entries_.size());
    if (inserted) {
      entries_.push_back({f, a, 1.0});
    } else {
      entries_[it->second].value += 1.0;
    }
  }
}

double EligibilityTraces::value(std::size_t feature, Action a) const {
  auto it = position_.find(key(feature, a));
  return it == position_.end() ? 0.0 : entries_[it->second].value;
}

void apply_update(QFunction& q, const EligibilityTraces& traces, double alpha, double delta) {
  if (delta == 0.0) return;
  const double step = alpha * delta;
  for (const auto& e : traces.entries()) q.add_weight(e.action, e.feature, step * e.value);
}

}  // namespace psaf
