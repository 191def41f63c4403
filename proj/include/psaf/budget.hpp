#pragma once

#include <cstdint>
#include <optional>

namespace psaf {

/// Remaining count for one kind of sharing event. Only ever decremented.
class BudgetCounter {
 public:
  static BudgetCounter unlimited() { return BudgetCounter(std::nullopt); }
  static BudgetCounter limited(std::uint64_t n) { return BudgetCounter(n); }
  static BudgetCounter from_limit(std::optional<std::uint64_t> limit) { return BudgetCounter(limit); }

  bool available() const { return !limit_ || used_ < *limit_; }
  bool is_unlimited() const { return !limit_; }
  std::optional<std::uint64_t> limit() const { return limit_; }
  std::optional<std::uint64_t> remaining() const {
    if (!limit_) return std::nullopt;
    return *limit_ - used_;
  }
  std::uint64_t used() const { return used_; }

  // Throws ContractViolation when exhausted.
  void spend();

 private:
  explicit BudgetCounter(std::optional<std::uint64_t> limit) : limit_(limit) {}

  std::optional<std::uint64_t> limit_;
  std::uint64_t used_ = 0;
};

struct Budget {
  BudgetCounter ask = BudgetCounter::unlimited();
  BudgetCounter give = BudgetCounter::unlimited();
};

}  // namespace psaf
