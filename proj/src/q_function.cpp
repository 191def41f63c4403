#include "psaf/q_function.hpp"

#include <bit>
#include <stdexcept>

#include "psaf/errors.hpp"

namespace psaf {

QFunction::QFunction(std::optional<TileCoder> coder, int num_actions)
    : coder_(std::move(coder)), num_actions_(num_actions) {
  if (num_actions <= 0) throw std::invalid_argument("num_actions must be positive");
  const std::size_t size = coder_ ? coder_->table_size() : 0;
  weights_.assign(static_cast<std::size_t>(num_actions), std::vector<double>(size, 0.0));
}

QFunction QFunction::exact_tabular(int num_actions) { return QFunction(std::nullopt, num_actions); }

QFunction QFunction::tile_linear(const TileCoder& coder, int num_actions) {
  return QFunction(coder, num_actions);
}

std::optional<std::size_t> QFunction::find_state(const Observation& s) const {
  auto it = state_index_.find(state_key(s));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

double QFunction::value(const Observation& s, Action a) const {
  if (a < 0 || a >= num_actions_) throw ContractViolation("action out of range");
  const auto& w = weights_[static_cast<std::size_t>(a)];
  if (coder_) {
    double sum = 0.0;
    for (std::size_t f : coder_->features(s)) sum += w[f];
    return sum;
  }
  auto idx = find_state(s);
  return idx ? w[*idx] : 0.0;
}

void QFunction::row(const Observation& s, std::vector<double>& out) const {
  out.assign(static_cast<std::size_t>(num_actions_), 0.0);
  if (coder_) {
    thread_local std::vector<std::size_t> features;
    coder_->features(s, features);
    for (std::size_t a = 0; a < out.size(); ++a) {
      double sum = 0.0;
      for (std::size_t f : features) sum += weights_[a][f];
      out[a] = sum;
    }
    return;
  }
  if (auto idx = find_state(s)) {
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = weights_[a][*idx];
  }
}

std::vector<double> QFunction::row(const Observation& s) const {
  std::vector<double> out;
  row(s, out);
  return out;
}

void QFunction::active_features(const Observation& s, std::vector<std::size_t>& out) {
  if (coder_) {
    coder_->features(s, out);
    return;
  }
  auto [it, inserted] = state_index_.try_emplace(state_key(s), weights_.front().size());
  if (inserted) {
    for (auto& w : weights_) w.push_back(0.0);
  }
  out.assign(1, it->second);
}

double QFunction::value(std::span<const std::size_t> features, Action a) const {
  const auto& w = weights_[static_cast<std::size_t>(a)];
  double sum = 0.0;
  for (std::size_t f : features) sum += w[f];
  return sum;
}

double QFunction::weight(Action a, std::size_t feature) const {
  return weights_[static_cast<std::size_t>(a)][feature];
}

void QFunction::set_weight(Action a, std::size_t feature, double w) {
  weights_[static_cast<std::size_t>(a)][feature] = w;
}

void QFunction::set(const Observation& s, Action a, double v) {
  if (a < 0 || a >= num_actions_) throw ContractViolation("action out of range");
  std::vector<std::size_t> features;
  active_features(s, features);
  auto& w = weights_[static_cast<std::size_t>(a)];
  if (features.size() == 1) {
    w[features.front()] = v;
    return;
  }
  // A weight shared by two colliding tilings is counted once per tiling, so
  // writing the same share everywhere still sums to v.
  const double share = v / static_cast<double>(features.size());
  for (std::size_t f : features) w[f] = share;
}

std::uint64_t QFunction::content_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& w : weights_) {
    feed(w.size());
    for (double x : w) feed(std::bit_cast<std::uint64_t>(x));
  }
  return h;
}

}  // namespace psaf
