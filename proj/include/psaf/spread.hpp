#pragma once

#include <span>
#include <vector>

#include "psaf/environment.hpp"
#include "psaf/rng.hpp"

namespace psaf {

struct SpreadConfig {
  int grid_n = 6;
  int n_agents = 2;
  std::vector<Cell> landmarks{{1, 1}, {4, 4}};
  int max_steps = 20;

  bool operator==(const SpreadConfig&) const = default;
};

void validate(const SpreadConfig& config);

struct SpreadState {
  std::vector<Cell> agents;
  int step_count = 0;
  bool terminal = false;
};

// Agents placed uniformly at random; they may share cells.
SpreadState spread_reset(const SpreadConfig& config, Rng& rng);

// Offsets to the other agents then to each landmark, over grid_n.
Observation spread_observe(const SpreadState& state, const SpreadConfig& config, int agent);

int covered_landmarks(const SpreadState& state, const SpreadConfig& config);

// Simultaneous moves. Reward +1 when every landmark is covered, -1 when none
// is, 0 otherwise. Throws ContractViolation on a finished episode.
StepResult spread_step(SpreadState& state, const SpreadConfig& config, std::span<const Action> actions);

class SpreadEnv final : public Environment {
 public:
  SpreadEnv(const SpreadConfig& config, Rng rng);

  int num_agents() const override { return config_.n_agents; }
  int num_actions() const override { return kNumMoves; }
  std::size_t observation_size() const override {
    return 2 * static_cast<std::size_t>(config_.n_agents - 1) + 2 * config_.landmarks.size();
  }
  int grid_size() const override { return config_.grid_n; }
  int max_steps() const override { return config_.max_steps; }

  std::vector<Observation> reset() override;
  StepResult step(std::span<const Action> actions) override;

  const SpreadState& state() const { return state_; }

 private:
  SpreadConfig config_;
  Rng rng_;
  SpreadState state_;
};

}  // namespace psaf
