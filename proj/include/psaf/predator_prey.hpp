#pragma once

#include <span>
#include <vector>

#include "psaf/environment.hpp"
#include "psaf/rng.hpp"

namespace psaf {

enum class CatchRule {
  Surround4,       // predators on all four cardinal neighbours of the prey
  OnPlusAdjacent,  // one predator on the prey's cell, another next to it
};

struct PredatorPreyConfig {
  int grid_n = 7;
  int n_predators = 4;
  double prey_random_prob = 0.2;
  int max_steps = 2500;
  CatchRule catch_rule = CatchRule::Surround4;

  bool operator==(const PredatorPreyConfig&) const = default;
};

void validate(const PredatorPreyConfig& config);

struct PPState {
  std::vector<Cell> predators;
  Cell prey;
  int step_count = 0;
  bool terminal = false;
};

// Distinct uniformly random cells for every predator and the prey.
PPState pp_reset(const PredatorPreyConfig& config, Rng& rng);

// Offsets to the other predators (index order) then to the prey, over grid_n.
Observation pp_observe(const PPState& state, int predator, int grid_n);

Action prey_policy(const PPState& state, const PredatorPreyConfig& config, Rng& rng);

bool catch_condition(const PPState& state, CatchRule rule);

// Moves entities one at a time in a random order; blocked or off-grid moves
// are cancelled. Throws ContractViolation on a finished episode.
StepResult pp_step(PPState& state, const PredatorPreyConfig& config,
                   std::span<const Action> predator_actions, Action prey_action, Rng& rng);

class PredatorPreyEnv final : public Environment {
 public:
  PredatorPreyEnv(const PredatorPreyConfig& config, Rng env_rng, Rng prey_rng);

  int num_agents() const override { return config_.n_predators; }
  int num_actions() const override { return kNumMoves; }
  std::size_t observation_size() const override {
    return 2 * static_cast<std::size_t>(config_.n_predators);
  }
  int grid_size() const override { return config_.grid_n; }
  int max_steps() const override { return config_.max_steps; }

  std::vector<Observation> reset() override;
  StepResult step(std::span<const Action> actions) override;

  const PPState& state() const { return state_; }

 private:
  PredatorPreyConfig config_;
  Rng env_rng_;
  Rng prey_rng_;
  PPState state_;
};

}  // namespace psaf
