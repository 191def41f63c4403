#include "psaf/predator_prey.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "psaf/errors.hpp"

namespace psaf {

Cell moved(Cell c, Action a) {
  switch (a) {
    case kUp: return {c.x, c.y + 1};
    case kDown: return {c.x, c.y - 1};
    case kLeft: return {c.x - 1, c.y};
    case kRight: return {c.x + 1, c.y};
    default: return c;
  }
}

bool inside(Cell c, int grid_n) { return c.x >= 0 && c.y >= 0 && c.x < grid_n && c.y < grid_n; }

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

void validate(const PredatorPreyConfig& c) {
  if (c.n_predators != 2 && c.n_predators != 4) {
    throw ConfigError("environment.n_predators", "must be 2 or 4");
  }
  if (c.grid_n <= 0) throw ConfigError("environment.grid_n", "must be positive");
  if (c.catch_rule == CatchRule::Surround4) {
    if (c.grid_n < 4) throw ConfigError("environment.grid_n", "surround4 needs at least 4 cells per side");
    if (c.n_predators != 4) throw ConfigError("environment.n_predators", "surround4 needs 4 predators");
  }
  if (c.grid_n * c.grid_n < c.n_predators + 1) {
    throw ConfigError("environment.grid_n", "grid too small to place every entity on its own cell");
  }
  if (!(c.prey_random_prob >= 0.0 && c.prey_random_prob <= 1.0)) {
    throw ConfigError("environment.prey_random_prob", "must be in [0, 1]");
  }
  if (c.max_steps <= 0) throw ConfigError("environment.max_steps", "must be positive");
}

PPState pp_reset(const PredatorPreyConfig& config, Rng& rng) {
  validate(config);
  const auto cells = static_cast<std::uint64_t>(config.grid_n) * static_cast<std::uint64_t>(config.grid_n);
  std::vector<Cell> placed;
  while (placed.size() < static_cast<std::size_t>(config.n_predators) + 1) {
    const auto idx = static_cast<int>(rng.below(cells));
    Cell c{idx % config.grid_n, idx / config.grid_n};
    if (std::find(placed.begin(), placed.end(), c) == placed.end()) placed.push_back(c);
  }
  PPState state;
  state.prey = placed.back();
  placed.pop_back();
  state.predators = std::move(placed);
  return state;
}

Observation pp_observe(const PPState& state, int predator, int grid_n) {
  const Cell self = state.predators[static_cast<std::size_t>(predator)];
  Observation obs;
  obs.scale = grid_n;
  obs.values.reserve(2 * state.predators.size());
  const double n = grid_n;
  for (std::size_t j = 0; j < state.predators.size(); ++j) {
    if (static_cast<int>(j) == predator) continue;
    obs.values.push_back((state.predators[j].x - self.x) / n);
    obs.values.push_back((state.predators[j].y - self.y) / n);
  }
  obs.values.push_back((state.prey.x - self.x) / n);
  obs.values.push_back((state.prey.y - self.y) / n);
  return obs;
}

Action prey_policy(const PPState& state, const PredatorPreyConfig& config, Rng& rng) {
  if (rng.uniform() < config.prey_random_prob) return static_cast<Action>(rng.below(kNumMoves));
  // Flee: maximise the summed Manhattan distance to all predators.
  int best_total = -1;
  std::vector<Action> best;
  for (Action a = 0; a < kNumMoves; ++a) {
    const Cell next = moved(state.prey, a);
    if (!inside(next, config.grid_n)) continue;
    if (a != kStay && std::find(state.predators.begin(), state.predators.end(), next) != state.predators.end()) {
      continue;
    }
    int total = 0;
    for (const Cell& p : state.predators) total += manhattan(next, p);
    if (total > best_total) {
      best_total = total;
      best.assign(1, a);
    } else if (total == best_total) {
      best.push_back(a);
    }
  }
  return best.size() == 1 ? best.front() : best[rng.below(best.size())];
}

bool catch_condition(const PPState& state, CatchRule rule) {
  const auto& preds = state.predators;
  if (rule == CatchRule::Surround4) {
    for (Action a : {kUp, kDown, kLeft, kRight}) {
      if (std::find(preds.begin(), preds.end(), moved(state.prey, a)) == preds.end()) return false;
    }
    return true;
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] != state.prey) continue;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      if (j != i && manhattan(preds[j], state.prey) == 1) return true;
    }
  }
  return false;
}

StepResult pp_step(PPState& state, const PredatorPreyConfig& config,
                   std::span<const Action> predator_actions, Action prey_action, Rng& rng) {
  if (state.terminal || state.step_count >= config.max_steps) {
    throw ContractViolation("step on a finished predator-prey episode");
  }
  if (predator_actions.size() != state.predators.size()) {
    throw ContractViolation("one action per predator required");
  }
  const std::size_t n = state.predators.size();
  std::vector<std::size_t> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  const bool predators_may_enter_prey = config.catch_rule == CatchRule::OnPlusAdjacent;
  for (std::size_t entity : order) {
    const bool is_prey = entity == n;
    Cell& pos = is_prey ? state.prey : state.predators[entity];
    const Cell target = moved(pos, is_prey ? prey_action : predator_actions[entity]);
    if (target == pos || !inside(target, config.grid_n)) continue;
    bool blocked = false;
    for (std::size_t j = 0; j < n && !blocked; ++j) {
      blocked = j != entity && state.predators[j] == target;
    }
    if (!is_prey && !predators_may_enter_prey && state.prey == target) blocked = true;
    if (!blocked) pos = target;
  }

  ++state.step_count;
  StepResult result;
  result.caught = catch_condition(state, config.catch_rule);
  result.reward = result.caught ? 1.0 : 0.0;
  result.terminal = result.caught || state.step_count >= config.max_steps;
  state.terminal = result.terminal;
  result.observations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.observations.push_back(pp_observe(state, static_cast<int>(i), config.grid_n));
  }
  return result;
}

PredatorPreyEnv::PredatorPreyEnv(const PredatorPreyConfig& config, Rng env_rng, Rng prey_rng)
    : config_(config), env_rng_(env_rng), prey_rng_(prey_rng) {
  validate(config_);
}

std::vector<Observation> PredatorPreyEnv::reset() {
  state_ = pp_reset(config_, env_rng_);
  std::vector<Observation> obs;
  for (int i = 0; i < config_.n_predators; ++i) obs.push_back(pp_observe(state_, i, config_.grid_n));
  return obs;
}

StepResult PredatorPreyEnv::step(std::span<const Action> actions) {
  const Action prey_action = prey_policy(state_, config_, prey_rng_);
  return pp_step(state_, config_, actions, prey_action, env_rng_);
}

}  // namespace psaf
