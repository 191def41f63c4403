#include "psaf/spread.hpp"

#include <algorithm>

#include "psaf/errors.hpp"

namespace psaf {

void validate(const SpreadConfig& c) {
  if (c.grid_n <= 0) throw ConfigError("environment.grid_n", "must be positive");
  if (c.n_agents < 1) throw ConfigError("environment.n_agents", "must be at least 1");
  if (c.max_steps <= 0) throw ConfigError("environment.max_steps", "must be positive");
  if (c.landmarks.empty()) throw ConfigError("environment.landmarks", "at least one landmark required");
  for (std::size_t i = 0; i < c.landmarks.size(); ++i) {
    if (!inside(c.landmarks[i], c.grid_n)) throw ConfigError("environment.landmarks", "landmark outside the grid");
    for (std::size_t j = 0; j < i; ++j) {
      if (c.landmarks[i] == c.landmarks[j]) throw ConfigError("environment.landmarks", "landmarks must be distinct");
    }
  }
}

SpreadState spread_reset(const SpreadConfig& config, Rng& rng) {
  validate(config);
  const auto cells = static_cast<std::uint64_t>(config.grid_n) * static_cast<std::uint64_t>(config.grid_n);
  SpreadState state;
  for (int i = 0; i < config.n_agents; ++i) {
    const auto idx = static_cast<int>(rng.below(cells));
    state.agents.push_back({idx % config.grid_n, idx / config.grid_n});
  }
  return state;
}

Observation spread_observe(const SpreadState& state, const SpreadConfig& config, int agent) {
  const Cell self = state.agents[static_cast<std::size_t>(agent)];
  const double n = config.grid_n;
  Observation obs;
  obs.scale = config.grid_n;
  for (std::size_t j = 0; j < state.agents.size(); ++j) {
    if (static_cast<int>(j) == agent) continue;
    obs.values.push_back((state.agents[j].x - self.x) / n);
    obs.values.push_back((state.agents[j].y - self.y) / n);
  }
  for (const Cell& l : config.landmarks) {
    obs.values.push_back((l.x - self.x) / n);
    obs.values.push_back((l.y - self.y) / n);
  }
  return obs;
}

int covered_landmarks(const SpreadState& state, const SpreadConfig& config) {
  int covered = 0;
  for (const Cell& l : config.landmarks) {
    covered += std::find(state.agents.begin(), state.agents.end(), l) != state.agents.end();
  }
  return covered;
}

StepResult spread_step(SpreadState& state, const SpreadConfig& config, std::span<const Action> actions) {
  if (state.terminal || state.step_count >= config.max_steps) {
    throw ContractViolation("step on a finished spread episode");
  }
  if (actions.size() != state.agents.size()) throw ContractViolation("one action per agent required");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Cell target = moved(state.agents[i], actions[i]);
    if (inside(target, config.grid_n)) state.agents[i] = target;
  }
  ++state.step_count;

  StepResult result;
  result.covered = covered_landmarks(state, config);
  const int total = static_cast<int>(config.landmarks.size());
  result.reward = result.covered == total ? 1.0 : (result.covered == 0 ? -1.0 : 0.0);
  result.terminal = result.covered == total || state.step_count >= config.max_steps;
  state.terminal = result.terminal;
  for (int i = 0; i < config.n_agents; ++i) result.observations.push_back(spread_observe(state, config, i));
  return result;
}

SpreadEnv::SpreadEnv(const SpreadConfig& config, Rng rng) : config_(config), rng_(rng) {
  validate(config_);
}

std::vector<Observation> SpreadEnv::reset() {
  state_ = spread_reset(config_, rng_);
  std::vector<Observation> obs;
  for (int i = 0; i < config_.n_agents; ++i) obs.push_back(spread_observe(state_, config_, i));
  return obs;
}

StepResult SpreadEnv::step(std::span<const Action> actions) { return spread_step(state_, config_, actions); }

}  // namespace psaf
