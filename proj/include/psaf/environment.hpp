#pragma once

#include <span>
#include <vector>

#include "psaf/observation.hpp"

namespace psaf {

// Five moves shared by both grid tasks; y grows upwards.
enum Move : Action { kStay = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4 };
inline constexpr int kNumMoves = 5;

struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

Cell moved(Cell c, Action a);
bool inside(Cell c, int grid_n);
int manhattan(Cell a, Cell b);

struct StepResult {
  std::vector<Observation> observations;
  double reward = 0.0;  // common to every agent
  bool terminal = false;
  bool caught = false;  // predator-prey: catch condition held
  int covered = 0;      // spread: landmarks with an agent on them
};

/// Uniform contract the harness drives: reset, joint step, observations.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int num_agents() const = 0;
  virtual int num_actions() const = 0;
  virtual std::size_t observation_size() const = 0;
  virtual int grid_size() const = 0;
  virtual int max_steps() const = 0;

  virtual std::vector<Observation> reset() = 0;
  virtual StepResult step(std::span<const Action> actions) = 0;
};

}  // namespace psaf
