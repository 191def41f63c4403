#include "psaf/learner.hpp"

#include <algorithm>

#include "psaf/errors.hpp"

namespace psaf {

void validate(const LearnerConfig& c) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(c.alpha)) throw ConfigError("learner.alpha", "must be in [0, 1]");
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("learner.gamma", "must be in [0, 1)");
  if (!in_unit(c.lambda)) throw ConfigError("learner.lambda", "must be in [0, 1]");
  if (!in_unit(c.epsilon)) throw ConfigError("learner.epsilon", "must be in [0, 1]");
}

Action best_action(std::span<const double> row, Rng& rng) {
  if (row.empty()) throw ContractViolation("best_action on an empty row");
  const double top = *std::max_element(row.begin(), row.end());
  std::size_t ties = 0;
  for (double v : row) ties += (v == top);
  std::uint64_t pick = ties == 1 ? 0 : rng.below(ties);
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (row[a] == top && pick-- == 0) return static_cast<Action>(a);
  }
  return 0;  // unreachable
}

Action best_action(const QFunction& q, const Observation& s, Rng& rng) {
  thread_local std::vector<double> row;
  q.row(s, row);
  return best_action(row, rng);
}

Action epsilon_greedy(const QFunction& q, const Observation& s, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return static_cast<Action>(rng.below(static_cast<std::uint64_t>(q.num_actions())));
  return best_action(q, s, rng);
}

double td_error(const Experience& exp, Algorithm algorithm, std::optional<Action> next_action,
                const QFunction& q, double gamma) {
  if (algorithm == Algorithm::SarsaLambda && !next_action && !exp.terminal) {
    throw ContractViolation("SARSA TD error needs the next action");
  }
  const double current = q.value(exp.state, exp.action);
  if (exp.terminal) return exp.reward - current;
  double bootstrap;
  if (algorithm == Algorithm::SarsaLambda) {
    bootstrap = q.value(exp.next_state, *next_action);
  } else {
    auto row = q.row(exp.next_state);
    bootstrap = *std::max_element(row.begin(), row.end());
  }
  return exp.reward + gamma * bootstrap - current;
}

Learner::Learner(const LearnerConfig& config, QFunction q, double trace_prune_below)
    : config_(config),
      q_(std::move(q)),
      traces_(trace_prune_below),
      counters_(q_.num_actions()) {}

double Learner::learn(const Experience& exp, std::optional<Action> next_action) {
  const double delta = td_error(exp, config_.algorithm, next_action, q_, config_.gamma);
  q_.active_features(exp.state, features_);
  traces_.decay_and_bump(features_, exp.action, config_.gamma * config_.lambda);
  apply_update(q_, traces_, config_.alpha, delta);
  return delta;
}

}  // namespace psaf
