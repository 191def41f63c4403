#pragma once

#include <optional>
#include <span>
#include <vector>

#include "psaf/eligibility_traces.hpp"
#include "psaf/observation.hpp"
#include "psaf/q_function.hpp"
#include "psaf/rng.hpp"
#include "psaf/visit_counters.hpp"

namespace psaf {

enum class Algorithm { QLambda, SarsaLambda };

struct LearnerConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double lambda = 0.9;
  double epsilon = 0.1;
  Algorithm algorithm = Algorithm::QLambda;

  bool operator==(const LearnerConfig&) const = default;
};

// Throws ConfigError naming the first out-of-range rate.
void validate(const LearnerConfig& config);

struct Experience {
  Observation state;
  Action action = 0;
  Observation next_state;
  double reward = 0.0;
  bool terminal = false;
};

// Uniformly random among the maximisers of `row`.
Action best_action(std::span<const double> row, Rng& rng);
Action best_action(const QFunction& q, const Observation& s, Rng& rng);

Action epsilon_greedy(const QFunction& q, const Observation& s, double epsilon, Rng& rng);

// Q-learning target when next_action is empty, SARSA target otherwise.
// Throws ContractViolation when SarsaLambda is given no next action.
double td_error(const Experience& exp, Algorithm algorithm, std::optional<Action> next_action,
                const QFunction& q, double gamma);

/// Per-agent TD(lambda) learner with accumulating traces.
class Learner {
 public:
  Learner(const LearnerConfig& config, QFunction q,
          double trace_prune_below = EligibilityTraces::kDefaultPruneBelow);

  const LearnerConfig& config() const { return config_; }
  QFunction& q() { return q_; }
  const QFunction& q() const { return q_; }
  const EligibilityTraces& traces() const { return traces_; }
  VisitCounters& counters() { return counters_; }
  const VisitCounters& counters() const { return counters_; }

  void begin_episode() { traces_.clear(); }

  void record_visit(const Observation& s, Action a) { counters_.record(state_key(s), a); }

  // TD error, trace decay and bump, then the traced update. Returns delta.
  double learn(const Experience& exp, std::optional<Action> next_action);

 private:
  LearnerConfig config_;
  QFunction q_;
  EligibilityTraces traces_;
  VisitCounters counters_;
  std::vector<std::size_t> features_;
};

}  // namespace psaf
