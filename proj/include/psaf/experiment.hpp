#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "psaf/advising.hpp"
#include "psaf/environment.hpp"
#include "psaf/learner.hpp"
#include "psaf/predator_prey.hpp"
#include "psaf/spread.hpp"
#include "psaf/statistics.hpp"

namespace psaf {

// TG of every training episode, averaged per window. A trailing partial
// window is dropped.
struct WindowAverage {
  int window = 100;

  bool operator==(const WindowAverage&) const = default;
};

enum class ArsNormalization {
  EpisodeLength,  // discounted reward sum over the realised episode length
  Horizon,        // discounted reward sum over max_steps
};

// Every `every` training episodes, n_eval_episodes greedy episodes with
// learning and sharing switched off.
struct PeriodicFrozenEval {
  int every = 100;
  int n_eval_episodes = 100;
  double discount = 0.9;
  ArsNormalization normalization = ArsNormalization::EpisodeLength;

  bool operator==(const PeriodicFrozenEval&) const = default;
};

using EvalSchedule = std::variant<WindowAverage, PeriodicFrozenEval>;
using EnvironmentConfig = std::variant<PredatorPreyConfig, SpreadConfig>;

struct TileCodingConfig {
  int num_tilings = 8;
  double tile_width = 0.5;
  std::size_t table_size = std::size_t{1} << 20;
  // Divide the learning rate by num_tilings so one update moves Q(s,a) by
  // roughly alpha times the TD error instead of num_tilings times that.
  bool scale_step_size = false;

  bool operator==(const TileCodingConfig&) const = default;
};

struct RepresentationConfig {
  Backend backend = Backend::TileLinear;
  TileCodingConfig tiles;
  double trace_prune_below = EligibilityTraces::kDefaultPruneBelow;

  bool operator==(const RepresentationConfig&) const = default;
};

struct BudgetLimits {
  std::optional<std::uint64_t> ask;  // empty = unlimited
  std::optional<std::uint64_t> give;

  bool operator==(const BudgetLimits&) const = default;
};

struct QTraceConfig {
  int agent = 0;
  std::vector<StateKey> states;

  bool operator==(const QTraceConfig&) const = default;
};

struct ExperimentConfig {
  EnvironmentConfig environment = PredatorPreyConfig{};
  LearnerConfig learner;
  RepresentationConfig representation;
  AdvisingConfig advising;
  BudgetLimits budget;
  int n_train_episodes = 10000;
  EvalSchedule schedule = WindowAverage{};
  int n_runs = 1;
  std::uint64_t base_seed = 0;
  QTraceConfig qtrace;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError for the first invalid field.
void validate(const ExperimentConfig& config);

enum class QTraceEvent { Visit, AdviceReceived, QValueReceived };
std::string_view to_string(QTraceEvent e);

struct QTraceEntry {
  int episode = 0;
  int step = 0;
  StateKey state_key;
  QTraceEvent event = QTraceEvent::Visit;
  std::vector<double> q_row;

  bool operator==(const QTraceEntry&) const = default;
};

/// Q rows of one agent at a fixed set of states, logged on visits and
/// whenever advice or shared Q-values arrive there.
class QTraceRecorder {
 public:
  QTraceRecorder(int agent, const std::vector<StateKey>& states);

  int agent() const { return agent_; }
  bool watches(const StateKey& key) const { return states_.contains(key); }
  void record(int episode, int step, const StateKey& key, QTraceEvent event, std::vector<double> row);
  // Entries ordered by (episode, step), guidance before the visit update.
  std::vector<QTraceEntry> take();

 private:
  int agent_;
  std::set<StateKey> states_;
  std::vector<QTraceEntry> entries_;
};

struct BudgetPoint {
  int episode = 0;
  int agent = 0;
  BudgetUsage usage;

  bool operator==(const BudgetPoint&) const = default;
};

struct RunResult {
  int run_id = 0;
  std::uint64_t seed = 0;
  std::map<Metric, MetricSeries> series;
  std::vector<BudgetPoint> budget;
  std::vector<ShareEvent> share_events;
  std::vector<QTraceEntry> q_traces;

  bool operator==(const RunResult&) const = default;
};

enum class Mode { Train, Eval };

struct EpisodeRecord {
  int steps = 0;
  double total_reward = 0.0;
  std::vector<double> rewards;
  bool success = false;
};

/// Everything an episode needs beyond the environment and the team.
/// Train mode uses advising_rng, events and (optionally) qtrace; Eval mode
/// uses eval_rngs for greedy tie-breaks, one per agent.
struct EpisodeContext {
  int episode = 0;
  Rng* advising_rng = nullptr;
  std::vector<ShareEvent>* events = nullptr;
  QTraceRecorder* qtrace = nullptr;
  std::span<Rng> eval_rngs;
};

EpisodeRecord run_episode(Environment& env, std::span<Agent> team, const AdvisingConfig& advising,
                          Mode mode, EpisodeContext& context);

// Discounted per-step reward of one episode.
double average_reward_per_step(std::span<const double> rewards, double discount,
                               ArsNormalization normalization, int max_steps);

std::unique_ptr<Environment> make_environment(const EnvironmentConfig& config, Rng env_rng, Rng prey_rng);
// Backend used when a configuration does not name one.
Backend default_backend(const EnvironmentConfig& env);

std::vector<Agent> make_team(const ExperimentConfig& config, const Environment& env, std::uint64_t seed);

// One run with seed base_seed + run_id.
RunResult run_experiment(const ExperimentConfig& config, int run_id);

// n_runs independent runs on up to `workers` threads, ordered by run id.
std::vector<RunResult> repeat_runs(const ExperimentConfig& config, int workers = 1);

double per_run_auc(const RunResult& run, Metric metric);
TTestReport t_test_auc(std::span<const RunResult> runs_a, std::span<const RunResult> runs_b, Metric metric);

// Pointwise mean over runs, summed in run order.
MetricSeries aggregate(std::span<const RunResult> runs, Metric metric);

}  // namespace psaf
