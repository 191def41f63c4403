#include "psaf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <string>
#include <thread>

#include "psaf/errors.hpp"

namespace psaf {

void validate(const ExperimentConfig& c) {
  std::visit([](const auto& env) { validate(env); }, c.environment);
  validate(c.learner);
  validate(c.advising);
  if (c.n_train_episodes < 1) throw ConfigError("n_train_episodes", "must be at least 1");
  if (c.n_runs < 1) throw ConfigError("n_runs", "must be at least 1");
  if (const auto* w = std::get_if<WindowAverage>(&c.schedule)) {
    if (w->window < 1) throw ConfigError("schedule.window", "must be at least 1");
  } else {
    const auto& p = std::get<PeriodicFrozenEval>(c.schedule);
    if (p.every < 1) throw ConfigError("schedule.every", "must be at least 1");
    if (p.n_eval_episodes < 1) throw ConfigError("schedule.n_eval_episodes", "must be at least 1");
    if (!(p.discount >= 0.0 && p.discount < 1.0)) throw ConfigError("schedule.discount", "must be in [0, 1)");
  }
  const auto& t = c.representation.tiles;
  if (c.representation.backend == Backend::TileLinear) {
    if (t.num_tilings < 1) throw ConfigError("representation.num_tilings", "must be at least 1");
    if (!(t.tile_width > 0.0)) throw ConfigError("representation.tile_width", "must be positive");
    if (t.table_size < 1) throw ConfigError("representation.table_size", "must be at least 1");
  }
  if (!(c.representation.trace_prune_below >= 0.0)) {
    throw ConfigError("representation.trace_prune_below", "must be nonnegative");
  }
  const int n_agents = std::visit(
      [](const auto& env) {
        if constexpr (std::is_same_v<std::decay_t<decltype(env)>, PredatorPreyConfig>) {
          return env.n_predators;
        } else {
          return env.n_agents;
        }
      },
      c.environment);
  if (c.qtrace.agent < 0 || c.qtrace.agent >= n_agents) throw ConfigError("qtrace.agent", "no such agent");
  const std::size_t obs_size = std::visit(
      [](const auto& env) {
        if constexpr (std::is_same_v<std::decay_t<decltype(env)>, PredatorPreyConfig>) {
          return 2 * static_cast<std::size_t>(env.n_predators);
        } else {
          return 2 * static_cast<std::size_t>(env.n_agents - 1) + 2 * env.landmarks.size();
        }
      },
      c.environment);
  for (const auto& key : c.qtrace.states) {
    if (key.offsets.size() != obs_size) {
      throw ConfigError("qtrace.states", "state key '" + key.to_string() + "' needs " +
                                             std::to_string(obs_size) + " offsets");
    }
  }
}

std::string_view to_string(QTraceEvent e) {
  switch (e) {
    case QTraceEvent::Visit: return "visit";
    case QTraceEvent::AdviceReceived: return "advice_received";
    case QTraceEvent::QValueReceived: return "qvalue_received";
  }
  return "?";
}

QTraceRecorder::QTraceRecorder(int agent, const std::vector<StateKey>& states)
    : agent_(agent), states_(states.begin(), states.end()) {}

void QTraceRecorder::record(int episode, int step, const StateKey& key, QTraceEvent event,
                            std::vector<double> row) {
  entries_.push_back({episode, step, key, event, std::move(row)});
}

std::vector<QTraceEntry> QTraceRecorder::take() {
  // SARSA picks (and may integrate) the next action before the current
  // visit's update is logged, so restore timestamp order here.
  auto phase = [](const QTraceEntry& e) { return e.event == QTraceEvent::Visit ? 1 : 0; };
  std::stable_sort(entries_.begin(), entries_.end(), [&](const QTraceEntry& a, const QTraceEntry& b) {
    if (a.episode != b.episode) return a.episode < b.episode;
    if (a.step != b.step) return a.step < b.step;
    return phase(a) < phase(b);
  });
  return std::exchange(entries_, {});
}

double average_reward_per_step(std::span<const double> rewards, double discount,
                               ArsNormalization normalization, int max_steps) {
  if (rewards.empty()) return 0.0;
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= discount;
  }
  const double steps = normalization == ArsNormalization::EpisodeLength ? static_cast<double>(rewards.size())
                                                                         : static_cast<double>(max_steps);
  return total / steps;
}

namespace {

Action choose_training_action(std::span<Agent> team, std::size_t i, const AdvisingConfig& advising,
                              const Observation& s, int step, EpisodeContext& ctx) {
  const PartakerOutcome outcome =
      partaker_step(team, i, advising, s, *ctx.advising_rng, {ctx.episode, step}, *ctx.events);
  if (ctx.qtrace && outcome.guidance != Guidance::None && ctx.qtrace->agent() == static_cast<int>(i)) {
    StateKey key = state_key(s);
    if (ctx.qtrace->watches(key)) {
      const auto event = outcome.guidance == Guidance::AdviceReceived ? QTraceEvent::AdviceReceived
                                                                      : QTraceEvent::QValueReceived;
      ctx.qtrace->record(ctx.episode, step, key, event, team[i].learner.q().row(s));
    }
  }
  return outcome.action;
}

EpisodeRecord train_episode(Environment& env, std::span<Agent> team, const AdvisingConfig& advising,
                            EpisodeContext& ctx) {
  const std::size_t n = team.size();
  const bool sarsa = n > 0 && team.front().learner.config().algorithm == Algorithm::SarsaLambda;
  EpisodeRecord record;
  std::vector<Observation> obs = env.reset();
  for (auto& agent : team) agent.learner.begin_episode();

  std::vector<Action> actions(n, 0);
  std::vector<Action> next_actions(n, 0);
  if (sarsa) {
    for (std::size_t i = 0; i < n; ++i) actions[i] = choose_training_action(team, i, advising, obs[i], 1, ctx);
  }
  bool terminal = false;
  while (!terminal) {
    const int step = record.steps + 1;
    if (!sarsa) {
      for (std::size_t i = 0; i < n; ++i) actions[i] = choose_training_action(team, i, advising, obs[i], step, ctx);
    }
    StepResult result = env.step(actions);
    terminal = result.terminal;
    ++record.steps;
    record.rewards.push_back(result.reward);
    record.total_reward += result.reward;
    record.success = record.success || result.reward > 0.0;

    // Counters first, so any ask in the next selection sees this step's visits.
    for (std::size_t i = 0; i < n; ++i) team[i].learner.record_visit(obs[i], actions[i]);
    if (sarsa && !terminal) {
      for (std::size_t i = 0; i < n; ++i) {
        next_actions[i] = choose_training_action(team, i, advising, result.observations[i], step + 1, ctx);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      Experience exp{obs[i], actions[i], result.observations[i], result.reward, terminal};
      std::optional<Action> next;
      if (sarsa && !terminal) next = next_actions[i];
      team[i].learner.learn(exp, next);
    }
    if (ctx.qtrace) {
      const auto i = static_cast<std::size_t>(ctx.qtrace->agent());
      StateKey key = state_key(obs[i]);
      if (ctx.qtrace->watches(key)) {
        ctx.qtrace->record(ctx.episode, step, key, QTraceEvent::Visit, team[i].learner.q().row(obs[i]));
      }
    }
    obs = std::move(result.observations);
    if (sarsa) std::swap(actions, next_actions);
  }
  return record;
}

EpisodeRecord eval_episode(Environment& env, std::span<Agent> team, EpisodeContext& ctx) {
  const std::size_t n = team.size();
  if (ctx.eval_rngs.size() != n) throw ContractViolation("one evaluation stream per agent required");
  EpisodeRecord record;
  std::vector<Observation> obs = env.reset();
  std::vector<Action> actions(n, 0);
  bool terminal = false;
  while (!terminal) {
    for (std::size_t i = 0; i < n; ++i) actions[i] = best_action(team[i].learner.q(), obs[i], ctx.eval_rngs[i]);
    StepResult result = env.step(actions);
    terminal = result.terminal;
    ++record.steps;
    record.rewards.push_back(result.reward);
    record.total_reward += result.reward;
    record.success = record.success || result.reward > 0.0;
    obs = std::move(result.observations);
  }
  return record;
}

void snapshot_budget(std::span<const Agent> team, int episode, RunResult& result) {
  const auto usage = budget_snapshot(team);
  double ask = 0.0;
  double give = 0.0;
  for (std::size_t i = 0; i < usage.size(); ++i) {
    result.budget.push_back({episode, static_cast<int>(i), usage[i]});
    ask += static_cast<double>(usage[i].ask_used);
    give += static_cast<double>(usage[i].give_used);
  }
  const double n = static_cast<double>(usage.size());
  result.series[Metric::BudgetUsedAsk].points.push_back({episode, ask / n});
  result.series[Metric::BudgetUsedGive].points.push_back({episode, give / n});
}

}  // namespace

EpisodeRecord run_episode(Environment& env, std::span<Agent> team, const AdvisingConfig& advising,
                          Mode mode, EpisodeContext& context) {
  if (mode == Mode::Eval) return eval_episode(env, team, context);
  if (!context.advising_rng || !context.events) {
    throw ContractViolation("training episodes need an advising stream and an event log");
  }
  return train_episode(env, team, advising, context);
}

std::unique_ptr<Environment> make_environment(const EnvironmentConfig& config, Rng env_rng, Rng prey_rng) {
  if (const auto* pp = std::get_if<PredatorPreyConfig>(&config)) {
    return std::make_unique<PredatorPreyEnv>(*pp, env_rng, prey_rng);
  }
  return std::make_unique<SpreadEnv>(std::get<SpreadConfig>(config), env_rng);
}

Backend default_backend(const EnvironmentConfig& env) {
  return std::holds_alternative<SpreadConfig>(env) ? Backend::ExactTabular : Backend::TileLinear;
}

std::vector<Agent> make_team(const ExperimentConfig& config, const Environment& env, std::uint64_t seed) {
  std::vector<Agent> team;
  team.reserve(static_cast<std::size_t>(env.num_agents()));
  for (int i = 0; i < env.num_agents(); ++i) {
    QFunction q = QFunction::exact_tabular(env.num_actions());
    LearnerConfig learner = config.learner;
    if (config.representation.backend == Backend::TileLinear) {
      const auto& t = config.representation.tiles;
      q = QFunction::tile_linear(TileCoder(env.observation_size(), t.num_tilings, t.tile_width, t.table_size),
                                 env.num_actions());
      if (t.scale_step_size) learner.alpha /= t.num_tilings;
    }
    Budget budget{BudgetCounter::from_limit(config.budget.ask), BudgetCounter::from_limit(config.budget.give)};
    team.emplace_back(i, Learner(learner, std::move(q), config.representation.trace_prune_below), budget,
                      Rng::stream(seed, "agent/" + std::to_string(i)));
  }
  return team;
}

RunResult run_experiment(const ExperimentConfig& config, int run_id) {
  validate(config);
  RunResult result;
  result.run_id = run_id;
  result.seed = config.base_seed + static_cast<std::uint64_t>(run_id);
  const std::uint64_t seed = result.seed;

  auto env = make_environment(config.environment, Rng::stream(seed, "env"), Rng::stream(seed, "prey"));
  auto eval_env = make_environment(config.environment, Rng::stream(seed, "eval/env"), Rng::stream(seed, "eval/prey"));
  std::vector<Agent> team = make_team(config, *env, seed);
  Rng advising_rng = Rng::stream(seed, "advising");
  std::vector<Rng> eval_rngs;
  for (std::size_t i = 0; i < team.size(); ++i) eval_rngs.push_back(Rng::stream(seed, "eval/agent/" + std::to_string(i)));

  std::optional<QTraceRecorder> qtrace;
  if (!config.qtrace.states.empty()) qtrace.emplace(config.qtrace.agent, config.qtrace.states);

  EpisodeContext train_ctx;
  train_ctx.advising_rng = &advising_rng;
  train_ctx.events = &result.share_events;
  train_ctx.qtrace = qtrace ? &*qtrace : nullptr;
  EpisodeContext eval_ctx;
  eval_ctx.eval_rngs = eval_rngs;

  double window_steps = 0.0;
  for (int episode = 1; episode <= config.n_train_episodes; ++episode) {
    train_ctx.episode = episode;
    const EpisodeRecord record = run_episode(*env, team, config.advising, Mode::Train, train_ctx);

    if (const auto* w = std::get_if<WindowAverage>(&config.schedule)) {
      window_steps += record.steps;
      if (episode % w->window == 0) {
        result.series[Metric::TG].points.push_back({episode, window_steps / w->window});
        window_steps = 0.0;
        snapshot_budget(team, episode, result);
      }
      continue;
    }
    const auto& p = std::get<PeriodicFrozenEval>(config.schedule);
    if (episode % p.every != 0) continue;
    double ars = 0.0;
    double steps = 0.0;
    for (int k = 0; k < p.n_eval_episodes; ++k) {
      eval_ctx.episode = episode;
      const EpisodeRecord eval = run_episode(*eval_env, team, config.advising, Mode::Eval, eval_ctx);
      ars += average_reward_per_step(eval.rewards, p.discount, p.normalization, eval_env->max_steps());
      steps += eval.steps;
    }
    result.series[Metric::ARS].points.push_back({episode, ars / p.n_eval_episodes});
    result.series[Metric::TG].points.push_back({episode, steps / p.n_eval_episodes});
    snapshot_budget(team, episode, result);
  }
  for (auto& [metric, series] : result.series) series.metric = metric;
  if (qtrace) result.q_traces = qtrace->take();
  return result;
}

std::vector<RunResult> repeat_runs(const ExperimentConfig& config, int workers) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.n_runs);
  std::vector<RunResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        results[k] = run_experiment(config, static_cast<int>(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, static_cast<int>(n)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

double per_run_auc(const RunResult& run, Metric metric) {
  auto it = run.series.find(metric);
  if (it == run.series.end()) {
    throw ContractViolation("run has no " + std::string(to_string(metric)) + " series");
  }
  return auc(it->second);
}

TTestReport t_test_auc(std::span<const RunResult> runs_a, std::span<const RunResult> runs_b, Metric metric) {
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& r : runs_a) a.push_back(per_run_auc(r, metric));
  for (const auto& r : runs_b) b.push_back(per_run_auc(r, metric));
  return welch_t_test(a, b);
}

MetricSeries aggregate(std::span<const RunResult> runs, Metric metric) {
  MetricSeries mean{metric, {}};
  if (runs.empty()) return mean;
  const auto& first = runs.front().series.at(metric).points;
  for (std::size_t p = 0; p < first.size(); ++p) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run.series.at(metric).points.at(p).value;
    mean.points.push_back({first[p].episode, sum / static_cast<double>(runs.size())});
  }
  return mean;
}

}  // namespace psaf
