#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "psaf/csv_io.hpp"
#include "psaf/errors.hpp"
#include "psaf/experiment.hpp"

namespace psaf {
namespace {

MetricSeries series(std::vector<MetricPoint> points) { return MetricSeries{Metric::TG, std::move(points)}; }

TEST(Auc, ConstantSeriesIsARectangle) {
  EXPECT_DOUBLE_EQ(auc(series({{1, 3.0}, {2, 3.0}, {3, 3.0}, {4, 3.0}, {5, 3.0}})), 12.0);
}

TEST(Auc, SingleTrapezoid) { EXPECT_DOUBLE_EQ(auc(series({{0, 0.0}, {1, 1.0}})), 0.5); }

TEST(Auc, UnevenSpacingUsesEpisodeAxis) {
  // (100,2)-(200,4): 300; (200,4)-(400,0): 400.
  EXPECT_DOUBLE_EQ(auc(series({{100, 2.0}, {200, 4.0}, {400, 0.0}})), 700.0);
}

TEST(Auc, SinglePointCountsOnce) { EXPECT_DOUBLE_EQ(auc(series({{100, 7.5}})), 7.5); }

TEST(Auc, EmptySeriesIsAContractViolation) { EXPECT_THROW(auc(series({})), ContractViolation); }

TEST(Auc, ScalesLinearly) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<MetricPoint> p;
    for (int e = 1; e <= 20; ++e) p.push_back({e * 100, rng.uniform() * 1000.0});
    const double k = 0.5 + rng.uniform() * 4.0;
    auto scaled = p;
    for (auto& q : scaled) q.value *= k;
    EXPECT_NEAR(auc(series(scaled)), k * auc(series(p)), 1e-9 * k * auc(series(p)));
  }
}

// Oracle: scipy.stats.ttest_ind(a, b, equal_var=False).
TEST(WelchTTest, MatchesReferenceFixture) {
  const std::vector<double> a{12.5, 9.8, 11.1, 14.0, 10.2, 13.3};
  const std::vector<double> b{15.4, 17.9, 13.8, 19.2, 16.0, 21.5};
  const TTestReport r = welch_t_test(a, b);
  EXPECT_NEAR(r.t_statistic, -4.095069068955419, 1e-9);
  EXPECT_NEAR(r.p_value, 0.0032187494714647985, 1e-6);
  EXPECT_NEAR(r.degrees_of_freedom, 8.278097777953409, 1e-9);
  EXPECT_TRUE(r.significant_at_05);
  EXPECT_NEAR(r.mean_a, 70.9 / 6, 1e-12);
}

TEST(WelchTTest, IdenticalSamplesAreNotSignificant) {
  const std::vector<double> a{3.0, 4.5, 5.0, 2.5};
  const TTestReport r = welch_t_test(a, a);
  EXPECT_EQ(r.t_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.significant_at_05);
}

TEST(WelchTTest, SeparatedJitteredSamplesAreSignificant) {
  // Hand computation: both variances 1e-6 * 10/3, so the standard error is
  // sqrt(2 * 10/3e-6 / 4) = 1.2910e-3 and t = -1 / 1.2910e-3 = -774.6.
  const std::vector<double> a{1.001, 0.999, 1.002, 0.998};
  const std::vector<double> b{2.001, 1.999, 2.002, 1.998};
  const TTestReport r = welch_t_test(a, b);
  EXPECT_NEAR(r.t_statistic, -774.5966692415128, 1e-6);
  EXPECT_NEAR(r.degrees_of_freedom, 6.0, 1e-9);
  EXPECT_LT(r.p_value, 1e-12);
  EXPECT_TRUE(r.significant_at_05);
}

TEST(WelchTTest, SwappingSidesNegatesTAndKeepsP) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 5; ++i) a.push_back(rng.uniform());
    for (int i = 0; i < 7; ++i) b.push_back(rng.uniform() + 0.2);
    const auto ab = welch_t_test(a, b);
    const auto ba = welch_t_test(b, a);
    EXPECT_DOUBLE_EQ(ab.t_statistic, -ba.t_statistic);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    EXPECT_EQ(ab.significant_at_05, ab.p_value < 0.05);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(WelchTTest, NeedsTwoSamplesPerSide) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(welch_t_test(one, two), ContractViolation);
  EXPECT_THROW(welch_t_test(two, one), ContractViolation);
}

ShareEvent event_with(std::uint64_t partaker_m, std::uint64_t sharer_m) {
  ShareEvent e;
  e.partaker_m_visit = partaker_m;
  e.sharer_m_visit = sharer_m;
  e.partaker_n_visit = partaker_m + 1;
  e.sharer_n_visit = sharer_m + 2;
  return e;
}

TEST(ShareHistogram, NoEventsGiveZeros) {
  const std::vector<std::uint64_t> edges{0, 1, 5, 10};
  EXPECT_EQ(share_histogram({}, CountAxis::MVisit, ShareRole::Partaker, edges), std::vector<std::uint64_t>(4, 0));
}

TEST(ShareHistogram, BinsPartitionTheEvents) {
  Rng rng(3);
  std::vector<ShareEvent> events;
  for (int i = 0; i < 1000; ++i) events.push_back(event_with(rng.below(40), rng.below(400)));
  const std::vector<std::uint64_t> edges{0, 1, 2, 6, 11, 101};
  for (auto axis : {CountAxis::MVisit, CountAxis::NVisit}) {
    for (auto role : {ShareRole::Partaker, ShareRole::Sharer}) {
      const auto h = share_histogram(events, axis, role, edges);
      std::uint64_t total = 0;
      for (auto c : h) total += c;
      EXPECT_EQ(total, events.size());
    }
  }
}

TEST(ShareHistogram, BinBoundariesAreHalfOpen) {
  const std::vector<ShareEvent> events{event_with(0, 9), event_with(1, 9), event_with(5, 9), event_with(6, 9)};
  const std::vector<std::uint64_t> edges{0, 1, 6};
  EXPECT_EQ(share_histogram(events, CountAxis::MVisit, ShareRole::Partaker, edges),
            (std::vector<std::uint64_t>{1, 2, 1}));
}

TEST(ShareHistogram, EdgesMustStartAtZeroAndIncrease) {
  const std::vector<std::uint64_t> bad_start{1, 2};
  const std::vector<std::uint64_t> not_increasing{0, 3, 3};
  EXPECT_THROW(share_histogram({}, CountAxis::MVisit, ShareRole::Partaker, bad_start), ContractViolation);
  EXPECT_THROW(share_histogram({}, CountAxis::MVisit, ShareRole::Partaker, not_increasing), ContractViolation);
}

TEST(AverageRewardPerStep, DiscountsThenDivides) {
  const std::vector<double> rewards{-1.0, 0.0, 1.0};
  EXPECT_NEAR(average_reward_per_step(rewards, 0.9, ArsNormalization::EpisodeLength, 20), (-1.0 + 0.81) / 3, 1e-15);
  EXPECT_NEAR(average_reward_per_step(rewards, 0.9, ArsNormalization::Horizon, 20), (-1.0 + 0.81) / 20, 1e-15);
}

TEST(AverageRewardPerStep, StaysWithinUnitRange) {
  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> rewards(1 + rng.below(20));
    for (auto& r : rewards) r = static_cast<double>(rng.below(3)) - 1.0;
    const double ars = average_reward_per_step(rewards, 0.9, ArsNormalization::EpisodeLength, 20);
    EXPECT_GE(ars, -1.0);
    EXPECT_LE(ars, 1.0);
  }
}

ExperimentConfig small_pp(Framework framework, int episodes = 200) {
  ExperimentConfig c;
  PredatorPreyConfig pp;
  pp.n_predators = 2;
  pp.catch_rule = CatchRule::OnPlusAdjacent;
  c.environment = pp;
  c.representation.backend = Backend::ExactTabular;
  c.advising.framework = framework;
  c.n_train_episodes = episodes;
  c.schedule = WindowAverage{100};
  c.base_seed = 11;
  return c;
}

ExperimentConfig small_spread(Framework framework, int episodes = 300) {
  ExperimentConfig c;
  c.environment = SpreadConfig{};
  c.learner.algorithm = Algorithm::SarsaLambda;
  c.representation.backend = Backend::ExactTabular;
  c.advising = {framework, 1.0, 0.5, GammaPolicy::RandomSelect};
  c.n_train_episodes = episodes;
  c.schedule = PeriodicFrozenEval{100, 20, 0.9, ArsNormalization::EpisodeLength};
  c.base_seed = 3;
  return c;
}

TEST(RunEpisode, EvalModeSendsNothingAndLeavesQUntouched) {
  const ExperimentConfig c = small_spread(Framework::PSAF);
  auto env = make_environment(c.environment, Rng(1), Rng(2));
  auto team = make_team(c, *env, 5);
  Rng advising(9);
  std::vector<ShareEvent> events;
  EpisodeContext train{1, &advising, &events, nullptr, {}};
  for (int e = 0; e < 300; ++e) run_episode(*env, team, c.advising, Mode::Train, train);
  ASSERT_FALSE(events.empty());
  events.clear();

  std::vector<std::uint64_t> hashes;
  std::vector<std::size_t> states;
  for (const auto& a : team) {
    hashes.push_back(a.learner.q().content_hash());
    states.push_back(a.learner.counters().num_states());
  }
  const auto budget = budget_snapshot(team);
  std::vector<Rng> eval_rngs{Rng(1), Rng(2)};
  EpisodeContext eval{0, nullptr, &events, nullptr, eval_rngs};
  for (int e = 0; e < 50; ++e) run_episode(*env, team, c.advising, Mode::Eval, eval);
  EXPECT_TRUE(events.empty());
  EXPECT_EQ(budget_snapshot(team), budget);
  for (std::size_t i = 0; i < team.size(); ++i) {
    EXPECT_EQ(team[i].learner.q().content_hash(), hashes[i]);
    EXPECT_EQ(team[i].learner.counters().num_states(), states[i]);
  }
}

TEST(RunEpisode, IndependentLearnersSendNothing) {
  const RunResult r = run_experiment(small_pp(Framework::MultiIQL), 0);
  EXPECT_TRUE(r.share_events.empty());
  for (const auto& b : r.budget) EXPECT_EQ(b.usage, BudgetUsage{});
}

TEST(RunEpisode, TimedOutPredatorPreyEpisode) {
  ExperimentConfig c;
  PredatorPreyConfig pp;
  pp.grid_n = 40;  // four random walkers essentially never surround the prey here
  c.environment = pp;
  c.representation.backend = Backend::ExactTabular;
  auto env = make_environment(c.environment, Rng(1), Rng(2));
  auto team = make_team(c, *env, 7);
  std::vector<Rng> eval_rngs{Rng(1), Rng(2), Rng(3), Rng(4)};
  EpisodeContext eval{0, nullptr, nullptr, nullptr, eval_rngs};
  const EpisodeRecord rec = run_episode(*env, team, c.advising, Mode::Eval, eval);
  EXPECT_EQ(rec.steps, 2500);
  EXPECT_EQ(rec.total_reward, 0.0);
  EXPECT_FALSE(rec.success);
}

TEST(RunExperiment, WindowScheduleArithmetic) {
  const RunResult r = run_experiment(small_pp(Framework::PSAF, 250), 0);
  ASSERT_EQ(r.series.at(Metric::TG).points.size(), 2u);  // partial window dropped
  EXPECT_EQ(r.series.at(Metric::TG).points[0].episode, 100);
  EXPECT_EQ(r.series.at(Metric::TG).points[1].episode, 200);
  for (const auto& p : r.series.at(Metric::TG).points) {
    EXPECT_GE(p.value, 1.0);
    EXPECT_LE(p.value, 2500.0);
  }
  EXPECT_EQ(r.budget.size(), 2u * 2u);
}

TEST(RunExperiment, BudgetSeriesIsNondecreasing) {
  const RunResult r = run_experiment(small_pp(Framework::AdhocTDQ, 400), 1);
  std::map<int, BudgetUsage> last;
  for (const auto& b : r.budget) {
    EXPECT_GE(b.usage.ask_used, last[b.agent].ask_used);
    EXPECT_GE(b.usage.give_used, last[b.agent].give_used);
    last[b.agent] = b.usage;
  }
  for (Metric m : {Metric::BudgetUsedAsk, Metric::BudgetUsedGive}) {
    const auto& pts = r.series.at(m).points;
    for (std::size_t k = 1; k < pts.size(); ++k) EXPECT_GE(pts[k].value, pts[k - 1].value);
  }
}

TEST(RunExperiment, PsafSharersAreAlwaysMoreExperienced) {
  const RunResult r = run_experiment(small_pp(Framework::PSAF, 300), 2);
  ASSERT_FALSE(r.share_events.empty());
  for (const auto& e : r.share_events) {
    EXPECT_GT(e.sharer_m_visit, e.partaker_m_visit);
    EXPECT_NE(e.sharer_id, e.partaker_id);
    EXPECT_TRUE(e.shared_q);
  }
}

TEST(RunExperiment, FrozenEvalScheduleProducesArsAndTgPoints) {
  const RunResult r = run_experiment(small_spread(Framework::MultiIQL, 300), 0);
  const auto& ars = r.series.at(Metric::ARS).points;
  ASSERT_EQ(ars.size(), 3u);
  for (std::size_t k = 0; k < ars.size(); ++k) {
    EXPECT_EQ(ars[k].episode, static_cast<int>(100 * (k + 1)));
    EXPECT_GE(ars[k].value, -1.0);
    EXPECT_LE(ars[k].value, 1.0);
  }
  EXPECT_EQ(r.series.at(Metric::TG).points.size(), 3u);
}

TEST(RepeatRuns, DeterministicAndIndependentOfWorkerCount) {
  ExperimentConfig c = small_spread(Framework::PSAF, 200);
  c.n_runs = 4;
  const auto sequential = repeat_runs(c, 1);
  const auto again = repeat_runs(c, 1);
  const auto parallel = repeat_runs(c, 3);
  ASSERT_EQ(sequential.size(), 4u);
  EXPECT_EQ(sequential, again);
  EXPECT_EQ(sequential, parallel);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(sequential[static_cast<std::size_t>(k)].run_id, k);
    EXPECT_EQ(sequential[static_cast<std::size_t>(k)].seed, c.base_seed + static_cast<std::uint64_t>(k));
  }
  EXPECT_NE(sequential[0].series, sequential[1].series);
}

TEST(RepeatRuns, TwentyRunsGiveTwentyResults) {
  ExperimentConfig c = small_pp(Framework::MultiIQL, 100);
  c.n_runs = 20;
  EXPECT_EQ(repeat_runs(c, 2).size(), 20u);
}

TEST(Aggregate, RecomputableFromPersistedMetrics) {
  ExperimentConfig c = small_spread(Framework::AdhocTDQ, 200);
  c.n_runs = 3;
  const auto runs = repeat_runs(c, 1);
  std::stringstream csv;
  write_metrics_csv(csv, runs);

  std::map<std::pair<std::string, int>, std::vector<double>> by_point;
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string run, episode, metric, value;
    std::getline(row, run, ',');
    std::getline(row, episode, ',');
    std::getline(row, metric, ',');
    std::getline(row, value, ',');
    by_point[{metric, std::stoi(episode)}].push_back(std::strtod(value.c_str(), nullptr));
  }
  for (Metric m : {Metric::ARS, Metric::TG, Metric::BudgetUsedGive}) {
    for (const auto& p : aggregate(runs, m).points) {
      double sum = 0.0;
      for (double v : by_point.at({std::string(to_string(m)), p.episode})) sum += v;
      EXPECT_EQ(sum / 3.0, p.value);
    }
  }
}

TEST(QTrace, UntouchedStateGivesNoEntries) {
  ExperimentConfig c = small_spread(Framework::PSAF, 100);
  c.qtrace = {0, {StateKey{{99, 99, 99, 99, 99, 99}}}};
  EXPECT_TRUE(run_experiment(c, 0).q_traces.empty());
}

TEST(QTrace, IntegrationsShowTheSharedValueAndDoNotPerturbTheRun) {
  ExperimentConfig c = small_spread(Framework::PSAF, 200);
  const RunResult plain = run_experiment(c, 0);
  std::map<StateKey, int> frequency;
  for (const auto& e : plain.share_events) {
    if (e.partaker_id == 0) ++frequency[e.state_key];
  }
  ASSERT_FALSE(frequency.empty());
  const StateKey watched =
      std::max_element(frequency.begin(), frequency.end(), [](auto& a, auto& b) { return a.second < b.second; })
          ->first;
  c.qtrace = {0, {watched}};
  const RunResult traced = run_experiment(c, 0);
  EXPECT_EQ(traced.share_events, plain.share_events);
  EXPECT_EQ(traced.series, plain.series);

  std::map<std::pair<int, int>, const QTraceEntry*> received;
  for (const auto& q : traced.q_traces) {
    EXPECT_EQ(q.state_key, watched);
    EXPECT_EQ(q.q_row.size(), static_cast<std::size_t>(kNumMoves));
    if (q.event == QTraceEvent::QValueReceived) received[{q.episode, q.step}] = &q;
  }
  int matched = 0;
  for (const auto& e : traced.share_events) {
    if (e.partaker_id != 0 || e.state_key != watched) continue;
    const auto it = received.find({e.episode, e.step});
    ASSERT_NE(it, received.end());
    EXPECT_EQ(it->second->q_row[static_cast<std::size_t>(e.action)], *e.shared_q);
    ++matched;
  }
  EXPECT_EQ(matched, frequency[watched]);

  auto stamp = [](const QTraceEntry& q) {
    return std::tuple(q.episode, q.step, q.event == QTraceEvent::Visit ? 1 : 0);
  };
  for (std::size_t k = 1; k < traced.q_traces.size(); ++k) {
    EXPECT_LT(stamp(traced.q_traces[k - 1]), stamp(traced.q_traces[k]));
  }
}

}  // namespace
}  // namespace psaf
