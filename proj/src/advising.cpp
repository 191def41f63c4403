#include "psaf/advising.hpp"

#include <algorithm>
#include <cmath>

#include "psaf/errors.hpp"

namespace psaf {

void BudgetCounter::spend() {
  if (!available()) throw ContractViolation("budget exhausted");
  ++used_;
}

void validate(const AdvisingConfig& c) {
  if (!(c.v_a > 0.0)) throw ConfigError("advising.v_a", "must be positive");
  if (!(c.v_b > 0.0)) throw ConfigError("advising.v_b", "must be positive");
}

std::string_view to_string(Framework f) {
  switch (f) {
    case Framework::MultiIQL: return "multi_iql";
    case Framework::AdhocTD: return "adhoc_td";
    case Framework::AdhocTDQ: return "adhoc_td_q";
    case Framework::PSAF: return "psaf";
  }
  return "?";
}

std::optional<Framework> parse_framework(std::string_view text) {
  for (auto f : {Framework::MultiIQL, Framework::AdhocTD, Framework::AdhocTDQ, Framework::PSAF}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

double asking_probability(std::uint64_t n_visit, double v_a) {
  return std::pow(1.0 + v_a, -std::sqrt(static_cast<double>(n_visit)));
}

double giving_probability(std::uint64_t n_visit, double range, double v_b) {
  return 1.0 - std::pow(1.0 + v_b, -std::sqrt(static_cast<double>(n_visit)) * range);
}

double q_range(std::span<const double> row) {
  if (row.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(row.begin(), row.end());
  return *hi - *lo;
}

double xi(std::span<const double> row) {
  const double d = q_range(row);
  return d / (d + 1.0);
}

std::uint64_t phi(const VisitCounters& counters, const StateKey& s, Action a) {
  return counters.m_visit(s, a);
}

double psi(const VisitCounters& counters, const QFunction& q, const Observation& s, Action a) {
  auto row = q.row(s);
  return static_cast<double>(counters.m_visit(state_key(s), a)) * xi(row);
}

ShareRequest make_request(const Agent& partaker, const Observation& s) {
  ShareRequest request;
  request.partaker_id = partaker.id;
  request.state = s;
  request.key = state_key(s);
  request.confidence = partaker.learner.counters().m_visit_row(request.key);
  return request;
}

std::optional<ShareResponse> sharer_respond_psaf(Agent& sharer, const ShareRequest& request) {
  if (sharer.id == request.partaker_id) throw ContractViolation("agent cannot share with itself");
  if (!sharer.budget.give.available()) return std::nullopt;
  // Pure query of the sharer's function at the partaker's state.
  const auto row = sharer.learner.q().row(request.state);
  const Action best = best_action(row, sharer.rng);
  const double confidence =
      static_cast<double>(sharer.learner.counters().m_visit(request.key, best)) * xi(row);
  if (!(confidence > static_cast<double>(request.confidence[static_cast<std::size_t>(best)]))) {
    return std::nullopt;
  }
  sharer.budget.give.spend();
  return ShareResponse{sharer.id, best, row[static_cast<std::size_t>(best)], confidence};
}

std::optional<ShareResponse> sharer_respond_adhoc(Agent& sharer, const ShareRequest& request,
                                                  AdviceKind kind, double v_b) {
  if (sharer.id == request.partaker_id) throw ContractViolation("agent cannot advise itself");
  if (!sharer.budget.give.available()) return std::nullopt;
  const auto row = sharer.learner.q().row(request.state);
  const double p = giving_probability(sharer.learner.counters().n_visit(request.key), q_range(row), v_b);
  if (!(sharer.rng.uniform() < p)) return std::nullopt;
  sharer.budget.give.spend();
  const Action best = best_action(row, sharer.rng);
  ShareResponse response{sharer.id, best, std::nullopt, std::nullopt};
  if (kind == AdviceKind::QValue) response.q_value = row[static_cast<std::size_t>(best)];
  return response;
}

std::map<Action, ShareResponse> select_gamma(std::span<const ShareResponse> responses,
                                             GammaPolicy policy, Rng& rng) {
  if (responses.empty()) throw ContractViolation("select_gamma needs at least one response");
  std::map<Action, std::vector<const ShareResponse*>> groups;
  for (const auto& r : responses) groups[r.action].push_back(&r);

  std::map<Action, ShareResponse> selected;
  for (auto& [action, group] : groups) {
    std::vector<const ShareResponse*> candidates;
    if (policy == GammaPolicy::MaxConfidence) {
      double top = -1.0;
      for (const auto* r : group) top = std::max(top, r->confidence.value_or(0.0));
      for (const auto* r : group) {
        if (r->confidence.value_or(0.0) == top) candidates.push_back(r);
      }
    } else {
      candidates = group;
    }
    const auto* pick = candidates.size() == 1 ? candidates.front() : candidates[rng.below(candidates.size())];
    selected.emplace(action, *pick);
  }
  return selected;
}

PartakerOutcome partaker_step(std::span<Agent> team, std::size_t index,
                              const AdvisingConfig& config, const Observation& s, Rng& advising_rng,
                              StepStamp stamp, std::vector<ShareEvent>& events) {
  Agent& partaker = team[index];
  Learner& learner = partaker.learner;
  const double epsilon = learner.config().epsilon;

  if (config.framework == Framework::MultiIQL || !partaker.budget.ask.available()) {
    return {epsilon_greedy(learner.q(), s, epsilon, partaker.rng), Guidance::None};
  }

  const StateKey key = state_key(s);
  // n_visit is read before this step's visit is counted.
  const double p_ask = asking_probability(learner.counters().n_visit(key), config.v_a);
  if (!(partaker.rng.uniform() < p_ask)) {
    return {epsilon_greedy(learner.q(), s, epsilon, partaker.rng), Guidance::None};
  }

  const ShareRequest request = make_request(partaker, s);
  std::vector<ShareResponse> responses;
  for (std::size_t j = 0; j < team.size(); ++j) {
    if (j == index) continue;
    std::optional<ShareResponse> response;
    switch (config.framework) {
      case Framework::PSAF: response = sharer_respond_psaf(team[j], request); break;
      case Framework::AdhocTDQ: response = sharer_respond_adhoc(team[j], request, AdviceKind::QValue, config.v_b); break;
      case Framework::AdhocTD: response = sharer_respond_adhoc(team[j], request, AdviceKind::Action, config.v_b); break;
      case Framework::MultiIQL: break;
    }
    if (response) responses.push_back(*response);
  }

  if (responses.empty()) {
    return {epsilon_greedy(learner.q(), s, epsilon, partaker.rng), Guidance::None};
  }
  partaker.budget.ask.spend();

  for (const auto& r : responses) {
    const VisitCounters& mine = learner.counters();
    const VisitCounters& theirs = team[static_cast<std::size_t>(r.sharer_id)].learner.counters();
    events.push_back(ShareEvent{stamp.episode, stamp.step, partaker.id, r.sharer_id, key, r.action,
                                mine.n_visit(key), theirs.n_visit(key), mine.m_visit(key, r.action),
                                theirs.m_visit(key, r.action), r.q_value});
  }

  if (config.framework == Framework::AdhocTD) {
    const auto& advice = responses.size() == 1 ? responses.front() : responses[advising_rng.below(responses.size())];
    return {advice.action, Guidance::AdviceReceived};
  }

  for (const auto& [action, response] : select_gamma(responses, config.gamma_policy, advising_rng)) {
    learner.q().set(s, action, *response.q_value);
  }
  return {best_action(learner.q(), s, partaker.rng), Guidance::QValueReceived};
}

std::vector<BudgetUsage> budget_snapshot(std::span<const Agent> team) {
  std::vector<BudgetUsage> usage;
  usage.reserve(team.size());
  for (const auto& agent : team) usage.push_back({agent.budget.ask.used(), agent.budget.give.used()});
  return usage;
}

}  // namespace psaf
