#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psaf/budget.hpp"
#include "psaf/learner.hpp"
#include "psaf/observation.hpp"
#include "psaf/rng.hpp"

namespace psaf {

enum class Framework { MultiIQL, AdhocTD, AdhocTDQ, PSAF };
enum class GammaPolicy { RandomSelect, MaxConfidence };

struct AdvisingConfig {
  Framework framework = Framework::MultiIQL;
  double v_a = 0.2;
  double v_b = 1.0;
  GammaPolicy gamma_policy = GammaPolicy::RandomSelect;

  bool operator==(const AdvisingConfig&) const = default;
};

void validate(const AdvisingConfig& config);

std::string_view to_string(Framework f);
std::optional<Framework> parse_framework(std::string_view text);

// (1 + v_a)^(-sqrt(n))
double asking_probability(std::uint64_t n_visit, double v_a);
// 1 - (1 + v_b)^(-sqrt(n) * range)
double giving_probability(std::uint64_t n_visit, double q_range, double v_b);
// max - min of a Q row.
double q_range(std::span<const double> row);
// d / (d + 1) with d the Q range; always in [0, 1).
double xi(std::span<const double> row);

// Partaker confidence: how often the pair has been executed.
std::uint64_t phi(const VisitCounters& counters, const StateKey& s, Action a);
// Sharer confidence: m_visit scaled by xi of the sharer's own row at s.
double psi(const VisitCounters& counters, const QFunction& q, const Observation& s, Action a);

/// One decentralised learner together with its sharing budget and its own
/// random stream (exploration, ask/give draws, tie-breaks).
struct Agent {
  Agent(int id, Learner learner, Budget budget, Rng rng)
      : id(id), learner(std::move(learner)), budget(budget), rng(rng) {}

  int id;
  Learner learner;
  Budget budget;
  Rng rng;
};

struct ShareRequest {
  int partaker_id = 0;
  Observation state;
  StateKey key;
  std::vector<std::uint64_t> confidence;  // Phi for every action
};

struct ShareResponse {
  int sharer_id = 0;
  Action action = 0;
  std::optional<double> q_value;     // absent for action advice
  std::optional<double> confidence;  // Psi; PSAF only
};

struct ShareEvent {
  int episode = 0;
  int step = 0;
  int partaker_id = 0;
  int sharer_id = 0;
  StateKey state_key;
  Action action = 0;
  std::uint64_t partaker_n_visit = 0;
  std::uint64_t sharer_n_visit = 0;
  std::uint64_t partaker_m_visit = 0;
  std::uint64_t sharer_m_visit = 0;
  std::optional<double> shared_q;

  bool operator==(const ShareEvent&) const = default;
};

ShareRequest make_request(const Agent& partaker, const Observation& s);

// Shares the best action and its Q-value when Psi > Phi at that action.
std::optional<ShareResponse> sharer_respond_psaf(Agent& sharer, const ShareRequest& request);

enum class AdviceKind { Action, QValue };

// AdhocTD (action) or AdhocTD-Q (action plus Q-value), gated by P_give.
std::optional<ShareResponse> sharer_respond_adhoc(Agent& sharer, const ShareRequest& request,
                                                  AdviceKind kind, double v_b);

// One response per advised action.
std::map<Action, ShareResponse> select_gamma(std::span<const ShareResponse> responses,
                                             GammaPolicy policy, Rng& rng);

enum class Guidance { None, AdviceReceived, QValueReceived };

struct PartakerOutcome {
  Action action = 0;
  Guidance guidance = Guidance::None;
};

struct StepStamp {
  int episode = 0;
  int step = 0;
};

/// Chooses agent `index`'s action at `s`, running one ask/share round when
/// the framework, budget and P_ask allow it. Appends one ShareEvent per
/// response received.
PartakerOutcome partaker_step(std::span<Agent> team, std::size_t index,
                              const AdvisingConfig& config, const Observation& s, Rng& advising_rng,
                              StepStamp stamp, std::vector<ShareEvent>& events);

struct BudgetUsage {
  std::uint64_t ask_used = 0;
  std::uint64_t give_used = 0;

  bool operator==(const BudgetUsage&) const = default;
};

std::vector<BudgetUsage> budget_snapshot(std::span<const Agent> team);

}  // namespace psaf
