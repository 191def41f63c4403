#include "psaf/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "psaf/errors.hpp"

namespace psaf {
namespace {

using nlohmann::json;

bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown.

class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  bool has(std::string_view key) const { return obj_.contains(std::string(key)); }

  double number(std::string_view key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    return v->get<double>();
  }

  long long integer(std::string_view key, long long fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v->get<long long>();
  }

  std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!is_nonnegative_integer(*v)) throw ConfigError(field(key), "expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }

  std::string text(std::string_view key, std::string fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  // Absent or null means unlimited.
  std::optional<std::uint64_t> limit(std::string_view key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    if (v->is_string() && v->get<std::string>() == "unlimited") return std::nullopt;
    if (!is_nonnegative_integer(*v)) throw ConfigError(field(key), "expected a nonnegative integer or null");
    return v->get<std::uint64_t>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Enum, std::size_t N>
Enum pick(const std::string& field, const std::string& value,
          const std::array<std::pair<std::string_view, Enum>, N>& options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (name == value) return e;
    names += (names.empty() ? "" : ", ") + std::string(name);
  }
  throw ConfigError(field, "'" + value + "' is not one of " + names);
}

template <class Enum, std::size_t N>
std::string_view name_of(Enum e, const std::array<std::pair<std::string_view, Enum>, N>& options) {
  for (const auto& [name, value] : options) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, CatchRule>, 2> kCatchRules{{
    {"surround4", CatchRule::Surround4}, {"on_plus_adjacent", CatchRule::OnPlusAdjacent}}};
constexpr std::array<std::pair<std::string_view, Algorithm>, 2> kAlgorithms{{
    {"q_lambda", Algorithm::QLambda}, {"sarsa_lambda", Algorithm::SarsaLambda}}};
constexpr std::array<std::pair<std::string_view, Backend>, 2> kBackends{{
    {"exact_tabular", Backend::ExactTabular}, {"tile_linear", Backend::TileLinear}}};
constexpr std::array<std::pair<std::string_view, Framework>, 4> kFrameworks{{
    {"multi_iql", Framework::MultiIQL}, {"adhoc_td", Framework::AdhocTD},
    {"adhoc_td_q", Framework::AdhocTDQ}, {"psaf", Framework::PSAF}}};
constexpr std::array<std::pair<std::string_view, GammaPolicy>, 2> kGammaPolicies{{
    {"random", GammaPolicy::RandomSelect}, {"max_confidence", GammaPolicy::MaxConfidence}}};
constexpr std::array<std::pair<std::string_view, ArsNormalization>, 2> kNormalizations{{
    {"episode_length", ArsNormalization::EpisodeLength}, {"horizon", ArsNormalization::Horizon}}};

int to_int(long long v, const std::string& field) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "out of range");
  }
  return static_cast<int>(v);
}

EnvironmentConfig parse_environment(const json& doc) {
  ObjectReader r(doc, "environment");
  const std::string type = r.text("type", "");
  if (type == "predator_prey") {
    PredatorPreyConfig c;
    c.grid_n = to_int(r.integer("grid_n", c.grid_n), r.field("grid_n"));
    c.n_predators = to_int(r.integer("n_predators", c.n_predators), r.field("n_predators"));
    c.prey_random_prob = r.number("prey_random_prob", c.prey_random_prob);
    c.max_steps = to_int(r.integer("max_steps", c.max_steps), r.field("max_steps"));
    const CatchRule fallback = c.n_predators == 2 ? CatchRule::OnPlusAdjacent : CatchRule::Surround4;
    c.catch_rule = pick(r.field("catch_rule"), r.text("catch_rule", std::string(name_of(fallback, kCatchRules))),
                        kCatchRules);
    r.finish();
    return c;
  }
  if (type == "spread") {
    SpreadConfig c;
    c.grid_n = to_int(r.integer("grid_n", c.grid_n), r.field("grid_n"));
    c.n_agents = to_int(r.integer("n_agents", c.n_agents), r.field("n_agents"));
    c.max_steps = to_int(r.integer("max_steps", c.max_steps), r.field("max_steps"));
    if (const json* l = r.find("landmarks")) {
      if (!l->is_array()) throw ConfigError(r.field("landmarks"), "expected a list of [x, y] pairs");
      c.landmarks.clear();
      for (const auto& cell : *l) {
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() || !cell[1].is_number_integer()) {
          throw ConfigError(r.field("landmarks"), "expected a list of [x, y] pairs");
        }
        c.landmarks.push_back({cell[0].get<int>(), cell[1].get<int>()});
      }
    }
    r.finish();
    return c;
  }
  throw ConfigError("environment.type", "expected 'predator_prey' or 'spread'");
}

json environment_json(const EnvironmentConfig& env) {
  if (const auto* pp = std::get_if<PredatorPreyConfig>(&env)) {
    return {{"type", "predator_prey"},
            {"grid_n", pp->grid_n},
            {"n_predators", pp->n_predators},
            {"prey_random_prob", pp->prey_random_prob},
            {"max_steps", pp->max_steps},
            {"catch_rule", name_of(pp->catch_rule, kCatchRules)}};
  }
  const auto& sp = std::get<SpreadConfig>(env);
  json landmarks = json::array();
  for (const Cell& c : sp.landmarks) landmarks.push_back({c.x, c.y});
  return {{"type", "spread"},
          {"grid_n", sp.grid_n},
          {"n_agents", sp.n_agents},
          {"landmarks", landmarks},
          {"max_steps", sp.max_steps}};
}

LearnerConfig parse_learner(const json& doc, const EnvironmentConfig& env) {
  ObjectReader r(doc, "learner");
  LearnerConfig c;
  // Predator-prey learns with Q(lambda), spread with SARSA(lambda).
  const Algorithm fallback =
      std::holds_alternative<SpreadConfig>(env) ? Algorithm::SarsaLambda : Algorithm::QLambda;
  c.algorithm = pick(r.field("algorithm"), r.text("algorithm", std::string(name_of(fallback, kAlgorithms))), kAlgorithms);
  c.alpha = r.number("alpha", c.alpha);
  c.gamma = r.number("gamma", c.gamma);
  c.lambda = r.number("lambda", c.lambda);
  c.epsilon = r.number("epsilon", c.epsilon);
  r.finish();
  return c;
}

json learner_json(const LearnerConfig& c) {
  return {{"algorithm", name_of(c.algorithm, kAlgorithms)},
          {"alpha", c.alpha},
          {"gamma", c.gamma},
          {"lambda", c.lambda},
          {"epsilon", c.epsilon}};
}

RepresentationConfig parse_representation(const json& doc, const EnvironmentConfig& env) {
  ObjectReader r(doc, "representation");
  RepresentationConfig c;
  const Backend fallback = default_backend(env);
  c.backend = pick(r.field("backend"), r.text("backend", std::string(name_of(fallback, kBackends))), kBackends);
  c.tiles.num_tilings = to_int(r.integer("num_tilings", c.tiles.num_tilings), r.field("num_tilings"));
  c.tiles.tile_width = r.number("tile_width", c.tiles.tile_width);
  c.tiles.table_size = r.unsigned_integer("table_size", c.tiles.table_size);
  c.tiles.scale_step_size = [&] {
    const json* v = r.find("scale_step_size");
    if (!v) return c.tiles.scale_step_size;
    if (!v->is_boolean()) throw ConfigError(r.field("scale_step_size"), "expected true or false");
    return v->get<bool>();
  }();
  c.trace_prune_below = r.number("trace_prune_below", c.trace_prune_below);
  r.finish();
  return c;
}

json representation_json(const RepresentationConfig& c) {
  return {{"backend", name_of(c.backend, kBackends)},
          {"num_tilings", c.tiles.num_tilings},
          {"tile_width", c.tiles.tile_width},
          {"table_size", c.tiles.table_size},
          {"scale_step_size", c.tiles.scale_step_size},
          {"trace_prune_below", c.trace_prune_below}};
}

AdvisingConfig parse_advising(const json& doc, const std::string& path) {
  ObjectReader r(doc, path);
  AdvisingConfig c;
  c.framework = pick(r.field("framework"), r.text("framework", std::string(name_of(c.framework, kFrameworks))), kFrameworks);
  c.v_a = r.number("v_a", c.v_a);
  c.v_b = r.number("v_b", c.v_b);
  c.gamma_policy = pick(r.field("gamma_policy"),
                        r.text("gamma_policy", std::string(name_of(c.gamma_policy, kGammaPolicies))), kGammaPolicies);
  r.finish();
  if (!(c.v_a > 0.0)) throw ConfigError(r.field("v_a"), "must be positive");
  if (!(c.v_b > 0.0)) throw ConfigError(r.field("v_b"), "must be positive");
  return c;
}

json advising_json(const AdvisingConfig& c) {
  return {{"framework", name_of(c.framework, kFrameworks)},
          {"v_a", c.v_a},
          {"v_b", c.v_b},
          {"gamma_policy", name_of(c.gamma_policy, kGammaPolicies)}};
}

BudgetLimits parse_budget(const json& doc, const std::string& path) {
  ObjectReader r(doc, path);
  BudgetLimits b;
  b.ask = r.limit("ask");
  b.give = r.limit("give");
  r.finish();
  return b;
}

json budget_json(const BudgetLimits& b) {
  auto limit = [](const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); };
  return {{"ask", limit(b.ask)}, {"give", limit(b.give)}};
}

EvalSchedule parse_schedule(const json& doc, const EnvironmentConfig& env) {
  ObjectReader r(doc, "schedule");
  const std::string fallback =
      std::holds_alternative<SpreadConfig>(env) ? "periodic_frozen_eval" : "window_average";
  const std::string type = r.text("type", fallback);
  if (type == "window_average") {
    WindowAverage w;
    w.window = to_int(r.integer("window", w.window), r.field("window"));
    r.finish();
    return w;
  }
  if (type == "periodic_frozen_eval") {
    PeriodicFrozenEval p;
    p.every = to_int(r.integer("every", p.every), r.field("every"));
    p.n_eval_episodes = to_int(r.integer("n_eval_episodes", p.n_eval_episodes), r.field("n_eval_episodes"));
    p.discount = r.number("discount", p.discount);
    p.normalization = pick(r.field("normalization"),
                           r.text("normalization", std::string(name_of(p.normalization, kNormalizations))),
                           kNormalizations);
    r.finish();
    return p;
  }
  throw ConfigError("schedule.type", "expected 'window_average' or 'periodic_frozen_eval'");
}

json schedule_json(const EvalSchedule& s) {
  if (const auto* w = std::get_if<WindowAverage>(&s)) return {{"type", "window_average"}, {"window", w->window}};
  const auto& p = std::get<PeriodicFrozenEval>(s);
  return {{"type", "periodic_frozen_eval"},
          {"every", p.every},
          {"n_eval_episodes", p.n_eval_episodes},
          {"discount", p.discount},
          {"normalization", name_of(p.normalization, kNormalizations)}};
}

QTraceConfig parse_qtrace(const json& doc) {
  ObjectReader r(doc, "qtrace");
  QTraceConfig q;
  q.agent = to_int(r.integer("agent", q.agent), r.field("agent"));
  if (const json* states = r.find("states")) {
    if (!states->is_array()) throw ConfigError(r.field("states"), "expected a list of state keys");
    for (const auto& s : *states) {
      if (!s.is_string()) throw ConfigError(r.field("states"), "state keys are strings like \"0;2;0;1\"");
      try {
        q.states.push_back(StateKey::parse(s.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(r.field("states"), e.what());
      }
    }
  }
  r.finish();
  return q;
}

json qtrace_json(const QTraceConfig& q) {
  json states = json::array();
  for (const auto& s : q.states) states.push_back(s.to_string());
  return {{"agent", q.agent}, {"states", states}};
}

// Fills everything except advising and budget, which callers handle.
void parse_common(ObjectReader& r, ExperimentConfig& c) {
  const json* env = r.find("environment");
  if (!env) throw ConfigError("environment", "missing");
  c.environment = parse_environment(*env);
  static const json kEmpty = json::object();
  const json* learner = r.find("learner");
  c.learner = parse_learner(learner ? *learner : kEmpty, c.environment);
  const json* rep = r.find("representation");
  c.representation = parse_representation(rep ? *rep : kEmpty, c.environment);
  c.n_train_episodes = to_int(r.integer("n_train_episodes", c.n_train_episodes), "n_train_episodes");
  const json* schedule = r.find("schedule");
  c.schedule = parse_schedule(schedule ? *schedule : kEmpty, c.environment);
  c.n_runs = to_int(r.integer("n_runs", c.n_runs), "n_runs");
  c.base_seed = r.unsigned_integer("base_seed", c.base_seed);
  if (const json* q = r.find("qtrace")) c.qtrace = parse_qtrace(*q);
}

int parse_workers(ObjectReader& r) {
  const int workers = to_int(r.integer("workers", 1), "workers");
  if (workers < 1) throw ConfigError("workers", "must be at least 1");
  return workers;
}

}  // namespace

ExperimentConfig ComparisonFile::variant_config(const Variant& v) const {
  ExperimentConfig c = base;
  c.advising = v.advising;
  c.budget = v.budget;
  return c;
}

RunFile parse_run_file(const json& doc) {
  ObjectReader r(doc, "");
  RunFile f;
  parse_common(r, f.experiment);
  static const json kEmpty = json::object();
  const json* advising = r.find("advising");
  f.experiment.advising = parse_advising(advising ? *advising : kEmpty, "advising");
  const json* budget = r.find("budget");
  f.experiment.budget = parse_budget(budget ? *budget : kEmpty, "budget");
  f.output_dir = r.text("output_dir", f.output_dir);
  f.workers = parse_workers(r);
  r.finish();
  validate(f.experiment);
  return f;
}

ComparisonFile parse_comparison_file(const json& doc) {
  ObjectReader r(doc, "");
  ComparisonFile f;
  parse_common(r, f.base);
  const json* variants = r.find("variants");
  if (!variants || !variants->is_array()) throw ConfigError("variants", "expected a list of variants");
  std::set<std::string> names;
  for (std::size_t i = 0; i < variants->size(); ++i) {
    const std::string path = "variants[" + std::to_string(i) + "]";
    ObjectReader vr((*variants)[i], path);
    Variant v;
    v.name = vr.text("name", "");
    if (v.name.empty()) throw ConfigError(vr.field("name"), "missing");
    if (v.name.find_first_of("/\\,\"") != std::string::npos || v.name == "." || v.name == "..") {
      throw ConfigError(vr.field("name"), "must be usable as a directory name");
    }
    if (!names.insert(v.name).second) throw ConfigError(vr.field("name"), "duplicate variant name");
    static const json kEmpty = json::object();
    const json* advising = vr.find("advising");
    v.advising = parse_advising(advising ? *advising : kEmpty, vr.field("advising"));
    const json* budget = vr.find("budget");
    v.budget = parse_budget(budget ? *budget : kEmpty, vr.field("budget"));
    vr.finish();
    f.variants.push_back(std::move(v));
  }
  if (f.variants.size() < 2) throw ConfigError("variants", "at least two variants required");
  if (const json* metrics = r.find("metrics")) {
    if (!metrics->is_array()) throw ConfigError("metrics", "expected a list of metric names");
    for (const auto& m : *metrics) {
      auto parsed = m.is_string() ? parse_metric(m.get<std::string>()) : std::nullopt;
      if (!parsed) throw ConfigError("metrics", "unknown metric " + m.dump());
      f.metrics.push_back(*parsed);
    }
  } else {
    f.metrics.push_back(std::holds_alternative<SpreadConfig>(f.base.environment) ? Metric::ARS : Metric::TG);
  }
  if (f.metrics.empty()) throw ConfigError("metrics", "at least one metric required");
  f.output_dir = r.text("output_dir", f.output_dir);
  f.workers = parse_workers(r);
  r.finish();
  for (const auto& v : f.variants) validate(f.variant_config(v));
  return f;
}

json to_json(const ExperimentConfig& c) {
  return {{"environment", environment_json(c.environment)},
          {"learner", learner_json(c.learner)},
          {"representation", representation_json(c.representation)},
          {"advising", advising_json(c.advising)},
          {"budget", budget_json(c.budget)},
          {"n_train_episodes", c.n_train_episodes},
          {"schedule", schedule_json(c.schedule)},
          {"n_runs", c.n_runs},
          {"base_seed", c.base_seed},
          {"qtrace", qtrace_json(c.qtrace)}};
}

json to_json(const RunFile& f) {
  json doc = to_json(f.experiment);
  doc["output_dir"] = f.output_dir;
  doc["workers"] = f.workers;
  return doc;
}

json to_json(const ComparisonFile& f) {
  json doc = to_json(f.base);
  doc.erase("advising");
  doc.erase("budget");
  json variants = json::array();
  for (const auto& v : f.variants) {
    variants.push_back({{"name", v.name}, {"advising", advising_json(v.advising)}, {"budget", budget_json(v.budget)}});
  }
  doc["variants"] = variants;
  json metrics = json::array();
  for (Metric m : f.metrics) metrics.push_back(to_string(m));
  doc["metrics"] = metrics;
  doc["output_dir"] = f.output_dir;
  doc["workers"] = f.workers;
  return doc;
}

json parse_json_text(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(origin), e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("--override", "expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--override", "malformed key '" + key + "'");
    if (!node->is_object()) throw ConfigError(key, "cannot descend into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace psaf
