#include "cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "psaf/config_io.hpp"
#include "psaf/csv_io.hpp"
#include "psaf/environment.hpp"
#include "psaf/errors.hpp"

namespace psaf::cli {
namespace {

nlohmann::json effective_document(const RunOptions& options) {
  nlohmann::json doc = load_json_file(options.config_path);
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  for (const auto& o : options.overrides) apply_override(doc, o);
  if (options.out) doc["output_dir"] = *options.out;
  if (options.seed) doc["base_seed"] = *options.seed;
  if (options.runs) doc["n_runs"] = *options.runs;
  if (options.workers) doc["workers"] = *options.workers;
  return doc;
}

void add_run_files(OutputBundle& bundle, const std::string& prefix, const std::vector<RunResult>& runs) {
  bundle.add(prefix + "metrics.csv", [&runs](std::ostream& o) { write_metrics_csv(o, runs); });
  bundle.add(prefix + "budget.csv", [&runs](std::ostream& o) { write_budget_csv(o, runs); });
  bundle.add(prefix + "share_events.csv", [&runs](std::ostream& o) { write_share_events_csv(o, runs); });
  bundle.add(prefix + "qtrace.csv", [&runs](std::ostream& o) { write_qtrace_csv(o, runs, kNumMoves); });
  bundle.add(prefix + "aggregate.csv", [&runs](std::ostream& o) { write_aggregate_csv(o, runs); });
}

// Maps the library's exception types onto exit codes.
template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const SchemaError& e) {
    log << "schema error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const RunFile file = parse_run_file(effective_document(options));
    const std::vector<RunResult> runs = repeat_runs(file.experiment, file.workers);
    OutputBundle bundle(file.output_dir);
    bundle.add("config.json", [&file](std::ostream& o) { o << to_json(file).dump(2) << '\n'; });
    add_run_files(bundle, "", runs);
    bundle.commit();
    log << "wrote " << runs.size() << " run(s) to " << file.output_dir << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const RunOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const ComparisonFile file = parse_comparison_file(effective_document(options));
    // Every variant starts from the same base seed, so run j of each variant
    // sees the same initial placements.
    std::vector<std::vector<RunResult>> results;
    for (const auto& v : file.variants) {
      results.push_back(repeat_runs(file.variant_config(v), file.workers));
      log << "variant " << v.name << ": " << results.back().size() << " run(s)\n";
    }
    std::vector<TTestRow> rows;
    for (Metric m : file.metrics) {
      for (std::size_t a = 0; a < file.variants.size(); ++a) {
        for (std::size_t b = a + 1; b < file.variants.size(); ++b) {
          rows.push_back({m, file.variants[a].name, file.variants[b].name, t_test_auc(results[a], results[b], m)});
        }
      }
    }
    OutputBundle bundle(file.output_dir);
    bundle.add("config.json", [&file](std::ostream& o) { o << to_json(file).dump(2) << '\n'; });
    for (std::size_t k = 0; k < file.variants.size(); ++k) {
      add_run_files(bundle, file.variants[k].name + "/", results[k]);
    }
    bundle.add("ttest.csv", [&rows](std::ostream& o) { write_ttest_csv(o, rows); });
    bundle.commit();
    log << "wrote " << rows.size() << " t-test row(s) to " << file.output_dir << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& log) {
  return guarded(log, [&]() -> int {
    std::ifstream in(options.events_path, std::ios::binary);
    if (!in) throw IoError("cannot read " + options.events_path);
    const std::vector<LoggedShareEvent> logged = read_share_events_csv(in);

    auto emit = [&](const std::function<void(std::ostream&)>& writer) {
      if (!options.out) {
        writer(out);
        return;
      }
      const std::filesystem::path path(*options.out);
      OutputBundle bundle(path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
      bundle.add(path.filename().string(), writer);
      bundle.commit();
    };

    if (options.mode == "budget-curve") {
      emit([&](std::ostream& o) { write_budget_curve_csv(o, logged); });
      return kOk;
    }
    if (options.mode != "histogram") throw ConfigError("--mode", "expected 'histogram' or 'budget-curve'");
    if (options.axis != "m_visit" && options.axis != "n_visit") {
      throw ConfigError("--axis", "expected 'm_visit' or 'n_visit'");
    }
    if (options.role != "partaker" && options.role != "sharer") {
      throw ConfigError("--role", "expected 'partaker' or 'sharer'");
    }
    if (options.edges.empty() || options.edges.front() != 0) throw ConfigError("--edges", "must start at 0");
    for (std::size_t k = 1; k < options.edges.size(); ++k) {
      if (options.edges[k] <= options.edges[k - 1]) throw ConfigError("--edges", "must increase strictly");
    }
    std::vector<ShareEvent> events;
    events.reserve(logged.size());
    for (const auto& l : logged) events.push_back(l.event);
    const auto counts = share_histogram(events, options.axis == "m_visit" ? CountAxis::MVisit : CountAxis::NVisit,
                                        options.role == "partaker" ? ShareRole::Partaker : ShareRole::Sharer,
                                        options.edges);
    emit([&](std::ostream& o) { write_histogram_csv(o, options.edges, counts); });
    return kOk;
  });
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Budget-constrained Q-value sharing experiments for cooperative multi-agent learners"};
  app.require_subcommand(1);

  auto add_run_flags = [](CLI::App* sub, RunOptions& o) {
    sub->add_option("--config", o.config_path, "JSON experiment file")->required();
    sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", o.seed, "Base seed; run k uses seed + k (overrides base_seed)");
    sub->add_option("--runs", o.runs, "Number of independent runs (overrides n_runs)");
    sub->add_option("--workers", o.workers, "Parallel worker threads; results do not depend on it");
    sub->add_option("--override", o.overrides, "Set a config value, e.g. learner.alpha=0.05 (repeatable)");
  };

  RunOptions run_options;
  CLI::App* run = app.add_subcommand("run", "Run one experiment and write its CSV files");
  add_run_flags(run, run_options);

  RunOptions compare_options;
  CLI::App* compare = app.add_subcommand("compare", "Run several method variants with matched seeds and t-test them");
  add_run_flags(compare, compare_options);

  AnalyzeOptions analyze_options;
  CLI::App* analyze = app.add_subcommand("analyze", "Derive histograms or budget curves from share_events.csv");
  analyze->add_option("--events", analyze_options.events_path, "share_events.csv to read")->required();
  analyze->add_option("--mode", analyze_options.mode, "histogram or budget-curve")->capture_default_str();
  analyze->add_option("--axis", analyze_options.axis, "Histogram count: m_visit or n_visit")->capture_default_str();
  analyze->add_option("--role", analyze_options.role, "Histogram side: partaker or sharer")->capture_default_str();
  analyze->add_option("--edges", analyze_options.edges, "Histogram bin lower edges")->delimiter(',')->capture_default_str();
  analyze->add_option("--out", analyze_options.out, "Output CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (run->parsed()) return cmd_run(run_options, std::cerr);
  if (compare->parsed()) return cmd_compare(compare_options, std::cerr);
  return cmd_analyze(analyze_options, std::cout, std::cerr);
}

}  // namespace psaf::cli
