#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "psaf/experiment.hpp"
#include "psaf/statistics.hpp"

namespace psaf {

// Shortest text that reads back to the same double ("nan", "inf", "-inf"
// for non-finite values).
std::string format_double(double value);

void write_metrics_csv(std::ostream& out, std::span<const RunResult> runs);
void write_budget_csv(std::ostream& out, std::span<const RunResult> runs);
void write_share_events_csv(std::ostream& out, std::span<const RunResult> runs);
void write_qtrace_csv(std::ostream& out, std::span<const RunResult> runs, int num_actions);

// Pointwise mean over runs: episode, metric, mean, n_runs.
void write_aggregate_csv(std::ostream& out, std::span<const RunResult> runs);

struct TTestRow {
  Metric metric = Metric::TG;
  std::string method_a;
  std::string method_b;
  TTestReport report;
};
void write_ttest_csv(std::ostream& out, std::span<const TTestRow> rows);

struct LoggedShareEvent {
  int run_id = 0;
  ShareEvent event;

  bool operator==(const LoggedShareEvent&) const = default;
};

// Parses a share_events.csv; throws SchemaError naming the bad column. A
// zero-byte input holds no events.
std::vector<LoggedShareEvent> read_share_events_csv(std::istream& in);

// bin_lower, bin_upper, count; the open last bin has an empty upper bound.
void write_histogram_csv(std::ostream& out, std::span<const std::uint64_t> edges,
                         std::span<const std::uint64_t> counts);

// Cumulative ask and give usage reconstructed from share events, one row per
// (run, episode, agent) where usage changed. Same columns as budget.csv.
void write_budget_curve_csv(std::ostream& out, std::span<const LoggedShareEvent> events);

// Several files that appear together or not at all: each is written to a
// temporary sibling first and renamed into place once every write succeeded.
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path directory);

  void add(const std::string& filename, std::function<void(std::ostream&)> writer);
  void commit();  // throws IoError

 private:
  std::filesystem::path directory_;
  std::vector<std::pair<std::string, std::function<void(std::ostream&)>>> files_;
};

}  // namespace psaf
