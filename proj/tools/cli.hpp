#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace psaf::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kIoError = 3 };

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> workers;
  std::vector<std::string> overrides;
};

struct AnalyzeOptions {
  std::string events_path;
  std::string mode = "histogram";  // or "budget-curve"
  std::string axis = "m_visit";    // or "n_visit"
  std::string role = "partaker";   // or "sharer"
  std::vector<std::uint64_t> edges{0, 1, 2, 3, 4, 5, 6, 11, 21, 51, 101};
  std::optional<std::string> out;  // stdout when absent
};

int cmd_run(const RunOptions& options, std::ostream& log);
int cmd_compare(const RunOptions& options, std::ostream& log);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& log);

int main_entry(int argc, char** argv);

}  // namespace psaf::cli
