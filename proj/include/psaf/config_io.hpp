#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "psaf/experiment.hpp"

namespace psaf {

/// A `run` configuration file: an experiment plus where and how to run it.
struct RunFile {
  ExperimentConfig experiment;
  std::string output_dir = "out";
  int workers = 1;

  bool operator==(const RunFile&) const = default;
};

struct Variant {
  std::string name;
  AdvisingConfig advising;
  BudgetLimits budget;

  bool operator==(const Variant&) const = default;
};

/// A `compare` file: shared environment and learner settings, two or more
/// method variants, and the metrics to test pairwise.
struct ComparisonFile {
  ExperimentConfig base;  // advising and budget are taken from each variant
  std::vector<Variant> variants;
  std::vector<Metric> metrics;
  std::string output_dir = "out";
  int workers = 1;

  bool operator==(const ComparisonFile&) const = default;

  ExperimentConfig variant_config(const Variant& v) const;
};

// Parsing rejects unknown keys and throws ConfigError naming the field.
RunFile parse_run_file(const nlohmann::json& doc);
ComparisonFile parse_comparison_file(const nlohmann::json& doc);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const RunFile& file);
nlohmann::json to_json(const ComparisonFile& file);

// Reads and parses JSON text; syntax errors become ConfigError with the
// line and column of the problem.
nlohmann::json load_json_file(const std::string& path);
nlohmann::json parse_json_text(std::string_view text, std::string_view origin);

// Applies "dotted.path=value"; value is read as JSON, else as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace psaf
