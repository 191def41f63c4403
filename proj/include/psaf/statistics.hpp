#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psaf/advising.hpp"

namespace psaf {

enum class Metric { TG, ARS, BudgetUsedGive, BudgetUsedAsk };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view text);

struct MetricPoint {
  int episode = 0;
  double value = 0.0;

  bool operator==(const MetricPoint&) const = default;
};

struct MetricSeries {
  Metric metric = Metric::TG;
  std::vector<MetricPoint> points;  // strictly increasing episodes

  bool operator==(const MetricSeries&) const = default;
};

// Trapezoidal area over the episode axis; a single point counts as value * 1.
// Throws ContractViolation on an empty series.
double auc(const MetricSeries& series);

struct TTestReport {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  bool significant_at_05 = false;
};

/// Two-sided Welch t-test (unequal variances, Welch-Satterthwaite df).
/// Identical means give t = 0, p = 1. Needs at least two samples per side.
TTestReport welch_t_test(std::span<const double> a, std::span<const double> b);

enum class CountAxis { NVisit, MVisit };
enum class ShareRole { Partaker, Sharer };

std::uint64_t event_count(const ShareEvent& e, CountAxis axis, ShareRole role);

/// Bin k counts events with count in [edges[k], edges[k+1]); the last bin is
/// open-ended. Edges must start at 0 and increase strictly, so every event
/// lands in exactly one bin.
std::vector<std::uint64_t> share_histogram(std::span<const ShareEvent> events, CountAxis axis,
                                           ShareRole role, std::span<const std::uint64_t> edges);

}  // namespace psaf
