#include "psaf/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "psaf/errors.hpp"

namespace psaf {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::TG: return "TG";
    case Metric::ARS: return "ARS";
    case Metric::BudgetUsedGive: return "BudgetUsedGive";
    case Metric::BudgetUsedAsk: return "BudgetUsedAsk";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) {
  for (auto m : {Metric::TG, Metric::ARS, Metric::BudgetUsedGive, Metric::BudgetUsedAsk}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

double auc(const MetricSeries& series) {
  const auto& p = series.points;
  if (p.empty()) throw ContractViolation("auc of an empty series");
  if (p.size() == 1) return p.front().value;
  double area = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    area += 0.5 * (p[i].value + p[i - 1].value) * static_cast<double>(p[i].episode - p[i - 1].episode);
  }
  return area;
}

namespace {

std::pair<double, double> mean_and_variance(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

}  // namespace

TTestReport welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ContractViolation("t-test needs at least two samples per side");
  TTestReport report;
  auto [mean_a, var_a] = mean_and_variance(a);
  auto [mean_b, var_b] = mean_and_variance(b);
  report.mean_a = mean_a;
  report.mean_b = mean_b;
  const double se_a = var_a / static_cast<double>(a.size());
  const double se_b = var_b / static_cast<double>(b.size());
  const double se = se_a + se_b;

  if (mean_a == mean_b) {
    report.t_statistic = 0.0;
    report.p_value = 1.0;
    report.degrees_of_freedom = se > 0.0 ? se * se / (se_a * se_a / (a.size() - 1.0) + se_b * se_b / (b.size() - 1.0))
                                         : static_cast<double>(a.size() + b.size() - 2);
  } else if (se == 0.0) {
    // Two constant samples with different values.
    report.t_statistic = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
    report.p_value = 0.0;
    report.degrees_of_freedom = static_cast<double>(a.size() + b.size() - 2);
  } else {
    report.t_statistic = (mean_a - mean_b) / std::sqrt(se);
    report.degrees_of_freedom =
        se * se / (se_a * se_a / (a.size() - 1.0) + se_b * se_b / (b.size() - 1.0));
    boost::math::students_t_distribution<double> dist(report.degrees_of_freedom);
    report.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(report.t_statistic)));
    report.p_value = std::min(1.0, report.p_value);
  }
  report.significant_at_05 = report.p_value < 0.05;
  return report;
}

std::uint64_t event_count(const ShareEvent& e, CountAxis axis, ShareRole role) {
  if (axis == CountAxis::NVisit) return role == ShareRole::Partaker ? e.partaker_n_visit : e.sharer_n_visit;
  return role == ShareRole::Partaker ? e.partaker_m_visit : e.sharer_m_visit;
}

std::vector<std::uint64_t> share_histogram(std::span<const ShareEvent> events, CountAxis axis,
                                           ShareRole role, std::span<const std::uint64_t> edges) {
  if (edges.empty() || edges.front() != 0) throw ContractViolation("histogram edges must start at 0");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) throw ContractViolation("histogram edges must increase strictly");
  }
  std::vector<std::uint64_t> counts(edges.size(), 0);
  for (const auto& e : events) {
    const std::uint64_t v = event_count(e, axis, role);
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
  }
  return counts;
}

}  // namespace psaf
