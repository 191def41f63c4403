#include "psaf/csv_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "psaf/errors.hpp"

namespace psaf {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

void write_metrics_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "run_id,episode,metric,value\n";
  for (const auto& run : runs) {
    for (const auto& [metric, series] : run.series) {
      for (const auto& p : series.points) {
        out << run.run_id << ',' << p.episode << ',' << to_string(metric) << ',' << format_double(p.value) << '\n';
      }
    }
  }
}

void write_budget_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "run_id,episode,agent_id,ask_used,give_used\n";
  for (const auto& run : runs) {
    for (const auto& b : run.budget) {
      out << run.run_id << ',' << b.episode << ',' << b.agent << ',' << b.usage.ask_used << ',' << b.usage.give_used
          << '\n';
    }
  }
}

namespace {

constexpr std::array<std::string_view, 12> kShareColumns{
    "run_id", "episode", "step", "partaker_id", "sharer_id", "state_key",
    "action", "partaker_n", "sharer_n", "partaker_m", "sharer_m", "shared_q"};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return fields;
    start = comma + 1;
  }
}

template <class T>
T parse_integer(std::string_view text, std::string_view column, std::size_t row) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw SchemaError(std::string(column), "row " + std::to_string(row) + ": '" + std::string(text) +
                                               "' is not a valid integer");
  }
  return value;
}

}  // namespace

void write_share_events_csv(std::ostream& out, std::span<const RunResult> runs) {
  for (std::size_t i = 0; i < kShareColumns.size(); ++i) out << (i ? "," : "") << kShareColumns[i];
  out << '\n';
  for (const auto& run : runs) {
    for (const auto& e : run.share_events) {
      out << run.run_id << ',' << e.episode << ',' << e.step << ',' << e.partaker_id << ',' << e.sharer_id << ','
          << e.state_key.to_string() << ',' << e.action << ',' << e.partaker_n_visit << ',' << e.sharer_n_visit << ','
          << e.partaker_m_visit << ',' << e.sharer_m_visit << ',' << (e.shared_q ? format_double(*e.shared_q) : "")
          << '\n';
    }
  }
}

void write_qtrace_csv(std::ostream& out, std::span<const RunResult> runs, int num_actions) {
  out << "run_id,episode,step,state_key,event";
  for (int a = 0; a < num_actions; ++a) out << ",q_" << a;
  out << '\n';
  for (const auto& run : runs) {
    for (const auto& entry : run.q_traces) {
      if (static_cast<int>(entry.q_row.size()) != num_actions) {
        throw ContractViolation("q-trace row width does not match the action count");
      }
      out << run.run_id << ',' << entry.episode << ',' << entry.step << ',' << entry.state_key.to_string() << ','
          << to_string(entry.event);
      for (double q : entry.q_row) out << ',' << format_double(q);
      out << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "episode,metric,mean,n_runs\n";
  if (runs.empty()) return;
  for (const auto& [metric, series] : runs.front().series) {
    for (const auto& p : aggregate(runs, metric).points) {
      out << p.episode << ',' << to_string(metric) << ',' << format_double(p.value) << ',' << runs.size() << '\n';
    }
  }
}

void write_ttest_csv(std::ostream& out, std::span<const TTestRow> rows) {
  out << "metric,method_a,method_b,mean_auc_a,mean_auc_b,t,p,significant\n";
  for (const auto& r : rows) {
    out << to_string(r.metric) << ',' << r.method_a << ',' << r.method_b << ',' << format_double(r.report.mean_a)
        << ',' << format_double(r.report.mean_b) << ',' << format_double(r.report.t_statistic) << ','
        << format_double(r.report.p_value) << ',' << (r.report.significant_at_05 ? "true" : "false") << '\n';
  }
}

std::vector<LoggedShareEvent> read_share_events_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  for (std::size_t i = 0; i < kShareColumns.size(); ++i) {
    if (i >= header.size()) throw SchemaError(std::string(kShareColumns[i]), "missing from header");
    if (header[i] != kShareColumns[i]) {
      throw SchemaError(std::string(kShareColumns[i]), "expected at position " + std::to_string(i + 1) +
                                                           ", found '" + std::string(header[i]) + "'");
    }
  }
  if (header.size() > kShareColumns.size()) {
    throw SchemaError(std::string(header[kShareColumns.size()]), "unexpected extra column");
  }

  std::vector<LoggedShareEvent> events;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kShareColumns.size()) {
      const std::size_t col = std::min(f.size(), kShareColumns.size() - 1);
      throw SchemaError(std::string(kShareColumns[col]), "row " + std::to_string(row) + " has " +
                                                             std::to_string(f.size()) + " fields");
    }
    LoggedShareEvent logged;
    ShareEvent& e = logged.event;
    logged.run_id = parse_integer<int>(f[0], kShareColumns[0], row);
    e.episode = parse_integer<int>(f[1], kShareColumns[1], row);
    e.step = parse_integer<int>(f[2], kShareColumns[2], row);
    e.partaker_id = parse_integer<int>(f[3], kShareColumns[3], row);
    e.sharer_id = parse_integer<int>(f[4], kShareColumns[4], row);
    try {
      e.state_key = StateKey::parse(f[5]);
    } catch (const std::invalid_argument& err) {
      throw SchemaError(std::string(kShareColumns[5]), "row " + std::to_string(row) + ": " + err.what());
    }
    e.action = parse_integer<int>(f[6], kShareColumns[6], row);
    e.partaker_n_visit = parse_integer<std::uint64_t>(f[7], kShareColumns[7], row);
    e.sharer_n_visit = parse_integer<std::uint64_t>(f[8], kShareColumns[8], row);
    e.partaker_m_visit = parse_integer<std::uint64_t>(f[9], kShareColumns[9], row);
    e.sharer_m_visit = parse_integer<std::uint64_t>(f[10], kShareColumns[10], row);
    if (!f[11].empty()) {
      double q = 0.0;
      const auto [ptr, ec] = std::from_chars(f[11].data(), f[11].data() + f[11].size(), q);
      if (ec != std::errc{} || ptr != f[11].data() + f[11].size()) {
        throw SchemaError(std::string(kShareColumns[11]), "row " + std::to_string(row) + ": '" +
                                                               std::string(f[11]) + "' is not a number");
      }
      e.shared_q = q;
    }
    events.push_back(std::move(logged));
  }
  return events;
}

void write_histogram_csv(std::ostream& out, std::span<const std::uint64_t> edges,
                         std::span<const std::uint64_t> counts) {
  if (edges.size() != counts.size()) throw ContractViolation("one count per bin edge expected");
  out << "bin_lower,bin_upper,count\n";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    out << edges[k] << ',';
    if (k + 1 < edges.size()) out << edges[k + 1];
    out << ',' << counts[k] << '\n';
  }
}

void write_budget_curve_csv(std::ostream& out, std::span<const LoggedShareEvent> events) {
  // One ask per (partaker, step) with at least one response; one give per event.
  struct Delta {
    std::set<std::tuple<int, int, int>> asks;  // (episode, step, partaker)
    std::map<std::pair<int, int>, std::uint64_t> gives;  // (episode, sharer)
  };
  std::map<int, Delta> per_run;
  for (const auto& logged : events) {
    const ShareEvent& e = logged.event;
    Delta& d = per_run[logged.run_id];
    d.asks.emplace(e.episode, e.step, e.partaker_id);
    ++d.gives[{e.episode, e.sharer_id}];
  }
  out << "run_id,episode,agent_id,ask_used,give_used\n";
  for (const auto& [run_id, d] : per_run) {
    std::map<std::pair<int, int>, std::pair<std::uint64_t, std::uint64_t>> changes;  // (episode, agent)
    for (const auto& [episode, step, partaker] : d.asks) ++changes[{episode, partaker}].first;
    for (const auto& [key, n] : d.gives) changes[key].second += n;
    std::map<int, std::pair<std::uint64_t, std::uint64_t>> totals;
    for (const auto& [key, delta] : changes) {
      auto& total = totals[key.second];
      total.first += delta.first;
      total.second += delta.second;
      out << run_id << ',' << key.first << ',' << key.second << ',' << total.first << ',' << total.second << '\n';
    }
  }
}

OutputBundle::OutputBundle(std::filesystem::path directory) : directory_(std::move(directory)) {}

void OutputBundle::add(const std::string& filename, std::function<void(std::ostream&)> writer) {
  files_.emplace_back(filename, std::move(writer));
}

void OutputBundle::commit() {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create " + directory_.string() + ": " + ec.message());

  std::vector<fs::path> temporaries;
  auto discard = [&] {
    for (const auto& t : temporaries) fs::remove(t, ec);
  };
  for (const auto& [name, writer] : files_) {
    const fs::path tmp = directory_ / (name + ".tmp");
    temporaries.push_back(tmp);
    fs::create_directories(tmp.parent_path(), ec);
    if (ec) {
      discard();
      throw IoError("cannot create " + tmp.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      discard();
      throw IoError("cannot write " + tmp.string());
    }
    writer(out);
    out.close();
    if (!out) {
      discard();
      throw IoError("failed writing " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files_.size(); ++i) {
    fs::rename(temporaries[i], directory_ / files_[i].first, ec);
    if (ec) {
      discard();
      throw IoError("cannot rename into " + (directory_ / files_[i].first).string() + ": " + ec.message());
    }
  }
}

}  // namespace psaf
