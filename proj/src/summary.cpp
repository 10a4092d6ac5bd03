#include "pbsched/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "pbsched/errors.hpp"

namespace pbsched {

double max_deviation_from_mean(const VectorXd& currents) {
  return (currents.array() - currents.mean()).abs().maxCoeff();
}

SummaryReport summarize(std::span<const TelemetryRecord> records, const SummaryOptions& options) {
  if (records.empty()) throw DomainError("summarize: no telemetry records");
  const double step = records.size() > 1 ? records[1].time - records[0].time : 0.0;

  SummaryReport report;
  std::size_t first = 0;
  while (first < records.size()) {
    std::size_t last = first;
    while (last + 1 < records.size() && records[last + 1].load_true == records[first].load_true) ++last;

    SegmentSummary seg;
    seg.start = records[first].time;
    seg.end = last + 1 < records.size() ? records[last + 1].time : records[last].time + step;
    seg.load = records[first].load_true;
    seg.mean_duties = VectorXd::Zero(records[first].duties.size());

    const double window_start = seg.end - options.window_seconds;
    for (std::size_t i = first; i <= last; ++i) {
      const TelemetryRecord& r = records[i];
      const double deviation = max_deviation_from_mean(r.currents);
      if (!seg.convergence_time && r.current_spread <= options.balance_tolerance) {
        seg.convergence_time = r.time - seg.start;
      }
      if (r.time < window_start) continue;
      ++seg.window_samples;
      seg.mean_spread += r.current_spread;
      seg.max_spread = std::max(seg.max_spread, r.current_spread);
      seg.max_deviation = std::max(seg.max_deviation, deviation);
      seg.mean_bus_current += r.i_bus;
      seg.mean_beta_opt += r.beta_opt;
      seg.max_load_estimate_error = std::max(seg.max_load_estimate_error, std::abs(r.load_estimate - r.load_true));
      seg.mean_duties += r.duties;
      seg.binding_module = r.binding_module;
    }
    if (seg.window_samples > 0) {
      const double count = static_cast<double>(seg.window_samples);
      seg.mean_spread /= count;
      seg.mean_bus_current /= count;
      seg.mean_beta_opt /= count;
      seg.mean_duties /= count;
    }
    report.segments.push_back(std::move(seg));
    first = last + 1;
  }
  return report;
}

void print_summary(const SummaryReport& report, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof(line), "%9s %9s %8s %11s %11s %11s %11s %7s %10s %9s\n", "start_s", "end_s", "load_ohm",
                "beta_opt_a", "i_bus_a", "max_spread", "max_dev_a", "binding", "est_err", "settle_s");
  out << line;
  for (const SegmentSummary& s : report.segments) {
    char settle[32];
    if (s.convergence_time) {
      std::snprintf(settle, sizeof(settle), "%.1f", *s.convergence_time);
    } else {
      std::snprintf(settle, sizeof(settle), "never");
    }
    std::snprintf(line, sizeof(line), "%9.1f %9.1f %8.2f %11.6f %11.6f %11.6f %11.6f %7d %10.2e %9s\n", s.start,
                  s.end, s.load, s.mean_beta_opt, s.mean_bus_current, s.max_spread, s.max_deviation,
                  s.binding_module, s.max_load_estimate_error, settle);
    out << line;
  }
}

std::string summary_json(const SummaryReport& report) {
  nlohmann::json segments = nlohmann::json::array();
  for (const SegmentSummary& s : report.segments) {
    nlohmann::json j;
    j["start_s"] = s.start;
    j["end_s"] = s.end;
    j["load_ohm"] = s.load;
    j["window_samples"] = s.window_samples;
    j["mean_spread_a"] = s.mean_spread;
    j["max_spread_a"] = s.max_spread;
    j["max_deviation_a"] = s.max_deviation;
    j["mean_bus_current_a"] = s.mean_bus_current;
    j["mean_beta_opt_a"] = s.mean_beta_opt;
    j["binding_module"] = s.binding_module;
    j["max_load_estimate_error_ohm"] = s.max_load_estimate_error;
    j["mean_duties"] = std::vector<double>(s.mean_duties.begin(), s.mean_duties.end());
    j["convergence_time_s"] = s.convergence_time ? nlohmann::json(*s.convergence_time) : nlohmann::json(nullptr);
    segments.push_back(std::move(j));
  }
  return nlohmann::json{{"schema_version", 1}, {"segments", segments}}.dump(2) + "\n";
}

}  // namespace pbsched
