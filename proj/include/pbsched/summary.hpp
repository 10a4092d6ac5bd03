#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pbsched/experiment.hpp"

namespace pbsched {

struct SummaryOptions {
  double window_seconds = 50.0;     // steady-state window at the end of each segment
  double balance_tolerance = 2e-3;  // amperes, on current_spread (max - min)
};

/// Statistics for one constant-load stretch of a run. Steady-state fields
/// cover only the final window_seconds of the stretch.
struct SegmentSummary {
  double start = 0;
  double end = 0;
  double load = 0;
  std::size_t window_samples = 0;
  double mean_spread = 0;
  double max_spread = 0;
  double max_deviation = 0;  // max over window of max_k |I_k - mean(I)|
  double mean_bus_current = 0;
  double mean_beta_opt = 0;
  int binding_module = 0;
  double max_load_estimate_error = 0;
  VectorXd mean_duties;
  std::optional<double> convergence_time;  // seconds after start, first spread <= tolerance
};

struct SummaryReport {
  std::vector<SegmentSummary> segments;
};

double max_deviation_from_mean(const VectorXd& currents);

/// Throws DomainError on an empty record list.
SummaryReport summarize(std::span<const TelemetryRecord> records, const SummaryOptions& options = {});

void print_summary(const SummaryReport& report, std::ostream& out);

std::string summary_json(const SummaryReport& report);

}  // namespace pbsched
