#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pbsched/experiment.hpp"

namespace pbsched {

/// time_s,load_true_ohm,load_est_ohm,beta_opt_a,
/// then duty_k,v_cmd_k_v,i_k_a for k = 1..n, then v_bus_v,i_bus_a,spread_a.
std::vector<std::string> telemetry_columns(std::size_t module_count);

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

void write_telemetry_csv(std::span<const TelemetryRecord> records, std::size_t module_count, std::ostream& out);

/// Throws FileError naming the path if it cannot be written.
void write_telemetry_csv(std::span<const TelemetryRecord> records, std::size_t module_count,
                         const std::string& path);

}  // namespace pbsched
