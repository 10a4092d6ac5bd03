#include "pbsched/telemetry.hpp"

#include <charconv>
#include <fstream>

#include "pbsched/errors.hpp"

namespace pbsched {

std::vector<std::string> telemetry_columns(std::size_t module_count) {
  std::vector<std::string> cols{"time_s", "load_true_ohm", "load_est_ohm", "beta_opt_a"};
  for (std::size_t k = 1; k <= module_count; ++k) {
    const std::string id = std::to_string(k);
    cols.push_back("duty_" + id);
    cols.push_back("v_cmd_" + id + "_v");
    cols.push_back("i_" + id + "_a");
  }
  cols.insert(cols.end(), {"v_bus_v", "i_bus_a", "spread_a"});
  return cols;
}

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw InternalError("number formatting failed");
  return std::string(buf, end);
}

void write_telemetry_csv(std::span<const TelemetryRecord> records, std::size_t module_count, std::ostream& out) {
  const auto cols = telemetry_columns(module_count);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';

  const auto n = static_cast<Eigen::Index>(module_count);
  for (const TelemetryRecord& r : records) {
    if (r.duties.size() != n || r.commanded_voltages.size() != n || r.currents.size() != n) {
      throw DimensionError("telemetry record does not match module count " + std::to_string(module_count));
    }
    out << format_number(r.time) << ',' << format_number(r.load_true) << ',' << format_number(r.load_estimate)
        << ',' << format_number(r.beta_opt);
    for (Eigen::Index k = 0; k < n; ++k) {
      out << ',' << format_number(r.duties[k]) << ',' << format_number(r.commanded_voltages[k]) << ','
          << format_number(r.currents[k]);
    }
    out << ',' << format_number(r.v_bus) << ',' << format_number(r.i_bus) << ','
        << format_number(r.current_spread) << '\n';
  }
}

void write_telemetry_csv(std::span<const TelemetryRecord> records, std::size_t module_count,
                         const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw FileError("cannot open " + path + " for writing");
  write_telemetry_csv(records, module_count, file);
  file.flush();
  if (!file) throw FileError("write to " + path + " failed");
}

}  // namespace pbsched
