#pragma once

// Experiment configuration files are JSON objects, schema_version 1:
//
//   {
//     "schema_version": 1,
//     "pack": {"modules": [{"id": 1, "ocv_v": 5.0, "impedance_ohm": 3.0, "soc": 1.0}, ...]},
//     "scaling": {"mode": "equal" | "discharge_soc" | "charge_soc" | "explicit", "betas": [...]},
//     "load_profile": [{"start_s": 0, "resistance_ohm": 10}, ...],
//     "duration_s": 700,
//     "scheduler_period_s": 1.0,
//     "plant": {"dt_s": 0.1, "pwm_resolution": 256, "ramp_up_s": 5.0,
//               "noise_stddev": 0.0, "rng_seed": 1},
//     "scheduler": {"min_bus_current_a": 0.001, "fallback_load_ohm": 10.0, "initial_duty": 0.5},
//     "output_path": "run.csv"
//   }
//
// "scaling", "plant", "scheduler", "scheduler_period_s" and "output_path"
// are optional. Module "id" and "soc" are optional (position and 1.0).
// Unknown keys are rejected.

#include <string>
#include <string_view>

#include "pbsched/experiment.hpp"

namespace pbsched {

inline constexpr int kConfigSchemaVersion = 1;

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(std::string_view json_text);

/// Throws FileError if the file cannot be read.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace pbsched
