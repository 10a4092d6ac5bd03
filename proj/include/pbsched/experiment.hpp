#pragma once

// Closed-loop experiment: the plant runs at dt, the scheduler samples it
// every scheduler_period and issues a new command that takes effect on the
// following plant step.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbsched/circuit.hpp"
#include "pbsched/load_profile.hpp"
#include "pbsched/plant.hpp"
#include "pbsched/scaling.hpp"
#include "pbsched/scheduler.hpp"

namespace pbsched {

enum class ScalingMode { equal, discharge_soc, charge_soc, explicit_list };

struct ScalingSpec {
  ScalingMode mode = ScalingMode::equal;
  std::vector<double> betas;  // only for explicit_list
};

struct SchedulerSettings {
  double min_bus_current = 1e-3;
  double fallback_load = 10.0;
  double initial_duty = 0.5;
};

struct PlantSettings {
  int pwm_resolution = 256;
  double ramp_up_seconds = 5.0;
  double dt = 0.1;
  double noise_stddev = 0.0;
  std::uint64_t rng_seed = 0;
};

struct ExperimentConfig {
  PackModel<double> pack;
  ScalingSpec scaling;
  LoadProfile load_profile;
  double duration = 0;          // seconds
  double scheduler_period = 1;  // seconds, an integer multiple of plant.dt
  PlantSettings plant;
  SchedulerSettings scheduler;
  std::string output_path;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  PlantConfig plant_config() const;
  SchedulerConfig<double> scheduler_config() const;
  long long plant_steps() const;
  long long steps_per_tick() const;
};

ScalingVector<double> resolve_scaling(const ScalingSpec& spec, const PackModel<double>& pack);

struct TelemetryRecord {
  double time = 0;
  double load_true = 0;
  double load_estimate = 0;
  double beta_opt = 0;
  VectorXd duties;              // applied (post-ramp, quantized)
  VectorXd commanded_voltages;  // scheduler targets
  VectorXd currents;
  double v_bus = 0;
  double i_bus = 0;
  double current_spread = 0;  // max_k I_k - min_k I_k
  int binding_module = 0;     // not part of the CSV schema
  long long scheduler_tick = 0;
};

/// One record per plant step. Deterministic for a fixed config.
std::vector<TelemetryRecord> run_experiment(const ExperimentConfig& cfg);

}  // namespace pbsched
