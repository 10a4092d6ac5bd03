#pragma once

// Ground-truth bench model: each module's buck stage applies an averaged
// duty alpha_k to its OCV, duty increases are slew-limited, the PWM register
// is quantized, and sensors may add Gaussian noise. Currents come from
// nodal_solve(), never from the scheduler's impedance matrix.

#include <cstdint>
#include <random>

#include "pbsched/circuit.hpp"
#include "pbsched/measurement.hpp"
#include "pbsched/scheduler.hpp"
#include "pbsched/types.hpp"

namespace pbsched {

struct PlantConfig {
  PackModel<double> pack;
  int pwm_resolution = 256;       // distinct duty levels, endpoints included
  double ramp_up_seconds = 5.0;   // time for a full-scale duty increase
  double dt = 0.1;                // seconds per plant step
  double noise_stddev = 0.0;      // volts / amperes, applied to every sensor
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct PlantState {
  long long step = 0;
  double time = 0;
  VectorXd ramp_duties;    // slew-limited duty before quantization
  VectorXd actual_duties;  // duty seen by the hardware (quantized)
  VectorXd target_duties;
  std::mt19937_64 rng;
};

/// round(duty * (levels - 1)) / (levels - 1).
double quantize_duty(double duty, int levels);

/// Instantaneous decrease, linear increase at 1 / ramp_up_seconds per second.
double apply_ramp(double actual, double target, double dt, double ramp_up_seconds);

/// Plant at rest with every duty set to initial_duty.
PlantState initial_plant_state(const PlantConfig& cfg, double initial_duty);

struct PlantStep {
  PlantState state;
  Measurement<double> measurement;
};

/// Applies the command for one step of length cfg.dt, samples the sensors
/// at the step's start time, then advances time.
PlantStep plant_step(const PlantState& state, const ScheduleCommand<double>& command, double load_now,
                     const PlantConfig& cfg);

}  // namespace pbsched
