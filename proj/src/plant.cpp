#include "pbsched/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbsched/errors.hpp"

namespace pbsched {

void PlantConfig::validate() const {
  if (pwm_resolution < 2) throw DomainError("plant: pwm_resolution must be >= 2");
  if (!(ramp_up_seconds >= 0)) throw DomainError("plant: ramp_up_seconds must be >= 0");
  if (!(dt > 0)) throw DomainError("plant: dt must be > 0");
  if (!(noise_stddev >= 0)) throw DomainError("plant: noise_stddev must be >= 0");
}

double quantize_duty(double duty, int levels) {
  if (!(duty >= 0 && duty <= 1)) throw DomainError("quantize_duty: duty must lie in [0, 1]");
  if (levels < 2) throw DomainError("quantize_duty: levels must be >= 2");
  const double steps = levels - 1;
  return std::round(duty * steps) / steps;
}

double apply_ramp(double actual, double target, double dt, double ramp_up_seconds) {
  if (!(actual >= 0 && actual <= 1) || !(target >= 0 && target <= 1)) {
    throw DomainError("apply_ramp: duties must lie in [0, 1]");
  }
  if (!(dt > 0)) throw DomainError("apply_ramp: dt must be > 0");
  if (!(ramp_up_seconds >= 0)) throw DomainError("apply_ramp: ramp_up_seconds must be >= 0");
  if (target <= actual || ramp_up_seconds == 0) return target;
  return std::min(target, actual + dt / ramp_up_seconds);
}

PlantState initial_plant_state(const PlantConfig& cfg, double initial_duty) {
  cfg.validate();
  PlantState state;
  const Eigen::Index n = cfg.pack.size();
  state.ramp_duties = VectorXd::Constant(n, initial_duty);
  state.target_duties = state.ramp_duties;
  state.actual_duties.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) state.actual_duties[k] = quantize_duty(initial_duty, cfg.pwm_resolution);
  state.rng.seed(cfg.rng_seed);
  return state;
}

PlantStep plant_step(const PlantState& state, const ScheduleCommand<double>& command, double load_now,
                     const PlantConfig& cfg) {
  const Eigen::Index n = cfg.pack.size();
  detail::require_same_size(command.duties.size(), n, "plant_step: command duties");
  detail::require_same_size(state.ramp_duties.size(), n, "plant_step: plant state");
  detail::require_positive_load(load_now);

  PlantStep out{state, {}};
  PlantState& next = out.state;
  next.target_duties = command.duties;
  for (Eigen::Index k = 0; k < n; ++k) {
    next.ramp_duties[k] = apply_ramp(state.ramp_duties[k], command.duties[k], cfg.dt, cfg.ramp_up_seconds);
    next.actual_duties[k] = quantize_duty(next.ramp_duties[k], cfg.pwm_resolution);
  }

  const VectorXd ocvs = cfg.pack.ocvs();
  const VectorXd applied = next.actual_duties.cwiseProduct(ocvs);
  const NodalSolution<double> circuit = nodal_solve(applied, cfg.pack.impedances(), load_now);

  Measurement<double>& m = out.measurement;
  m.tick = state.step;
  m.time = state.time;
  m.load_true = load_now;
  m.v_bus = circuit.bus_voltage;
  m.module_currents = circuit.currents;
  m.i_bus = circuit.currents.sum();
  if (cfg.noise_stddev > 0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_stddev);
    m.v_bus += noise(next.rng);
    m.i_bus += noise(next.rng);
    for (Eigen::Index k = 0; k < n; ++k) m.module_currents[k] += noise(next.rng);
  }

  next.step = state.step + 1;
  next.time = static_cast<double>(next.step) * cfg.dt;
  return out;
}

}  // namespace pbsched
