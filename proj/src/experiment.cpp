#include "pbsched/experiment.hpp"

#include <cmath>
#include <string>

#include "pbsched/errors.hpp"

namespace pbsched {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(duration > 0, "duration", "must be > 0");
  require(plant.pwm_resolution >= 2, "plant.pwm_resolution", "must be >= 2");
  require(plant.ramp_up_seconds >= 0, "plant.ramp_up_seconds", "must be >= 0");
  require(plant.dt > 0, "plant.dt", "must be > 0");
  require(plant.noise_stddev >= 0, "plant.noise_stddev", "must be >= 0");
  require(scheduler.min_bus_current > 0, "scheduler.min_bus_current", "must be > 0");
  require(scheduler.fallback_load > 0, "scheduler.fallback_load", "must be > 0");
  require(scheduler.initial_duty >= 0 && scheduler.initial_duty <= 1, "scheduler.initial_duty",
          "must lie in [0, 1]");
  require(scheduler_period >= plant.dt, "scheduler_period", "must be >= plant.dt");
  const double ratio = scheduler_period / plant.dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, "scheduler_period",
          "must be an integer multiple of plant.dt");
  try {
    resolve_scaling(scaling, pack);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("scaling: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("scaling: ") + e.what());
  }
}

PlantConfig ExperimentConfig::plant_config() const {
  return PlantConfig{pack, plant.pwm_resolution, plant.ramp_up_seconds, plant.dt, plant.noise_stddev,
                     plant.rng_seed};
}

SchedulerConfig<double> ExperimentConfig::scheduler_config() const {
  return SchedulerConfig<double>{
      .ocvs = pack.ocvs(),
      .impedances = pack.impedances(),
      .scaling = resolve_scaling(scaling, pack),
      .min_bus_current = scheduler.min_bus_current,
      .fallback_load = scheduler.fallback_load,
      .initial_duty = scheduler.initial_duty,
  };
}

long long ExperimentConfig::plant_steps() const { return std::llround(duration / plant.dt); }

long long ExperimentConfig::steps_per_tick() const { return std::llround(scheduler_period / plant.dt); }

ScalingVector<double> resolve_scaling(const ScalingSpec& spec, const PackModel<double>& pack) {
  switch (spec.mode) {
    case ScalingMode::equal:
      return equal_scaling<double>(pack.size());
    case ScalingMode::discharge_soc:
      return discharge_scaling(pack.socs());
    case ScalingMode::charge_soc:
      return charge_scaling(pack.socs());
    case ScalingMode::explicit_list: {
      const VectorXd betas = Eigen::Map<const VectorXd>(spec.betas.data(), static_cast<Eigen::Index>(spec.betas.size()));
      detail::require_same_size(betas.size(), pack.size(), "explicit scaling list");
      return ScalingVector<double>(betas);
    }
  }
  throw InternalError("unknown scaling mode");
}

std::vector<TelemetryRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const PlantConfig plant_cfg = cfg.plant_config();
  const SchedulerConfig<double> sched_cfg = cfg.scheduler_config();

  SchedulerState<double> sched = initial_state(sched_cfg);
  ScheduleCommand<double> command = sched.last_command;
  PlantState plant = initial_plant_state(plant_cfg, sched_cfg.initial_duty);

  const long long steps = cfg.plant_steps();
  const long long per_tick = cfg.steps_per_tick();
  std::vector<TelemetryRecord> records;
  records.reserve(static_cast<std::size_t>(steps));

  for (long long i = 0; i < steps; ++i) {
    const double load = cfg.load_profile.at(plant.time);
    PlantStep stepped = plant_step(plant, command, load, plant_cfg);
    Measurement<double>& m = stepped.measurement;

    TelemetryRecord r;
    r.time = m.time;
    r.load_true = m.load_true;
    r.load_estimate = sched.load_estimate;
    r.beta_opt = sched.beta_opt;
    r.duties = stepped.state.actual_duties;
    r.commanded_voltages = command.voltages;
    r.currents = m.module_currents;
    r.v_bus = m.v_bus;
    r.i_bus = m.i_bus;
    r.current_spread = m.module_currents.maxCoeff() - m.module_currents.minCoeff();
    r.binding_module = sched.binding_module;
    r.scheduler_tick = sched.tick;
    records.push_back(std::move(r));

    plant = std::move(stepped.state);
    if ((i + 1) % per_tick == 0) {
      m.tick = sched.tick;
      SchedulerStep<double> next = scheduler_step(m, sched, sched_cfg);
      sched = std::move(next.state);
      command = std::move(next.command);
    }
  }
  return records;
}

}  // namespace pbsched
