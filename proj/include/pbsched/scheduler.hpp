#pragma once

// Centralized recursive current scheduling.
//
// Given the pack's impedance matrix D for the present load estimate, the
// largest absolute current scale beta with
//
//     D^-1 (beta * b) <= V_ocv,   beta >= 0
//
// is a one-variable LP. Its solution fixes the module voltages
// V = beta * D^-1 b, which the scheduler turns into buck duty cycles.
// Each tick re-estimates the load from the bus (Z_l = V_bus / I_bus),
// rebuilds D, and re-solves.

#include <limits>
#include <string>
#include <utility>

#include "pbsched/circuit.hpp"
#include "pbsched/errors.hpp"
#include "pbsched/measurement.hpp"
#include "pbsched/scaling.hpp"
#include "pbsched/simplex.hpp"
#include "pbsched/types.hpp"

namespace pbsched {

enum class BetaMethod {
  simplex,    // generic LP: minimize -beta s.t. (D^-1 b) beta <= V_ocv
  min_ratio,  // closed form: min over a_k > 0 of V_ocv_k / a_k
};

template <typename Scalar>
struct BetaSolution {
  Scalar beta_opt = 0;   // amperes
  int binding_module = 0;  // 1-based id of an active constraint row
};

template <typename Scalar, typename Derived>
BetaSolution<Scalar> solve_beta(const ImpedanceMatrix<Scalar>& dm, const ScalingVector<Scalar>& scaling,
                                const Eigen::MatrixBase<Derived>& ocv_expr, BetaMethod method = BetaMethod::simplex) {
  const Vector<Scalar> ocvs = ocv_expr;
  detail::require_same_size(scaling.size(), dm.size(), "solve_beta: scaling");
  detail::require_same_size(ocvs.size(), dm.size(), "solve_beta: ocvs");
  detail::require_positive_entries(ocvs, "ocv");

  // Voltage needed per ampere of absolute scale.
  const Vector<Scalar> a = dm.d_inv() * scaling.betas();
  if (!(a.maxCoeff() > 0)) {
    throw InternalError("solve_beta: no constraint row limits beta (LP unbounded)");
  }

  // Rows within this relative distance of the optimum count as tied; the
  // lowest module index among them is reported as binding.
  constexpr Scalar tie = Scalar(1e-12);
  BetaSolution<Scalar> out;
  if (method == BetaMethod::simplex) {
    const Vector<Scalar> objective = Vector<Scalar>::Constant(1, Scalar(-1));
    const LpResult<Scalar> lp = minimize_lp(a, ocvs, objective);
    if (lp.status != LpStatus::optimal) throw InternalError("solve_beta: LP did not reach an optimum");
    if (lp.tight_rows().empty()) throw InternalError("solve_beta: LP optimum has no active constraint");
    out.beta_opt = lp.x[0];
    for (Eigen::Index k = 0; k < a.size() && out.binding_module == 0; ++k) {
      if (a[k] * out.beta_opt >= ocvs[k] * (1 - tie)) out.binding_module = static_cast<int>(k) + 1;
    }
  } else {
    Vector<Scalar> ratios = Vector<Scalar>::Constant(a.size(), std::numeric_limits<Scalar>::infinity());
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (a[k] > 0) ratios[k] = ocvs[k] / a[k];
    }
    out.beta_opt = ratios.minCoeff();
    for (Eigen::Index k = 0; k < a.size() && out.binding_module == 0; ++k) {
      if (ratios[k] <= out.beta_opt * (1 + tie)) out.binding_module = static_cast<int>(k) + 1;
    }
  }
  if (out.binding_module == 0) throw InternalError("solve_beta: no active constraint at the optimum");
  return out;
}

template <typename Scalar>
Vector<Scalar> optimal_voltages(const ImpedanceMatrix<Scalar>& dm, const ScalingVector<Scalar>& scaling,
                                Scalar beta_opt) {
  detail::require_same_size(scaling.size(), dm.size(), "optimal_voltages: scaling");
  if (!(beta_opt >= 0)) throw DomainError("optimal_voltages: beta_opt must be >= 0");
  return beta_opt * (dm.d_inv() * scaling.betas());
}

/// Per-module voltage targets and the duty cycles that realize them.
template <typename Scalar = double>
struct ScheduleCommand {
  Vector<Scalar> voltages;  // volts
  Vector<Scalar> duties;    // alpha_k = V_k / V_ocv_k
};

/// Builds a command from target voltages. Duties within 1e-9 above 1 are
/// rounding on the active constraint and are snapped to 1; the binding
/// module (if any) is pinned to exactly 1.
template <typename Scalar>
ScheduleCommand<Scalar> make_command(const Vector<Scalar>& voltages, const Vector<Scalar>& ocvs,
                                     int binding_module = 0) {
  detail::require_same_size(voltages.size(), ocvs.size(), "make_command: voltages");
  ScheduleCommand<Scalar> cmd;
  cmd.duties = voltages.cwiseQuotient(ocvs);
  if (binding_module > 0) cmd.duties[binding_module - 1] = 1;
  constexpr Scalar snap = Scalar(1e-9);
  for (Eigen::Index k = 0; k < cmd.duties.size(); ++k) {
    Scalar& duty = cmd.duties[k];
    if (duty > 1 && duty <= 1 + snap) duty = 1;
    if (!(duty > 0 && duty <= 1)) {
      throw InfeasibleError("duty of module " + std::to_string(k + 1) + " is " + std::to_string(duty) +
                            ", outside (0, 1]");
    }
  }
  cmd.voltages = cmd.duties.cwiseProduct(ocvs);
  return cmd;
}

template <typename Scalar = double>
struct SchedulerConfig {
  Vector<Scalar> ocvs;
  Vector<Scalar> impedances;
  ScalingVector<Scalar> scaling;
  Scalar min_bus_current = Scalar(1e-3);  // below this, the load estimate is held
  Scalar fallback_load = Scalar(10);      // used until the first valid estimate
  Scalar initial_duty = Scalar(0.5);      // uniform duty commanded at t = 0

  void validate() const {
    detail::require_positive_entries(ocvs, "ocv");
    detail::require_positive_entries(impedances, "impedance");
    detail::require_same_size(impedances.size(), ocvs.size(), "scheduler config: impedances");
    detail::require_same_size(scaling.size(), ocvs.size(), "scheduler config: scaling");
    if (!(min_bus_current > 0)) throw DomainError("scheduler config: min_bus_current must be > 0");
    if (!(fallback_load > 0)) throw DomainError("scheduler config: fallback_load must be > 0");
    if (!(initial_duty >= 0 && initial_duty <= 1)) {
      throw DomainError("scheduler config: initial_duty must lie in [0, 1]");
    }
  }
};

template <typename Scalar = double>
struct SchedulerState {
  long long tick = 0;
  Scalar load_estimate = 0;  // ohms
  ScheduleCommand<Scalar> last_command;
  Scalar beta_opt = 0;     // amperes
  int binding_module = 0;  // 0 until the first solve
};

template <typename Scalar>
SchedulerState<Scalar> initial_state(const SchedulerConfig<Scalar>& cfg) {
  cfg.validate();
  SchedulerState<Scalar> state;
  state.load_estimate = cfg.fallback_load;
  state.last_command.duties = Vector<Scalar>::Constant(cfg.ocvs.size(), cfg.initial_duty);
  state.last_command.voltages = state.last_command.duties.cwiseProduct(cfg.ocvs);
  return state;
}

/// Ohm's-law load estimate with a low-current guard. Below
/// cfg.min_bus_current the previous estimate is held (fallback_load before
/// the first valid one).
template <typename Scalar>
Scalar estimate_load(Scalar v_bus, Scalar i_bus, const SchedulerState<Scalar>& state,
                     const SchedulerConfig<Scalar>& cfg) {
  if (!(v_bus >= 0)) throw MeasurementError("bus voltage must be >= 0 in discharge mode");
  if (!(i_bus >= 0)) throw MeasurementError("bus current must be >= 0 in discharge mode");
  if (i_bus < cfg.min_bus_current) return state.load_estimate;
  if (!(v_bus > 0)) throw MeasurementError("bus current flows with zero bus voltage (shorted load)");
  return v_bus / i_bus;
}

template <typename Scalar = double>
struct SchedulerStep {
  SchedulerState<Scalar> state;
  ScheduleCommand<Scalar> command;
};

/// One pass of estimate, rebuild D, solve, command. Pure: the result
/// depends only on the arguments.
template <typename Scalar>
SchedulerStep<Scalar> scheduler_step(const Measurement<Scalar>& measurement, const SchedulerState<Scalar>& state,
                                     const SchedulerConfig<Scalar>& cfg) {
  if (measurement.tick != state.tick) {
    throw DomainError("scheduler_step: measurement tick " + std::to_string(measurement.tick) +
                      " does not match scheduler tick " + std::to_string(state.tick));
  }
  const Scalar load = estimate_load(measurement.v_bus, measurement.i_bus, state, cfg);
  const ImpedanceMatrix<Scalar> dm(cfg.impedances, load);
  const BetaSolution<Scalar> beta = solve_beta(dm, cfg.scaling, cfg.ocvs);
  ScheduleCommand<Scalar> command =
      make_command(optimal_voltages(dm, cfg.scaling, beta.beta_opt), cfg.ocvs, beta.binding_module);

  SchedulerStep<Scalar> out{state, command};
  out.state.tick = state.tick + 1;
  out.state.load_estimate = load;
  out.state.last_command = std::move(command);
  out.state.beta_opt = beta.beta_opt;
  out.state.binding_module = beta.binding_module;
  return out;
}

}  // namespace pbsched
