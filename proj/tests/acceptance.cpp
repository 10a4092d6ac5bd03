// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "pbsched/config.hpp"
#include "pbsched/experiment.hpp"
#include "pbsched/summary.hpp"
#include "pbsched/telemetry.hpp"
#include "test_support.hpp"

using namespace pbsched;
using testing_support::relative_gap;

namespace {

const std::string kExperiments = PBSCHED_EXPERIMENTS_DIR;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int failures = 0;

void report(int id, const std::string& name, const Verdict& v, const std::string& info) {
  std::printf("[%s] criterion %d: %s -- %s\n", v.ok ? "PASS" : "FAIL", id, name.c_str(),
              v.ok ? info.c_str() : (v.detail + "; " + info).c_str());
  if (!v.ok) ++failures;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

bool steady(const TelemetryRecord& r, const ExperimentConfig& cfg, double segment_start) {
  return r.time >= segment_start + cfg.scheduler_period + cfg.plant.ramp_up_seconds;
}

double segment_start(const std::vector<TelemetryRecord>& records, std::size_t i) {
  while (i > 0 && records[i - 1].load_true == records[i].load_true) --i;
  return records[i].time;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Criterion 1: binding module fixed at full duty, balanced currents, fast run.
void criterion_step_load_run(const ExperimentConfig& cfg) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_experiment(cfg);
  std::ostringstream csv;
  write_telemetry_csv(records, cfg.pack.size(), csv);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double worst_spread = 0;
  double worst_spread_load = 0;
  double worst_deviation = 0;
  std::size_t samples = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!steady(r, cfg, segment_start(records, i))) continue;
    ++samples;
    v.require(r.duties[2] == 1.0, "module 3 duty " + fmt("%.9g", r.duties[2]) + " at t=" + fmt("%.1f", r.time));
    if (r.current_spread > worst_spread) {
      worst_spread = r.current_spread;
      worst_spread_load = r.load_true;
    }
    worst_deviation = std::max(worst_deviation, max_deviation_from_mean(r.currents));
  }
  v.require(samples > 0, "no steady-state samples");
  v.require(records.size() == 7000, "expected 7000 records");
  v.require(worst_spread <= 2e-3, "steady-state spread (max-min) " + fmt("%.3f", worst_spread * 1e3) +
                                      " mA > 2 mA in the " + fmt("%g", worst_spread_load) + " ohm segment");
  v.require(seconds < 5.0, "runtime " + fmt("%.2f", seconds) + " s");
  report(1, "step-load run: module 3 at 100% duty, spread <= 2 mA, runtime < 5 s", v,
         std::to_string(samples) + " steady samples, max spread " + fmt("%.3f", worst_spread * 1e3) +
             " mA, max |I_k - mean| " + fmt("%.3f", worst_deviation * 1e3) + " mA, runtime " +
             fmt("%.3f", seconds) + " s");
}

// Criterion 2: 10 ohm segment against closed form and brute-force scan.
void criterion_beta_oracle(const ExperimentConfig& cfg) {
  Verdict v;
  const auto records = run_experiment(cfg);
  const VectorXd z = cfg.pack.impedances();
  const VectorXd ocv = cfg.pack.ocvs();
  const double expected = 5.0 / 36.0;
  const double scan = testing_support::brute_force_beta(VectorXd::Ones(3), z, 10.0, ocv);
  v.require(std::abs(scan - expected) <= 1e-9, "brute-force scan gives " + fmt("%.12g", scan));

  const VectorXd target_duty = (expected * (z.array() + 3 * 10.0) / ocv.array()).matrix();
  const double quantum = 1.0 / (cfg.plant.pwm_resolution - 1);
  v.require(relative_gap(target_duty, Eigen::Vector3d(11.0 / 12.0, 23.0 / 24.0, 1.0)) < 1e-12,
            "closed-form duties disagree");
  std::size_t samples = 0;
  double worst_beta = 0;
  double worst_duty = 0;
  for (const auto& r : records) {
    if (r.load_true != 10.0 || !steady(r, cfg, 0.0)) continue;
    ++samples;
    worst_beta = std::max(worst_beta, std::abs(r.beta_opt - expected));
    worst_duty = std::max(worst_duty, (r.duties - target_duty).cwiseAbs().maxCoeff());
    v.require(relative_gap(r.commanded_voltages.cwiseQuotient(ocv), target_duty) < 1e-9,
              "commanded duties off at t=" + fmt("%.1f", r.time));
  }
  v.require(samples == 940, "expected 940 steady samples in the 10 ohm segment, got " + std::to_string(samples));
  v.require(worst_beta <= 1e-9, "beta_opt error " + fmt("%.3g", worst_beta));
  v.require(worst_duty <= 0.5 * quantum + 1e-12, "applied duty error " + fmt("%.3g", worst_duty));
  report(2, "10 ohm segment: beta_opt = 5/36 A, duties [0.91667, 0.95833, 1.0]", v,
         "max |beta - 5/36| " + fmt("%.3g", worst_beta) + " A, max duty error " + fmt("%.3g", worst_duty) +
             " (half quantum " + fmt("%.3g", 0.5 * quantum) + "), scan " + fmt("%.12g", scan));
}

constexpr int kInstances = 2000;

// Criterion 3: generic LP versus min-ratio; commanded currents equal beta * b.
void criterion_solver_equivalence() {
  Verdict v;
  testing_support::PackSampler sampler(20240301);
  double worst_beta = 0;
  double worst_current = 0;
  for (int i = 0; i < kInstances && v.ok; ++i) {
    const auto p = sampler.next();
    const ImpedanceMatrix<double> dm(p.impedances, p.load);
    const ScalingVector<double> scaling(p.betas);
    const auto lp = solve_beta(dm, scaling, p.ocvs, BetaMethod::simplex);
    const auto ratio = solve_beta(dm, scaling, p.ocvs, BetaMethod::min_ratio);
    const double gap = std::abs(lp.beta_opt - ratio.beta_opt) / ratio.beta_opt;
    worst_beta = std::max(worst_beta, gap);
    const VectorXd currents = currents_from_voltages(dm, optimal_voltages(dm, scaling, lp.beta_opt));
    const double cur = relative_gap(currents, lp.beta_opt * p.betas);
    worst_current = std::max(worst_current, cur);
    v.require(gap <= 1e-9, "instance " + std::to_string(i) + ": beta gap " + fmt("%.3g", gap));
    v.require(cur <= 1e-9, "instance " + std::to_string(i) + ": current gap " + fmt("%.3g", cur));
  }
  report(3, "LP and min-ratio agree; commanded currents equal beta_opt * beta_k", v,
         std::to_string(kInstances) + " instances, worst beta gap " + fmt("%.3g", worst_beta) +
             ", worst current gap " + fmt("%.3g", worst_current));
}

// Criterion 4: D-matrix currents versus nodal solve and an MNA oracle; KCL/KVL.
void criterion_circuit_oracle() {
  Verdict v;
  testing_support::PackSampler sampler(8675309);
  double worst_gap = 0;
  double worst_kirchhoff = 0;
  for (int i = 0; i < kInstances && v.ok; ++i) {
    const auto p = sampler.next();
    const ImpedanceMatrix<double> dm(p.impedances, p.load);
    const VectorXd via_d = currents_from_voltages(dm, p.voltages);
    const auto nodal = nodal_solve(p.voltages, p.impedances, p.load);
    const auto mna = testing_support::mna_solve(p.voltages, p.impedances, p.load);
    const double gap = std::max(relative_gap(via_d, nodal.currents), relative_gap(via_d, mna.currents));

    const double scale_i = std::max(nodal.currents.cwiseAbs().maxCoeff(), 1e-300);
    const double kcl = std::abs(nodal.currents.sum() - nodal.bus_voltage / p.load) / scale_i;
    const double kvl = (p.voltages.array() - p.impedances.array() * nodal.currents.array() - nodal.bus_voltage)
                           .abs()
                           .maxCoeff() /
                       std::max(p.voltages.cwiseAbs().maxCoeff(), 1e-300);
    worst_gap = std::max(worst_gap, gap);
    worst_kirchhoff = std::max({worst_kirchhoff, kcl, kvl});
    v.require(gap <= 1e-9, "instance " + std::to_string(i) + ": current gap " + fmt("%.3g", gap));
    v.require(kcl <= 1e-9 && kvl <= 1e-9, "instance " + std::to_string(i) + ": Kirchhoff residual");
  }
  report(4, "currents_from_voltages matches nodal_solve; Kirchhoff residuals small", v,
         std::to_string(kInstances) + " instances, worst current gap " + fmt("%.3g", worst_gap) +
             ", worst KCL/KVL residual " + fmt("%.3g", worst_kirchhoff));
}

// Criterion 5: D symmetric and Cholesky-factorable for every random pack.
void criterion_matrix_properties() {
  Verdict v;
  testing_support::PackSampler sampler(4242);
  double worst_asym = 0;
  for (int i = 0; i < kInstances && v.ok; ++i) {
    const auto p = sampler.next();
    try {
      const ImpedanceMatrix<double> dm(p.impedances, p.load);
      const double asym = (dm.d() - dm.d().transpose()).cwiseAbs().maxCoeff();
      worst_asym = std::max(worst_asym, asym);
      v.require(asym == 0.0, "instance " + std::to_string(i) + ": asymmetry " + fmt("%.3g", asym));
      Eigen::LLT<MatrixXd> llt(dm.d());
      v.require(llt.info() == Eigen::Success, "instance " + std::to_string(i) + ": not positive definite");
    } catch (const InternalError& e) {
      v.require(false, "instance " + std::to_string(i) + ": " + e.what());
    }
  }
  report(5, "impedance matrix symmetric and positive definite", v,
         std::to_string(kInstances) + " instances, worst asymmetry " + fmt("%.3g", worst_asym));
}

Measurement<double> exact_measurement(const ScheduleCommand<double>& cmd, const SchedulerConfig<double>& cfg,
                                      double load, long long tick) {
  const auto sol = testing_support::mna_solve(cmd.duties.cwiseProduct(cfg.ocvs), cfg.impedances, load);
  Measurement<double> m;
  m.tick = tick;
  m.time = static_cast<double>(tick);
  m.v_bus = sol.bus_voltage;
  m.i_bus = sol.currents.sum();
  m.module_currents = sol.currents;
  m.load_true = load;
  return m;
}

// Number of ticks whose command differs from the previous one.
int command_changes(const std::vector<VectorXd>& issued) {
  int changes = 0;
  for (std::size_t t = 1; t < issued.size(); ++t) {
    if (relative_gap(issued[t], issued[t - 1]) > 1e-12) ++changes;
  }
  return changes;
}

// Criterion 6: one-step convergence, exactly one transient tick per load step.
void criterion_one_step(const ExperimentConfig& bundled) {
  Verdict v;
  const SchedulerConfig<double> cfg = bundled.scheduler_config();

  // Exact measurements, constant load.
  for (double load : {0.7, 10.0, 40.0, 333.0}) {
    SchedulerState<double> state = initial_state(cfg);
    ScheduleCommand<double> cmd = state.last_command;
    std::vector<VectorXd> issued;
    for (int t = 0; t < 20; ++t) {
      const auto step = scheduler_step(exact_measurement(cmd, cfg, load, state.tick), state, cfg);
      state = step.state;
      cmd = step.command;
      issued.push_back(cmd.voltages);
    }
    v.require(command_changes(issued) == 0, "commands vary under constant load " + fmt("%g", load));
  }

  // Exact measurements, a sequence of load steps every 5 ticks.
  const std::vector<double> loads{10, 20, 30, 40, 30, 20, 5, 200};
  SchedulerState<double> state = initial_state(cfg);
  ScheduleCommand<double> cmd = state.last_command;
  std::vector<VectorXd> issued;
  for (std::size_t seg = 0; seg < loads.size(); ++seg) {
    std::vector<VectorXd> segment;
    for (int t = 0; t < 5; ++t) {
      const auto step = scheduler_step(exact_measurement(cmd, cfg, loads[seg], state.tick), state, cfg);
      state = step.state;
      cmd = step.command;
      segment.push_back(cmd.voltages);
      issued.push_back(cmd.voltages);
    }
    v.require(command_changes(segment) == 0, "not settled after one tick at load " + fmt("%g", loads[seg]));
  }
  const int steps = static_cast<int>(loads.size()) - 1;
  const int ideal_changes = command_changes(issued);
  v.require(ideal_changes == steps, "exact-measurement run: " + std::to_string(ideal_changes) +
                                        " command changes for " + std::to_string(steps) + " load steps");

  // Closed loop through the plant: the issued command changes once per load step.
  const auto records = run_experiment(bundled);
  std::vector<VectorXd> plant_issued;
  long long last_tick = -1;
  for (const auto& r : records) {
    if (r.scheduler_tick != last_tick) {
      plant_issued.push_back(r.commanded_voltages);
      last_tick = r.scheduler_tick;
    }
  }
  // Drop the initial uniform command; count from the first solved one.
  plant_issued.erase(plant_issued.begin());
  const int plant_changes = command_changes(plant_issued);
  v.require(plant_changes == 5, "step-load run: " + std::to_string(plant_changes) + " command changes for 5 load steps");

  report(6, "commands constant from tick 1; one transient tick per load step", v,
         "exact-measurement run " + std::to_string(ideal_changes) + "/" + std::to_string(steps) +
             " changes, step-load run " + std::to_string(plant_changes) + "/5 changes over " +
             std::to_string(plant_issued.size()) + " ticks");
}

// Criterion 7: byte-identical CSV for identical config and seed.
void criterion_determinism(const ExperimentConfig& bundled) {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path();
  std::size_t bytes = 0;
  for (const auto& [name, base] :
       {std::pair{std::string("paper_sec5"), bundled},
        std::pair{std::string("soc_weighted_noisy"), load_experiment_config(kExperiments + "/soc_weighted_noisy.json")}}) {
    std::vector<std::string> runs;
    for (int run = 0; run < 2; ++run) {
      const auto path = dir / ("pbsched_acceptance_" + name + "_" + std::to_string(run) + ".csv");
      write_telemetry_csv(run_experiment(base), base.pack.size(), path.string());
      runs.push_back(read_file(path));
      std::filesystem::remove(path);
    }
    v.require(!runs[0].empty() && runs[0] == runs[1], name + ": CSV differs between runs");
    bytes += runs[0].size();

    if (base.plant.noise_stddev > 0) {
      ExperimentConfig other = base;
      other.plant.rng_seed += 1;
      std::ostringstream csv;
      write_telemetry_csv(run_experiment(other), other.pack.size(), csv);
      v.require(csv.str() != runs[0], name + ": changing the seed did not change the noisy CSV");
    }
  }
  report(7, "identical config and seed give byte-identical CSV", v,
         "2 configs x 2 runs, " + std::to_string(bytes) + " bytes compared per run");
}

}  // namespace

int main() {
  try {
    const ExperimentConfig bundled = load_experiment_config(kExperiments + "/paper_sec5.json");
    criterion_step_load_run(bundled);
    criterion_beta_oracle(bundled);
    criterion_solver_equivalence();
    criterion_circuit_oracle();
    criterion_matrix_properties();
    criterion_one_step(bundled);
    criterion_determinism(bundled);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
