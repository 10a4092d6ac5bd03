// pbsched: command-line front end.
//
//   pbsched simulate --config run.json [--out run.csv] [--seed N] [--duration S]
//   pbsched solve    --config run.json --load 10
//   pbsched solve    --ocv 5,5,5 --impedance 3,4.5,6 --load 10 [--betas 1,1,1]
//   pbsched check    [--seed N] [--instances N]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbsched/circuit.hpp"
#include "pbsched/config.hpp"
#include "pbsched/errors.hpp"
#include "pbsched/experiment.hpp"
#include "pbsched/property_suite.hpp"
#include "pbsched/scaling.hpp"
#include "pbsched/scheduler.hpp"
#include "pbsched/summary.hpp"
#include "pbsched/telemetry.hpp"

namespace {

using namespace pbsched;

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
};

struct SolveArgs {
  std::string config;
  std::vector<double> ocvs;
  std::vector<double> impedances;
  std::vector<double> betas;
  double load = 0;
};

struct CheckArgs {
  std::uint64_t seed = 1;
  std::size_t instances = 1000;
};

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int run_simulate(const SimulateArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config);
  if (args.seed) cfg.plant.rng_seed = *args.seed;
  if (args.duration) cfg.duration = *args.duration;
  if (!args.out.empty()) cfg.output_path = args.out;
  if (cfg.output_path.empty()) throw ConfigError("output_path: not set in config and no --out given");

  const std::vector<TelemetryRecord> records = run_experiment(cfg);
  write_telemetry_csv(records, static_cast<std::size_t>(cfg.pack.size()), cfg.output_path);

  const SummaryReport report = summarize(records);
  print_summary(report, std::cout);

  const std::string summary_path = std::filesystem::path(cfg.output_path).replace_extension(".summary.json").string();
  std::ofstream summary(summary_path, std::ios::binary | std::ios::trunc);
  if (!summary) throw FileError("cannot open " + summary_path + " for writing");
  summary << summary_json(report);
  std::cout << "wrote " << records.size() << " records to " << cfg.output_path << " and summary to " << summary_path
            << '\n';
  return 0;
}

int run_solve(const SolveArgs& args) {
  VectorXd ocvs;
  VectorXd impedances;
  std::optional<ScalingVector<double>> scaling;
  if (!args.config.empty()) {
    const ExperimentConfig cfg = load_experiment_config(args.config);
    ocvs = cfg.pack.ocvs();
    impedances = cfg.pack.impedances();
    scaling = resolve_scaling(cfg.scaling, cfg.pack);
  } else {
    if (args.ocvs.empty() || args.impedances.empty()) {
      throw DomainError("solve needs --config or both --ocv and --impedance");
    }
    ocvs = to_vector(args.ocvs);
    impedances = to_vector(args.impedances);
    detail::require_same_size(impedances.size(), ocvs.size(), "--impedance");
  }
  if (!args.betas.empty()) scaling = ScalingVector<double>(to_vector(args.betas));
  if (!scaling) scaling = equal_scaling<double>(ocvs.size());

  const ImpedanceMatrix<double> dm(impedances, args.load);
  const BetaSolution<double> sol = solve_beta(dm, *scaling, ocvs);
  const ScheduleCommand<double> cmd = make_command(optimal_voltages(dm, *scaling, sol.beta_opt), ocvs, sol.binding_module);
  const VectorXd currents = currents_from_voltages(dm, cmd.voltages);

  std::printf("load_ohm   %.9g\nbeta_opt_a %.9g\nbinding    %d\n", args.load, sol.beta_opt, sol.binding_module);
  std::printf("%6s %12s %12s %12s\n", "module", "v_cmd_v", "duty", "i_a");
  for (Eigen::Index k = 0; k < ocvs.size(); ++k) {
    std::printf("%6lld %12.9f %12.9f %12.9f\n", static_cast<long long>(k + 1), cmd.voltages[k], cmd.duties[k],
                currents[k]);
  }
  std::printf("i_bus_a    %.9g\n", currents.sum());
  return 0;
}

int run_check(const CheckArgs& args) {
  bool ok = true;
  for (const PropertyResult& r : run_property_suite(args.seed, args.instances)) {
    std::printf("[%s] %-46s n=%zu worst=%.3e tol=%.1e", r.passed() ? "PASS" : "FAIL", r.name.c_str(), r.instances,
                r.worst, r.tolerance);
    if (!r.passed()) std::printf("  (%zu failures, first: %s)", r.failures, r.first_failure.c_str());
    std::printf("\n");
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive optimal current scheduling for parallel buck-regulated battery modules"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a closed-loop experiment; write CSV telemetry and a summary");
  simulate->add_option("--config", sim.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Telemetry CSV path (overrides output_path)");
  simulate->add_option("--seed", sim.seed, "Measurement-noise RNG seed (overrides plant.rng_seed)");
  simulate->add_option("--duration", sim.duration, "Run length in seconds (overrides duration_s)");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "One-shot schedule for a pack and a known load");
  solve_cmd->add_option("--config", solve.config, "Take pack and scaling from an experiment config")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--ocv", solve.ocvs, "Module open-circuit voltages, volts")->delimiter(',');
  solve_cmd->add_option("--impedance", solve.impedances, "Module resistances, ohms")->delimiter(',');
  solve_cmd->add_option("--betas", solve.betas, "Relative current scaling (default all ones)")->delimiter(',');
  solve_cmd->add_option("--load", solve.load, "Load resistance, ohms")->required();

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Run the randomized property suite");
  check_cmd->add_option("--seed", check.seed, "RNG seed");
  check_cmd->add_option("--instances", check.instances, "Random instances per property")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (solve_cmd->parsed()) return run_solve(solve);
    if (check_cmd->parsed()) return run_check(check);
  } catch (const pbsched::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
