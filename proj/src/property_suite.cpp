#include "pbsched/property_suite.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pbsched/circuit.hpp"
#include "pbsched/scaling.hpp"
#include "pbsched/scheduler.hpp"

namespace pbsched {

namespace {

struct Instance {
  VectorXd impedances;
  double load = 0;
  VectorXd ocvs;
  VectorXd betas;
  VectorXd voltages;
  VectorXd socs;
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  Instance next() {
    Instance in;
    const int n = std::uniform_int_distribution<int>(1, 10)(rng_);
    in.impedances = draw(n, 0.1, 100.0);
    in.load = std::uniform_real_distribution<double>(0.5, 500.0)(rng_);
    in.ocvs = draw(n, 1.0, 60.0);
    in.betas = draw(n, 0.0, 1.0);
    in.betas[std::uniform_int_distribution<int>(0, n - 1)(rng_)] = 1.0;
    in.voltages = draw(n, 0.0, 60.0);
    in.socs = draw(n, 0.01, 1.0);
    return in;
  }

 private:
  VectorXd draw(int n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = dist(rng_);
    return v;
  }

  std::mt19937_64 rng_;
};

double relative_gap(const VectorXd& got, const VectorXd& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

class Tracker {
 public:
  Tracker(std::string name, double tolerance) { result_.name = std::move(name), result_.tolerance = tolerance; }

  void record(double residual, std::size_t instance) {
    ++result_.instances;
    result_.worst = std::max(result_.worst, residual);
    if (!(residual <= result_.tolerance)) {
      if (result_.failures++ == 0) {
        std::ostringstream msg;
        msg << "instance " << instance << ": residual " << residual;
        result_.first_failure = msg.str();
      }
    }
  }

  PropertyResult result() const { return result_; }

 private:
  PropertyResult result_;
};

}  // namespace

std::vector<PropertyResult> run_property_suite(std::uint64_t seed, std::size_t instances) {
  Tracker symmetry("impedance matrix symmetric", 1e-12);
  Tracker definite("impedance matrix positive definite (Cholesky)", 0.0);
  Tracker inverse("D * D^-1 = I", 1e-9);
  Tracker oracle("D V matches nodal solve", 1e-9);
  Tracker kcl("Kirchhoff current law", 1e-9);
  Tracker kvl("Kirchhoff voltage law", 1e-9);
  Tracker round_trip("D (D^-1 I) = I", 1e-9);
  Tracker solvers("simplex beta_opt = min-ratio beta_opt", 1e-9);
  Tracker balance("scheduled currents = beta_opt * b", 1e-9);
  Tracker feasible("commanded V <= V_ocv", 1e-12);
  Tracker active("some module at V_ocv", 1e-9);
  Tracker normalized("SOC scaling max = 1", 0.0);

  Generator gen(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const Instance in = gen.next();
    const ImpedanceMatrix<double> dm(in.impedances, in.load);
    const MatrixXd& d = dm.d();

    symmetry.record((d - d.transpose()).cwiseAbs().maxCoeff() / d.cwiseAbs().maxCoeff(), i);
    definite.record(Eigen::LLT<MatrixXd>(d).info() == Eigen::Success ? 0.0 : 1.0, i);
    inverse.record((d * dm.d_inv() - MatrixXd::Identity(d.rows(), d.cols())).cwiseAbs().maxCoeff(), i);

    const VectorXd currents = currents_from_voltages(dm, in.voltages);
    const NodalSolution<double> nodal = nodal_solve(in.voltages, in.impedances, in.load);
    oracle.record(relative_gap(currents, nodal.currents), i);

    const double i_load = nodal.bus_voltage / in.load;
    const double kcl_scale = std::max({std::abs(currents.sum()), std::abs(i_load), currents.cwiseAbs().maxCoeff(), 1e-300});
    kcl.record(std::abs(currents.sum() - i_load) / kcl_scale, i);
    const VectorXd terminal = in.voltages - in.impedances.cwiseProduct(currents);
    const double v_bus = bus_voltage(in.voltages, in.impedances, in.load);
    kvl.record((terminal.array() - v_bus).abs().maxCoeff() / std::max(in.voltages.cwiseAbs().maxCoeff(), 1e-300), i);

    round_trip.record(relative_gap(currents_from_voltages(dm, voltages_from_currents(dm, currents)), currents), i);

    const ScalingVector<double> scaling(in.betas);
    const auto lp = solve_beta(dm, scaling, in.ocvs, BetaMethod::simplex);
    const auto ratio = solve_beta(dm, scaling, in.ocvs, BetaMethod::min_ratio);
    solvers.record(std::abs(lp.beta_opt - ratio.beta_opt) / ratio.beta_opt, i);

    const VectorXd v_opt = optimal_voltages(dm, scaling, lp.beta_opt);
    balance.record(relative_gap(currents_from_voltages(dm, v_opt), lp.beta_opt * in.betas), i);
    const VectorXd utilization = v_opt.cwiseQuotient(in.ocvs);
    feasible.record(std::max(0.0, utilization.maxCoeff() - 1.0), i);
    active.record(std::abs(utilization.maxCoeff() - 1.0), i);

    const double dmax = discharge_scaling(in.socs).betas().maxCoeff();
    const double cmax = charge_scaling(in.socs).betas().maxCoeff();
    normalized.record(std::max(std::abs(dmax - 1.0), std::abs(cmax - 1.0)), i);
  }

  return {symmetry.result(), definite.result(), inverse.result(),  oracle.result(),
          kcl.result(),      kvl.result(),      round_trip.result(), solvers.result(),
          balance.result(),  feasible.result(), active.result(),     normalized.result()};
}

}  // namespace pbsched
