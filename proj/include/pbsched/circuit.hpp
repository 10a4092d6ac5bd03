#pragma once

// Circuit model of n buck-regulated modules in parallel on a common bus
// feeding a resistive load. Module k is an ideal source V_k in series with
// a resistance Z_k; the load is Z_l between bus and ground.
//
// Two independent routes to the module currents are provided:
//   * the impedance matrix D (I = D V), used by the scheduler, and
//   * nodal_solve(), which solves the bus node directly and never forms D.
// The plant simulation uses the second so the controller and plant do not
// share a code path.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "pbsched/errors.hpp"
#include "pbsched/types.hpp"

namespace pbsched {

/// Electrical identity of one module. ids are 1-based.
template <typename Scalar = double>
struct ModuleParams {
  int id = 1;
  Scalar ocv = 0;        // volts
  Scalar impedance = 0;  // ohms
  Scalar soc = 1;        // fraction in (0, 1]
};

template <typename Scalar>
void validate(const ModuleParams<Scalar>& m) {
  const std::string tag = "module " + std::to_string(m.id);
  if (!(m.ocv > 0)) throw DomainError(tag + ": ocv must be > 0");
  if (!(m.impedance > 0)) throw DomainError(tag + ": impedance must be > 0");
  if (!(m.soc > 0 && m.soc <= 1)) throw DomainError(tag + ": soc must lie in (0, 1]");
}

/// Ordered set of parallel modules. Ids must be exactly 1..n in order.
template <typename Scalar = double>
class PackModel {
 public:
  explicit PackModel(std::vector<ModuleParams<Scalar>> modules) : modules_(std::move(modules)) {
    if (modules_.empty()) throw DomainError("pack must contain at least one module");
    for (std::size_t k = 0; k < modules_.size(); ++k) {
      if (modules_[k].id != static_cast<int>(k + 1)) {
        throw DomainError("module ids must be 1..n in order; position " + std::to_string(k + 1) +
                          " has id " + std::to_string(modules_[k].id));
      }
      validate(modules_[k]);
    }
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(modules_.size()); }
  const std::vector<ModuleParams<Scalar>>& modules() const { return modules_; }
  const ModuleParams<Scalar>& operator[](Eigen::Index k) const { return modules_[static_cast<std::size_t>(k)]; }

  Vector<Scalar> ocvs() const { return collect([](const auto& m) { return m.ocv; }); }
  Vector<Scalar> impedances() const { return collect([](const auto& m) { return m.impedance; }); }
  Vector<Scalar> socs() const { return collect([](const auto& m) { return m.soc; }); }

 private:
  template <typename Field>
  Vector<Scalar> collect(Field field) const {
    Vector<Scalar> out(size());
    for (Eigen::Index k = 0; k < size(); ++k) out[k] = field((*this)[k]);
    return out;
  }

  std::vector<ModuleParams<Scalar>> modules_;
};

namespace detail {

template <typename Derived>
void require_positive_entries(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if (v.size() == 0) throw DomainError(std::string(what) + ": at least one module is required");
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0)) {
      throw DomainError(std::string(what) + " of module " + std::to_string(k + 1) + " must be > 0");
    }
  }
}

template <typename Scalar>
void require_positive_load(Scalar load) {
  if (!(load > 0)) throw DomainError("load resistance must be > 0");
}

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(b) + ", got " +
                         std::to_string(a));
  }
}

// 1/Z_l + sum_k 1/Z_k, the total admittance seen from the bus node.
template <typename Derived>
typename Derived::Scalar bus_admittance(const Eigen::MatrixBase<Derived>& admittances,
                                        typename Derived::Scalar load) {
  using Scalar = typename Derived::Scalar;
  return Scalar(1) / load + admittances.sum();
}

}  // namespace detail

/// g_j = (1/Z_j) / (1/Z_l + sum_k 1/Z_k), so that V_bus = sum_j g_j V_j.
template <typename Derived>
Vector<typename Derived::Scalar> gain_factors(const Eigen::MatrixBase<Derived>& impedances,
                                              typename Derived::Scalar load) {
  detail::require_positive_entries(impedances, "impedance");
  detail::require_positive_load(load);
  const Vector<typename Derived::Scalar> y = impedances.cwiseInverse();
  return y / detail::bus_admittance(y, load);
}

template <typename DerivedV, typename DerivedZ>
typename DerivedZ::Scalar bus_voltage(const Eigen::MatrixBase<DerivedV>& module_voltages,
                                      const Eigen::MatrixBase<DerivedZ>& impedances,
                                      typename DerivedZ::Scalar load) {
  detail::require_same_size(module_voltages.size(), impedances.size(), "bus_voltage: module voltages");
  return gain_factors(impedances, load).dot(module_voltages);
}

/// The matrix D with I = D V for a fixed load, together with D^-1.
///
/// D = diag(y) - y y^T / S with y_k = 1/Z_k and S = 1/Z_l + sum y. It is
/// symmetric by construction and positive definite for positive
/// resistances; the inverse comes from a Cholesky factorization, and a
/// failed factorization is reported as an InternalError.
template <typename Scalar = double>
class ImpedanceMatrix {
 public:
  template <typename Derived>
  ImpedanceMatrix(const Eigen::MatrixBase<Derived>& impedances, Scalar load)
      : impedances_(impedances), load_(load) {
    detail::require_positive_entries(impedances_, "impedance");
    detail::require_positive_load(load_);

    const Vector<Scalar> y = impedances_.cwiseInverse();
    const Scalar s = detail::bus_admittance(y, load_);
    d_ = -(y * y.transpose()) / s;
    // Diagonal as y_k (S - y_k) / S with S - y_k summed directly; forming
    // y_k - y_k^2 / S cancels badly when one module dominates S.
    for (Eigen::Index k = 0; k < size(); ++k) {
      Scalar others = Scalar(1) / load_;
      for (Eigen::Index m = 0; m < size(); ++m) {
        if (m != k) others += y[m];
      }
      d_(k, k) = y[k] * others / s;
    }

    Eigen::LLT<Matrix<Scalar>> llt(d_);
    if (llt.info() != Eigen::Success) {
      throw InternalError("impedance matrix failed Cholesky factorization");
    }
    d_inv_ = llt.solve(Matrix<Scalar>::Identity(size(), size()));
  }

  Eigen::Index size() const { return impedances_.size(); }
  Scalar load() const { return load_; }
  const Vector<Scalar>& impedances() const { return impedances_; }
  const Matrix<Scalar>& d() const { return d_; }
  const Matrix<Scalar>& d_inv() const { return d_inv_; }

 private:
  Vector<Scalar> impedances_;
  Scalar load_;
  Matrix<Scalar> d_;
  Matrix<Scalar> d_inv_;
};

template <typename Derived>
ImpedanceMatrix<typename Derived::Scalar> impedance_matrix(const Eigen::MatrixBase<Derived>& impedances,
                                                           typename Derived::Scalar load) {
  return ImpedanceMatrix<typename Derived::Scalar>(impedances, load);
}

template <typename Scalar, typename Derived>
Vector<Scalar> currents_from_voltages(const ImpedanceMatrix<Scalar>& dm,
                                      const Eigen::MatrixBase<Derived>& voltages) {
  detail::require_same_size(voltages.size(), dm.size(), "currents_from_voltages: voltages");
  return dm.d() * voltages;
}

template <typename Scalar, typename Derived>
Vector<Scalar> voltages_from_currents(const ImpedanceMatrix<Scalar>& dm,
                                      const Eigen::MatrixBase<Derived>& currents) {
  detail::require_same_size(currents.size(), dm.size(), "voltages_from_currents: currents");
  return dm.d_inv() * currents;
}

template <typename Scalar>
struct NodalSolution {
  Scalar bus_voltage;
  Vector<Scalar> currents;
};

/// Direct solve of the bus node: V_bus from the closed form, then
/// I_k = (V_k - V_bus) / Z_k. Does not touch ImpedanceMatrix.
template <typename DerivedV, typename DerivedZ>
NodalSolution<typename DerivedZ::Scalar> nodal_solve(const Eigen::MatrixBase<DerivedV>& module_voltages,
                                                     const Eigen::MatrixBase<DerivedZ>& impedances,
                                                     typename DerivedZ::Scalar load) {
  using Scalar = typename DerivedZ::Scalar;
  detail::require_same_size(module_voltages.size(), impedances.size(), "nodal_solve: module voltages");
  detail::require_positive_entries(impedances, "impedance");
  detail::require_positive_load(load);

  const Vector<Scalar> y = impedances.cwiseInverse();
  const Scalar v_bus = module_voltages.cwiseProduct(y).sum() / detail::bus_admittance(y, load);
  Vector<Scalar> currents = (module_voltages.array() - v_bus).matrix().cwiseProduct(y);
  return {v_bus, std::move(currents)};
}

}  // namespace pbsched
