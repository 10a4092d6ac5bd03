#pragma once

// Relative current scaling: the scheduler targets I = beta * [b_1 ... b_n]
// where each b_k lies in [0, 1] and at least one b_k equals 1.

#include <string>

#include "pbsched/errors.hpp"
#include "pbsched/types.hpp"

namespace pbsched {

template <typename Scalar = double>
class ScalingVector {
 public:
  template <typename Derived>
  explicit ScalingVector(const Eigen::MatrixBase<Derived>& betas) : betas_(betas) {
    if (betas_.size() == 0) throw DomainError("scaling vector must not be empty");
    for (Eigen::Index k = 0; k < betas_.size(); ++k) {
      if (!(betas_[k] >= 0 && betas_[k] <= 1)) {
        throw DomainError("scaling of module " + std::to_string(k + 1) + " must lie in [0, 1]");
      }
    }
    if (betas_.maxCoeff() != Scalar(1)) {
      throw DomainError("scaling vector must have max entry exactly 1 (all-zero scaling is not allowed)");
    }
  }

  Eigen::Index size() const { return betas_.size(); }
  const Vector<Scalar>& betas() const { return betas_; }
  Scalar operator[](Eigen::Index k) const { return betas_[k]; }

 private:
  Vector<Scalar> betas_;
};

namespace detail {

template <typename Derived>
void require_valid_socs(const Eigen::MatrixBase<Derived>& socs) {
  if (socs.size() == 0) throw DomainError("at least one SOC is required");
  for (Eigen::Index k = 0; k < socs.size(); ++k) {
    if (!(socs[k] > 0 && socs[k] <= 1)) {
      throw DomainError("SOC of module " + std::to_string(k + 1) + " must lie in (0, 1]");
    }
  }
}

}  // namespace detail

/// b_k = SOC_k / max SOC: emptier modules deliver less current.
template <typename Derived>
ScalingVector<typename Derived::Scalar> discharge_scaling(const Eigen::MatrixBase<Derived>& socs) {
  detail::require_valid_socs(socs);
  return ScalingVector<typename Derived::Scalar>(socs / socs.maxCoeff());
}

/// b_k = min SOC / SOC_k: emptier modules accept more current.
template <typename Derived>
ScalingVector<typename Derived::Scalar> charge_scaling(const Eigen::MatrixBase<Derived>& socs) {
  detail::require_valid_socs(socs);
  using Scalar = typename Derived::Scalar;
  const Scalar lowest = socs.minCoeff();
  return ScalingVector<Scalar>(Vector<Scalar>::Constant(socs.size(), lowest).cwiseQuotient(socs));
}

template <typename Scalar = double>
ScalingVector<Scalar> equal_scaling(Eigen::Index n) {
  if (n < 1) throw DomainError("equal scaling needs n >= 1");
  return ScalingVector<Scalar>(Vector<Scalar>::Ones(n));
}

}  // namespace pbsched
