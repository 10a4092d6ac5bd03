#pragma once

// Small dense two-phase simplex for
//
//     minimize c^T x   subject to   A x <= b,  x >= 0.
//
// Intended for the handful of variables and constraints the scheduler
// needs; every iteration recomputes reduced costs from the current basis
// instead of carrying an objective row. Bland's rule (lowest index enters,
// lowest basic index leaves on ratio ties) rules out cycling.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pbsched/errors.hpp"
#include "pbsched/types.hpp"

namespace pbsched {

enum class LpStatus { optimal, infeasible, unbounded };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector<Scalar> x;
  Scalar objective = 0;
  // basis[i] is the variable basic in row i: [0, n) structural,
  // [n, n + m) slack of row i - n, anything above is artificial.
  std::vector<Eigen::Index> basis;
  Eigen::Index structural_count = 0;

  /// Rows whose slack variable is nonbasic, i.e. constraints held with
  /// equality by the final vertex. Ascending order.
  std::vector<Eigen::Index> tight_rows() const {
    const auto m = static_cast<Eigen::Index>(basis.size());
    std::vector<bool> slack_basic(static_cast<std::size_t>(m), false);
    for (Eigen::Index v : basis) {
      if (v >= structural_count && v < structural_count + m) {
        slack_basic[static_cast<std::size_t>(v - structural_count)] = true;
      }
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!slack_basic[static_cast<std::size_t>(i)]) rows.push_back(i);
    }
    return rows;
  }
};

namespace detail {

template <typename Scalar>
class DenseSimplex {
 public:
  DenseSimplex(const Matrix<Scalar>& a, const Vector<Scalar>& b, Scalar tol)
      : m_(a.rows()), n_(a.cols()), tol_(tol) {
    artificial_rows_.reserve(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (b[i] < 0) artificial_rows_.push_back(i);
    }
    cols_ = n_ + m_ + static_cast<Eigen::Index>(artificial_rows_.size());
    tableau_ = Matrix<Scalar>::Zero(m_, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(m_), 0);

    // Rows with negative rhs are negated so the starting point is feasible
    // for phase one, and take an artificial variable as their basic.
    Eigen::Index next_artificial = n_ + m_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Scalar sign = b[i] < 0 ? Scalar(-1) : Scalar(1);
      tableau_.row(i).head(n_) = sign * a.row(i);
      tableau_(i, n_ + i) = sign;
      tableau_(i, cols_) = sign * b[i];
      if (b[i] < 0) {
        tableau_(i, next_artificial) = 1;
        basis_[static_cast<std::size_t>(i)] = next_artificial++;
      } else {
        basis_[static_cast<std::size_t>(i)] = n_ + i;
      }
    }
  }

  LpResult<Scalar> minimize(const Vector<Scalar>& c) {
    LpResult<Scalar> result;
    result.structural_count = n_;

    if (!artificial_rows_.empty()) {
      Vector<Scalar> phase_one = Vector<Scalar>::Zero(cols_);
      phase_one.tail(cols_ - n_ - m_).setOnes();
      iterate(phase_one, cols_);
      Scalar infeasibility = 0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (is_artificial(basis_[static_cast<std::size_t>(i)])) infeasibility += tableau_(i, cols_);
      }
      if (infeasibility > tol_ * std::max(Scalar(1), tableau_.col(cols_).cwiseAbs().maxCoeff())) {
        result.status = LpStatus::infeasible;
        result.basis = basis_;
        return result;
      }
      drive_out_artificials();
    }

    Vector<Scalar> cost = Vector<Scalar>::Zero(cols_);
    cost.head(n_) = c;
    const bool bounded = iterate(cost, n_ + m_);

    result.basis = basis_;
    result.x = Vector<Scalar>::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index v = basis_[static_cast<std::size_t>(i)];
      if (v < n_) result.x[v] = tableau_(i, cols_);
    }
    if (!bounded) {
      result.status = LpStatus::unbounded;
      result.objective = -std::numeric_limits<Scalar>::infinity();
      return result;
    }
    result.status = LpStatus::optimal;
    result.objective = c.dot(result.x);
    return result;
  }

 private:
  bool is_artificial(Eigen::Index v) const { return v >= n_ + m_; }

  // Runs Bland-rule iterations over columns [0, allowed). Returns false if
  // the objective is unbounded below.
  bool iterate(const Vector<Scalar>& cost, Eigen::Index allowed) {
    const Eigen::Index max_iterations = 64 * (m_ + cols_ + 1);
    for (Eigen::Index iter = 0; iter < max_iterations; ++iter) {
      Vector<Scalar> basic_cost(m_);
      for (Eigen::Index i = 0; i < m_; ++i) basic_cost[i] = cost[basis_[static_cast<std::size_t>(i)]];

      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        const Scalar reduced = cost[j] - basic_cost.dot(tableau_.col(j));
        if (reduced < -tol_) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      Eigen::Index leaving = -1;
      Scalar best_ratio = 0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const Scalar pivot = tableau_(i, entering);
        if (pivot <= tol_) continue;
        const Scalar ratio = tableau_(i, cols_) / pivot;
        if (leaving < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return false;
      pivot_on(leaving, entering);
    }
    throw InternalError("simplex iteration limit exceeded");
  }

  bool is_basic(Eigen::Index v) const { return std::find(basis_.begin(), basis_.end(), v) != basis_.end(); }

  void pivot_on(Eigen::Index row, Eigen::Index col) {
    tableau_.row(row) /= tableau_(row, col);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const Scalar factor = tableau_(i, col);
      if (factor != 0) tableau_.row(i) -= factor * tableau_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // After a feasible phase one, any artificial still basic sits at zero.
  // Swap it for a structural or slack column where possible; a row with no
  // such entry is redundant and its artificial stays at zero.
  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (!is_basic(j) && std::abs(tableau_(i, j)) > tol_) {
          pivot_on(i, j);
          break;
        }
      }
    }
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index cols_ = 0;
  Scalar tol_;
  Matrix<Scalar> tableau_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> artificial_rows_;
};

}  // namespace detail

template <typename Scalar>
Scalar default_lp_tolerance() {
  return std::numeric_limits<Scalar>::epsilon() * Scalar(1024);
}

/// Minimize c^T x subject to A x <= b and x >= 0.
template <typename DerivedA, typename DerivedB, typename DerivedC>
LpResult<typename DerivedA::Scalar> minimize_lp(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b,
                                                const Eigen::MatrixBase<DerivedC>& c,
                                                typename DerivedA::Scalar tol =
                                                    default_lp_tolerance<typename DerivedA::Scalar>()) {
  using Scalar = typename DerivedA::Scalar;
  if (b.size() != a.rows()) throw DimensionError("minimize_lp: b must have one entry per row of A");
  if (c.size() != a.cols()) throw DimensionError("minimize_lp: c must have one entry per column of A");
  detail::DenseSimplex<Scalar> solver(Matrix<Scalar>(a), Vector<Scalar>(b), tol);
  return solver.minimize(Vector<Scalar>(c));
}

}  // namespace pbsched
