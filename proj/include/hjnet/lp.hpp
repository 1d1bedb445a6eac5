#pragma once

#include <limits>
#include <vector>

#include "hjnet/network.hpp"

namespace hjnet {

enum class LPStatus { Optimal, Infeasible, Unbounded };

/// Linear program in equality standard form with box bounds:
///   minimize  <objective, x>
///   subject to equality_lhs * x = equality_rhs,  lower <= x <= upper.
/// `upper` entries may be +infinity; everything else must be finite.
template <typename Scalar = double>
struct LPProblem {
  VectorX<Scalar> objective;
  MatrixX<Scalar> equality_lhs;
  VectorX<Scalar> equality_rhs;
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;

  /// Problem with bounds x >= 0 (the common case here).
  static LPProblem nonnegative(VectorX<Scalar> c, MatrixX<Scalar> a,
                               VectorX<Scalar> b) {
    LPProblem p;
    p.lower = VectorX<Scalar>::Zero(c.size());
    p.upper = VectorX<Scalar>::Constant(c.size(),
                                        std::numeric_limits<Scalar>::infinity());
    p.objective = std::move(c);
    p.equality_lhs = std::move(a);
    p.equality_rhs = std::move(b);
    return p;
  }

  void validate() const {
    const Index nv = objective.size();
    require(nv <= 100000, "too many variables");
    require(equality_lhs.cols() == nv && lower.size() == nv &&
                upper.size() == nv,
            "inconsistent variable count");
    require(equality_lhs.rows() == equality_rhs.size(),
            "inconsistent constraint count");
    require(objective.allFinite() && equality_lhs.allFinite() &&
                equality_rhs.allFinite() && lower.allFinite(),
            "LP data must be finite");
    for (Index i = 0; i < nv; ++i) {
      require(!std::isnan(upper(i)) && upper(i) != -std::numeric_limits<Scalar>::infinity(),
              "upper bounds must be finite or +infinity");
      require(lower(i) <= upper(i), "empty bound interval");
    }
  }
};

template <typename Scalar = double>
struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  Scalar value = Scalar(0);
  VectorX<Scalar> point;

  bool optimal() const { return status == LPStatus::Optimal; }
};

/// Two-phase primal simplex on the dense tableau with Bland's anti-cycling
/// rule (lowest eligible index enters; ratio-test ties resolved by lowest
/// basic index). Deterministic for identical input. Suited to the small,
/// well-scaled programs this library generates.
template <typename Scalar>
LPSolution<Scalar> solve_lp(const LPProblem<Scalar>& problem) {
  problem.validate();
  constexpr Scalar kEnterTol = Scalar(1e-9);
  constexpr Scalar kPivotTol = Scalar(1e-11);
  constexpr Scalar kFeasTol = Scalar(1e-8);
  const Scalar inf = std::numeric_limits<Scalar>::infinity();

  const Index nv = problem.objective.size();
  const Index ne = problem.equality_lhs.rows();

  if (nv == 0) {
    LPSolution<Scalar> sol;
    const bool feasible =
        ne == 0 || problem.equality_rhs.cwiseAbs().maxCoeff() <= kFeasTol;
    sol.status = feasible ? LPStatus::Optimal : LPStatus::Infeasible;
    sol.point.resize(0);
    return sol;
  }

  // Shift to y = x - lower >= 0 and turn each finite upper bound into an
  // extra equality row y_i + s = upper_i - lower_i.
  std::vector<Index> bounded;
  for (Index i = 0; i < nv; ++i)
    if (problem.upper(i) < inf) bounded.push_back(i);

  const Index rows = ne + Index(bounded.size());
  const Index nstruct = nv + Index(bounded.size());
  const Index ncols = nstruct + rows;  // artificials appended
  RowMajorMatrix<Scalar> t = RowMajorMatrix<Scalar>::Zero(rows + 1, ncols + 1);

  t.block(0, 0, ne, nv) = problem.equality_lhs;
  t.block(0, ncols, ne, 1) =
      problem.equality_rhs - problem.equality_lhs * problem.lower;
  for (Index k = 0; k < Index(bounded.size()); ++k) {
    const Index i = bounded[std::size_t(k)];
    t(ne + k, i) = Scalar(1);
    t(ne + k, nv + k) = Scalar(1);
    t(ne + k, ncols) = problem.upper(i) - problem.lower(i);
  }
  for (Index r = 0; r < rows; ++r)
    if (t(r, ncols) < Scalar(0)) t.row(r) = -t.row(r);

  std::vector<Index> basis(static_cast<std::size_t>(rows));
  std::vector<char> eligible(static_cast<std::size_t>(ncols), 1);
  for (Index r = 0; r < rows; ++r) {
    t(r, nstruct + r) = Scalar(1);
    basis[std::size_t(r)] = nstruct + r;
  }

  const auto pivot = [&](Index pr, Index pc) {
    t.row(pr) /= t(pr, pc);
    for (Index r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const Scalar f = t(r, pc);
      if (f != Scalar(0)) t.row(r) -= f * t.row(pr);
    }
    if (basis[std::size_t(pr)] >= nstruct)
      eligible[std::size_t(basis[std::size_t(pr)])] = 0;
    basis[std::size_t(pr)] = pc;
  };

  const auto run = [&]() -> bool {  // false when unbounded
    for (;;) {
      Index enter = -1;
      for (Index j = 0; j < ncols; ++j) {
        if (eligible[std::size_t(j)] && t(rows, j) < -kEnterTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      Scalar best_ratio = inf;
      for (Index r = 0; r < rows; ++r) {
        if (t(r, enter) <= kPivotTol) continue;
        const Scalar ratio = std::max(t(r, ncols), Scalar(0)) / t(r, enter);
        if (ratio < best_ratio - kPivotTol ||
            (ratio <= best_ratio + kPivotTol &&
             (leave < 0 || basis[std::size_t(r)] < basis[std::size_t(leave)]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the artificial total.
  for (Index r = 0; r < rows; ++r) t.row(rows) -= t.row(r);
  t.block(rows, nstruct, 1, rows).setZero();
  run();  // cannot be unbounded
  if (-t(rows, ncols) > kFeasTol) {
    LPSolution<Scalar> sol;
    sol.status = LPStatus::Infeasible;
    return sol;
  }
  // Pivot leftover artificials out where possible; rows that stay artificial
  // are redundant and carry a zero right-hand side.
  for (Index r = 0; r < rows; ++r) {
    if (basis[std::size_t(r)] < nstruct) continue;
    for (Index j = 0; j < nstruct; ++j) {
      if (eligible[std::size_t(j)] && std::abs(t(r, j)) > kPivotTol) {
        pivot(r, j);
        break;
      }
    }
  }
  for (Index j = nstruct; j < ncols; ++j) eligible[std::size_t(j)] = 0;

  // Phase 2 on the original objective.
  t.row(rows).setZero();
  t.block(rows, 0, 1, nv) = problem.objective.transpose();
  for (Index r = 0; r < rows; ++r) {
    const Index b = basis[std::size_t(r)];
    if (b < nstruct && t(rows, b) != Scalar(0))
      t.row(rows) -= t(rows, b) * t.row(r);
  }
  if (!run()) {
    LPSolution<Scalar> sol;
    sol.status = LPStatus::Unbounded;
    return sol;
  }

  LPSolution<Scalar> sol;
  sol.status = LPStatus::Optimal;
  sol.point = problem.lower;
  for (Index r = 0; r < rows; ++r) {
    const Index b = basis[std::size_t(r)];
    if (b < nv) sol.point(b) += std::max(t(r, ncols), Scalar(0));
  }
  for (Index i = 0; i < nv; ++i) {
    if (std::abs(sol.point(i) - problem.lower(i)) <= kFeasTol)
      sol.point(i) = problem.lower(i);
    if (problem.upper(i) < inf &&
        std::abs(sol.point(i) - problem.upper(i)) <= kFeasTol)
      sol.point(i) = problem.upper(i);
  }
  sol.value = problem.objective.dot(sol.point);
  return sol;
}

}  // namespace hjnet
