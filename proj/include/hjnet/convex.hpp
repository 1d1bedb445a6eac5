#pragma once

#include <optional>
#include <utility>

#include "hjnet/lp.hpp"

namespace hjnet {

namespace detail {

/// Simplex-weight program shared by the conjugate and Hamiltonian values:
///   minimize <cost, a>  over  a in the unit simplex with slopes' * a = p.
/// Extra equality rows can be appended by the callers.
template <typename Scalar>
LPProblem<Scalar> weight_program(const NetworkParams<Scalar>& net,
                                 const VecCRef<Scalar>& p,
                                 VectorX<Scalar> cost, Index extra_rows = 0) {
  const Index m = net.pieces();
  const Index n = net.dim();
  MatrixX<Scalar> a(1 + n + extra_rows, m);
  a.row(0).setOnes();
  a.block(1, 0, n, m) = net.slopes().transpose();
  VectorX<Scalar> b(1 + n + extra_rows);
  b(0) = Scalar(1);
  b.segment(1, n) = p;
  auto lp = LPProblem<Scalar>::nonnegative(std::move(cost), std::move(a),
                                           std::move(b));
  return lp;
}

}  // namespace detail

/// Legendre-Fenchel transform of the initial profile, evaluated at p.
/// Finite exactly when p lies in the convex hull of the slopes; returns
/// nullopt (meaning +infinity) otherwise.
template <typename Scalar>
std::optional<Scalar> legendre_transform(
    const NetworkParams<Scalar>& net,
    const VecCRef<Scalar>& p) {
  require(p.size() == net.dim(), "dual point dimension mismatch");
  require(p.allFinite(), "dual point must be finite");
  auto lp = detail::weight_program<Scalar>(net, p, net.offsets());
  const auto sol = solve_lp(lp);
  if (sol.status == LPStatus::Infeasible) return std::nullopt;
  if (sol.status == LPStatus::Unbounded)
    throw std::runtime_error("simplex-constrained program cannot be unbounded");
  return sol.value;
}

/// Smallest Hamiltonian consistent with the network: minimizes the combined
/// rate over the weight vectors that realize the conjugate value at p. Solved
/// as a second program with the conjugate value pinned as an equality.
/// Returns nullopt (+infinity) outside the conjugate's domain.
template <typename Scalar>
std::optional<Scalar> minimal_hamiltonian(
    const NetworkParams<Scalar>& net,
    const VecCRef<Scalar>& p) {
  const auto conj = legendre_transform(net, p);
  if (!conj) return std::nullopt;
  auto lp = detail::weight_program<Scalar>(net, p, net.rates(), 1);
  const Index last = lp.equality_rhs.size() - 1;
  lp.equality_lhs.row(last) = net.offsets().transpose();
  lp.equality_rhs(last) = *conj;
  const auto sol = solve_lp(lp);
  if (!sol.optimal())
    throw std::runtime_error("rate program lost feasibility at a conjugate point");
  return sol.value;
}

/// Structural checks on a parameter set, with a witness for the first
/// violation found per condition:
///   distinct_slopes  - slopes pairwise farther apart than tol,
///   convex_offsets   - the offsets admit a convex interpolant,
///   essential_pieces - no piece is dominated by a weight combination of the
///                      others matching its slope and offset with combined
///                      rate at most the piece's own rate (such a piece never
///                      contributes to the maximum for t >= 0).
template <typename Scalar = double>
struct AssumptionReport {
  bool distinct_slopes = true;
  bool convex_offsets = true;
  bool essential_pieces = true;

  std::pair<Index, Index> duplicate_pair{-1, -1};
  Index offset_index = -1;
  VectorX<Scalar> offset_combination;
  Scalar offset_value = Scalar(0);
  Index redundant_index = -1;
  VectorX<Scalar> redundant_combination;
  Scalar redundant_value = Scalar(0);

  bool pass() const { return distinct_slopes && convex_offsets && essential_pieces; }
};

namespace detail {

/// Domination program for piece j: weights on the other pieces matching
/// slope_j and offset_j exactly. Optimal value below rate_j + tol flags j.
template <typename Scalar>
LPSolution<Scalar> domination_program(const NetworkParams<Scalar>& net,
                                      Index j, VectorX<Scalar>* combination) {
  const Index m = net.pieces();
  const Index n = net.dim();
  MatrixX<Scalar> a(n + 2, m - 1);
  VectorX<Scalar> cost(m - 1);
  Index col = 0;
  for (Index i = 0; i < m; ++i) {
    if (i == j) continue;
    a(0, col) = Scalar(1);
    a.block(1, col, n, 1) = net.slope(i).transpose();
    a(n + 1, col) = net.offset(i);
    cost(col) = net.rate(i);
    ++col;
  }
  VectorX<Scalar> b(n + 2);
  b(0) = Scalar(1);
  b.segment(1, n) = net.slope(j).transpose();
  b(n + 1) = net.offset(j);
  auto sol = solve_lp(LPProblem<Scalar>::nonnegative(std::move(cost),
                                                     std::move(a), std::move(b)));
  if (combination && sol.optimal()) {
    combination->setZero(m);
    Index c = 0;
    for (Index i = 0; i < m; ++i)
      if (i != j) (*combination)(i) = sol.point(c++);
  }
  return sol;
}

}  // namespace detail

template <typename Scalar>
AssumptionReport<Scalar> check_assumptions(const NetworkParams<Scalar>& net,
                                           Scalar tol) {
  require(tol > Scalar(0), "tolerance must be positive");
  AssumptionReport<Scalar> report;
  const Index m = net.pieces();

  for (Index i = 0; i < m && report.distinct_slopes; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      if ((net.slope(i) - net.slope(j)).norm() <= tol) {
        report.distinct_slopes = false;
        report.duplicate_pair = {i, j};
        break;
      }
    }
  }

  for (Index i = 0; i < m; ++i) {
    auto lp = detail::weight_program<Scalar>(net, net.slope(i).transpose(),
                                             net.offsets());
    const auto sol = solve_lp(lp);
    // The unit weight on piece i is always feasible, so the program cannot be
    // infeasible; a value below offset_i certifies no convex interpolant.
    if (sol.optimal() && sol.value < net.offset(i) - tol) {
      report.convex_offsets = false;
      report.offset_index = i;
      report.offset_combination = sol.point;
      report.offset_value = sol.value;
      break;
    }
  }

  for (Index j = 0; j < m; ++j) {
    if (m == 1) break;
    VectorX<Scalar> combination;
    const auto sol = detail::domination_program(net, j, &combination);
    if (sol.optimal() && sol.value <= net.rate(j) + tol) {
      report.essential_pieces = false;
      report.redundant_index = j;
      report.redundant_combination = std::move(combination);
      report.redundant_value = sol.value;
      break;
    }
  }
  return report;
}

/// Deletes dominated pieces until the essential-pieces condition holds. The
/// network value at any (x, t >= 0) is unchanged.
template <typename Scalar>
NetworkParams<Scalar> remove_redundant_pieces(const NetworkParams<Scalar>& net,
                                              Scalar tol) {
  require(tol > Scalar(0), "tolerance must be positive");
  RowMajorMatrix<Scalar> flat = net.flat();
  bool removed = true;
  while (removed && flat.rows() > 1) {
    removed = false;
    const auto current = NetworkParams<Scalar>::from_flat(net.dim(), flat);
    for (Index j = 0; j < current.pieces(); ++j) {
      const auto sol = detail::domination_program<Scalar>(current, j, nullptr);
      if (sol.optimal() && sol.value <= current.rate(j) + tol) {
        RowMajorMatrix<Scalar> next(flat.rows() - 1, flat.cols());
        next.topRows(j) = flat.topRows(j);
        next.bottomRows(flat.rows() - 1 - j) = flat.bottomRows(flat.rows() - 1 - j);
        flat = std::move(next);
        removed = true;
        break;
      }
    }
  }
  return NetworkParams<Scalar>::from_flat(net.dim(), std::move(flat));
}

/// Convex envelope of the conjugate restricted by a rate budget: minimizes
/// the combined offset over simplex weights matching p whose combined rate
/// stays at or below -rate_bound. Nondecreasing in rate_bound; nullopt when
/// the budget is unattainable.
template <typename Scalar>
std::optional<Scalar> conjugate_envelope(
    const NetworkParams<Scalar>& net,
    const VecCRef<Scalar>& p, Scalar rate_bound) {
  require(p.size() == net.dim(), "dual point dimension mismatch");
  require(p.allFinite() && std::isfinite(rate_bound), "inputs must be finite");
  const Index m = net.pieces();
  const Index n = net.dim();
  // Slack variable turns the rate inequality into an equality row.
  MatrixX<Scalar> a(n + 2, m + 1);
  a.setZero();
  a.row(0).head(m).setOnes();
  a.block(1, 0, n, m) = net.slopes().transpose();
  a.row(n + 1).head(m) = net.rates().transpose();
  a(n + 1, m) = Scalar(1);
  VectorX<Scalar> b(n + 2);
  b(0) = Scalar(1);
  b.segment(1, n) = p;
  b(n + 1) = -rate_bound;
  VectorX<Scalar> cost(m + 1);
  cost.head(m) = net.offsets();
  cost(m) = Scalar(0);
  const auto sol = solve_lp(
      LPProblem<Scalar>::nonnegative(std::move(cost), std::move(a), std::move(b)));
  if (sol.status == LPStatus::Infeasible) return std::nullopt;
  if (sol.status == LPStatus::Unbounded)
    throw std::runtime_error("simplex-constrained program cannot be unbounded");
  return sol.value;
}

}  // namespace hjnet
