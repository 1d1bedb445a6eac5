#pragma once

// Test-only references. Everything here recomputes results through a route
// independent of the library implementation it is used to check.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hjnet/network.hpp"
#include "hjnet/rng.hpp"

namespace testing_oracles {

using hjnet::Index;
using hjnet::MatrixX;
using hjnet::NetworkParams;
using hjnet::RowMajorMatrix;
using hjnet::VectorX;

/// Plain double loop over pieces and coordinates, no Eigen reductions.
inline double brute_force_value(const NetworkParams<double>& net,
                                const VectorX<double>& x, double t) {
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < net.pieces(); ++i) {
    double v = -t * net.rate(i) - net.offset(i);
    for (Index c = 0; c < net.dim(); ++c) v += net.slope(i)(c) * x(c);
    if (v > best) best = v;
  }
  return best;
}

/// Minimum of <c, x> over {A x = b, x >= 0} by enumerating basic feasible
/// points (all size-rank column subsets). Returns nullopt when infeasible.
/// Only suitable for tiny instances with full row rank.
inline std::optional<double> brute_force_lp(const VectorX<double>& c,
                                            const MatrixX<double>& a,
                                            const VectorX<double>& b) {
  const Index rows = a.rows();
  const Index cols = a.cols();
  std::optional<double> best;
  std::vector<Index> subset(static_cast<std::size_t>(rows));

  const std::function<void(Index, Index)> recurse = [&](Index start, Index depth) {
    if (depth == rows) {
      MatrixX<double> basis(rows, rows);
      for (Index k = 0; k < rows; ++k) basis.col(k) = a.col(subset[std::size_t(k)]);
      const Eigen::FullPivLU<MatrixX<double>> lu(basis);
      if (!lu.isInvertible()) return;
      const VectorX<double> xb = lu.solve(b);
      if ((xb.array() < -1e-9).any()) return;
      if ((basis * xb - b).cwiseAbs().maxCoeff() > 1e-8) return;
      double value = 0;
      for (Index k = 0; k < rows; ++k)
        value += c(subset[std::size_t(k)]) * std::max(xb(k), 0.0);
      if (!best || value < *best) best = value;
      return;
    }
    for (Index j = start; j < cols; ++j) {
      subset[std::size_t(depth)] = j;
      recurse(j + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

/// sup over a 1D grid of <p, x> - J(x) with J evaluated at t = 0.
inline double grid_sup_conjugate(const NetworkParams<double>& net, double p,
                                 double lo, double hi, double step) {
  double best = -std::numeric_limits<double>::infinity();
  VectorX<double> x(1);
  for (double v = lo; v <= hi + step / 2; v += step) {
    x(0) = v;
    best = std::max(best, p * v - brute_force_value(net, x, 0.0));
  }
  return best;
}

/// Random parameter set built to satisfy the structural assumptions: slopes
/// i.i.d. uniform, offsets on a convex quadratic and rates on a strictly
/// convex quadratic (so no piece is dominated).
inline NetworkParams<double> random_structured_network(hjnet::SplitMix64& rng,
                                                       Index dim, Index pieces) {
  const auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * rng.next_double();
  };
  VectorX<double> offset_lin(dim), rate_lin(dim);
  for (Index c = 0; c < dim; ++c) {
    offset_lin(c) = uniform(-0.5, 0.5);
    rate_lin(c) = uniform(-0.5, 0.5);
  }
  const double offset_quad = uniform(0.3, 1.5);
  const double rate_quad = uniform(0.3, 1.5);
  const double rate_shift = uniform(-1.0, 1.0);

  RowMajorMatrix<double> flat(pieces, dim + 2);
  for (Index i = 0; i < pieces; ++i) {
    VectorX<double> p(dim);
    for (Index c = 0; c < dim; ++c) p(c) = uniform(-1.0, 1.0);
    flat.row(i).head(dim) = p.transpose();
    flat(i, dim) = rate_quad * p.squaredNorm() + rate_lin.dot(p) + rate_shift;
    flat(i, dim + 1) = offset_quad * p.squaredNorm() + offset_lin.dot(p);
  }
  return NetworkParams<double>::from_flat(dim, std::move(flat));
}

}  // namespace testing_oracles
