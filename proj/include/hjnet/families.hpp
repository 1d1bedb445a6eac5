#pragma once

#include <cmath>

#include "hjnet/network.hpp"

namespace hjnet {

/// Exactly representable reference solutions. Each builder returns the
/// parameter set whose network equals the named closed form for all x and
/// t >= 0; the closed forms themselves are provided alongside for
/// cross-checking.

/// All sign patterns in `dim` coordinates, rate -dim/2, offset 0. The network
/// equals |x|_1 + dim * t / 2.
template <typename Scalar = double>
NetworkParams<Scalar> make_l1_network(Index dim) {
  require(dim >= 1 && dim <= 24, "dimension out of range");
  const Index m = Index(1) << dim;
  RowMajorMatrix<Scalar> flat(m, dim + 2);
  for (Index i = 0; i < m; ++i) {
    for (Index c = 0; c < dim; ++c)
      flat(i, c) = ((i >> c) & 1) ? Scalar(1) : Scalar(-1);
    flat(i, dim) = -Scalar(dim) / 2;
    flat(i, dim + 1) = Scalar(0);
  }
  return NetworkParams<Scalar>::from_flat(dim, std::move(flat));
}

template <typename Derived>
typename Derived::Scalar l1_solution(const Eigen::MatrixBase<Derived>& x,
                                     typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  return x.template lpNorm<1>() + Scalar(x.size()) * t / 2;
}

/// Plus and minus every coordinate direction, rate -dim/2, offset 0. The
/// network equals |x|_inf + dim * t / 2.
template <typename Scalar = double>
NetworkParams<Scalar> make_linf_network(Index dim) {
  require(dim >= 1, "dimension out of range");
  const Index m = 2 * dim;
  RowMajorMatrix<Scalar> flat = RowMajorMatrix<Scalar>::Zero(m, dim + 2);
  for (Index c = 0; c < dim; ++c) {
    flat(2 * c, c) = Scalar(1);
    flat(2 * c + 1, c) = Scalar(-1);
  }
  flat.col(dim).setConstant(-Scalar(dim) / 2);
  return NetworkParams<Scalar>::from_flat(dim, std::move(flat));
}

template <typename Derived>
typename Derived::Scalar linf_solution(const Eigen::MatrixBase<Derived>& x,
                                       typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  return x.template lpNorm<Eigen::Infinity>() + Scalar(x.size()) * t / 2;
}

/// The 2 * dim + 5 piece family whose initial profile is
/// max(|x|_inf, (|x_1| + |x_2|) / sqrt(2)) and whose rates equal the l1 norm
/// of each slope: +/- every coordinate direction with rate 1, the zero slope
/// with rate 0, and the four diagonal directions (+-1, +-1) / sqrt(2) in the
/// first two coordinates with rate sqrt(2). Offsets all vanish.
template <typename Scalar = double>
NetworkParams<Scalar> make_mixed_norm_network(Index dim) {
  require(dim >= 2, "needs at least two coordinates");
  const Index m = 2 * dim + 5;
  const Scalar root_half = Scalar(1) / std::sqrt(Scalar(2));
  RowMajorMatrix<Scalar> flat = RowMajorMatrix<Scalar>::Zero(m, dim + 2);
  for (Index c = 0; c < dim; ++c) {
    flat(2 * c, c) = Scalar(1);
    flat(2 * c + 1, c) = Scalar(-1);
    flat(2 * c, dim) = Scalar(1);
    flat(2 * c + 1, dim) = Scalar(1);
  }
  // Row 2 * dim stays the zero slope with rate 0.
  Index row = 2 * dim + 1;
  for (const Scalar s1 : {Scalar(1), Scalar(-1)}) {
    for (const Scalar s2 : {Scalar(1), Scalar(-1)}) {
      flat(row, 0) = s1 * root_half;
      flat(row, 1) = s2 * root_half;
      flat(row, dim) = std::sqrt(Scalar(2));
      ++row;
    }
  }
  return NetworkParams<Scalar>::from_flat(dim, std::move(flat));
}

template <typename Derived>
typename Derived::Scalar mixed_norm_initial(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar diag =
      (std::abs(x(0)) + std::abs(x(1))) / std::sqrt(Scalar(2));
  return std::max<Scalar>(x.template lpNorm<Eigen::Infinity>(), diag);
}

/// One-dimensional net with `pieces` slopes on the uniform grid of [lo, hi],
/// rates and offsets sampled from the given callables.
template <typename Scalar, class RateFn, class OffsetFn>
NetworkParams<Scalar> make_uniform_slope_network(Index pieces, Scalar lo,
                                                 Scalar hi, RateFn&& rate,
                                                 OffsetFn&& offset) {
  require(pieces >= 2 && lo < hi, "need at least two slopes on a real interval");
  RowMajorMatrix<Scalar> flat(pieces, 3);
  for (Index i = 0; i < pieces; ++i) {
    const Scalar p = lo + (hi - lo) * Scalar(i) / Scalar(pieces - 1);
    flat(i, 0) = p;
    flat(i, 1) = rate(p);
    flat(i, 2) = offset(p);
  }
  return NetworkParams<Scalar>::from_flat(1, std::move(flat));
}

/// Two-piece net with slopes -1 and 1, rate -1/2, offset 0: its profile is
/// the standing jump from -1 to 1 at the origin.
template <typename Scalar = double>
NetworkParams<Scalar> make_riemann_network() {
  RowMajorMatrix<Scalar> flat(2, 3);
  flat << Scalar(-1), Scalar(-0.5), Scalar(0), Scalar(1), Scalar(-0.5), Scalar(0);
  return NetworkParams<Scalar>::from_flat(1, std::move(flat));
}

}  // namespace hjnet
