#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace hjnet {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMajorMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Argument aliases for free functions: the nested type_identity keeps Scalar
// deduction anchored on the network argument, so plain vectors and matrices
// convert to Ref as usual.
template <typename Scalar>
using VecCRef = Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>;
template <typename Scalar>
using MatCRef = Eigen::Ref<const MatrixX<std::type_identity_t<Scalar>>>;

inline void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

/// Selection rule when several affine pieces attain the maximum.
enum class TieRule { LowestIndex, HighestIndex };

/// Parameters of a max-of-affine network in `dim` spatial variables plus one
/// time variable. Piece i evaluates to <slope_i, x> - t * rate_i - offset_i
/// and the network takes the pointwise maximum over all pieces.
///
/// Storage is one flat row-major array with one row per piece, laid out as
/// [slope (dim entries) | rate | offset], so a full evaluation is a single
/// cache-friendly scan.
///
/// Construction only checks shapes and finiteness. Distinctness of the
/// slopes and the structural assumptions behind the PDE identities are not
/// enforced here (raw parameter sets occur during training); use
/// `check_assumptions` to verify them.
template <typename Scalar = double>
class NetworkParams {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  NetworkParams(const Eigen::Ref<const MatrixX<Scalar>>& slopes,
                const Eigen::Ref<const VectorX<Scalar>>& rates,
                const Eigen::Ref<const VectorX<Scalar>>& offsets) {
    const Index m = slopes.rows();
    const Index n = slopes.cols();
    require(m >= 1, "network needs at least one piece");
    require(n >= 1, "network needs at least one spatial dimension");
    require(rates.size() == m && offsets.size() == m,
            "slopes, rates and offsets must agree on the piece count");
    data_.resize(m, n + 2);
    data_.leftCols(n) = slopes;
    data_.col(n) = rates;
    data_.col(n + 1) = offsets;
    require(data_.allFinite(), "network parameters must be finite");
  }

  /// Adopts a preassembled flat layout (rows = [slope | rate | offset]).
  static NetworkParams from_flat(Index dim, RowMajorMatrix<Scalar> flat) {
    require(dim >= 1 && flat.cols() == dim + 2 && flat.rows() >= 1,
            "flat parameter block has the wrong shape");
    require(flat.allFinite(), "network parameters must be finite");
    return NetworkParams(dim, std::move(flat));
  }

  Index dim() const { return data_.cols() - 2; }
  Index pieces() const { return data_.rows(); }

  auto slopes() const { return data_.leftCols(dim()); }
  auto rates() const { return data_.col(dim()); }
  auto offsets() const { return data_.col(dim() + 1); }

  auto slope(Index i) const { return data_.row(i).head(dim()); }
  Scalar rate(Index i) const { return data_(i, dim()); }
  Scalar offset(Index i) const { return data_(i, dim() + 1); }

  const RowMajorMatrix<Scalar>& flat() const { return data_; }

  bool operator==(const NetworkParams& other) const {
    return data_.rows() == other.data_.rows() &&
           data_.cols() == other.data_.cols() && data_ == other.data_;
  }

 private:
  NetworkParams(Index, RowMajorMatrix<Scalar> flat) : data_(std::move(flat)) {}

  RowMajorMatrix<Scalar> data_;
};

namespace detail {

template <typename Scalar>
void check_query(const NetworkParams<Scalar>& net,
                 const VecCRef<Scalar>& x, Scalar t) {
  require(x.size() == net.dim(), "query dimension mismatch");
  require(x.allFinite() && std::isfinite(t), "query must be finite");
  require(t >= Scalar(0), "t must be nonnegative");
}

}  // namespace detail

/// Value of the network at (x, t): the maximum over all affine pieces.
/// O(pieces * dim), no temporary proportional to the piece count.
template <typename Scalar>
Scalar evaluate(const NetworkParams<Scalar>& net,
                const VecCRef<Scalar>& x, Scalar t) {
  detail::check_query(net, x, t);
  Scalar best = std::numeric_limits<Scalar>::lowest();
  for (Index i = 0; i < net.pieces(); ++i) {
    const Scalar v = net.slope(i).dot(x) - t * net.rate(i) - net.offset(i);
    if (v > best) best = v;
  }
  return best;
}

/// Initial profile: the network at t = 0.
template <typename Scalar>
Scalar initial_value(const NetworkParams<Scalar>& net,
                     const VecCRef<Scalar>& x) {
  return evaluate(net, x, Scalar(0));
}

/// Batch evaluation, one value per row of `points`. Internally blocks the
/// slope/point product so large networks stream through the cache once per
/// block instead of once per point.
template <typename Scalar>
VectorX<Scalar> evaluate_many(const NetworkParams<Scalar>& net,
                              const MatCRef<Scalar>& points,
                              const VecCRef<Scalar>& times) {
  const Index count = points.rows();
  require(points.cols() == net.dim(), "query dimension mismatch");
  require(times.size() == count, "one time per query point required");
  require(points.allFinite() && times.allFinite(), "query must be finite");
  require(count == 0 || times.minCoeff() >= Scalar(0), "t must be nonnegative");

  const Index m = net.pieces();
  VectorX<Scalar> out(count);
  // Cap the value block at ~32 MB so the product never outgrows memory.
  const Index block = std::clamp<Index>((Index(1) << 22) / m, 1,
                                        std::max<Index>(count, 1));
  MatrixX<Scalar> vals;
  for (Index start = 0; start < count; start += block) {
    const Index c = std::min(block, count - start);
    vals.noalias() = net.slopes() * points.middleRows(start, c).transpose();
    for (Index k = 0; k < c; ++k) {
      out(start + k) =
          (vals.col(k) - times(start + k) * net.rates() - net.offsets())
              .maxCoeff();
    }
  }
  return out;
}

/// Default membership tolerance for the argmax set: relative to the size of
/// the maximum so ties at cell boundaries survive floating-point noise.
template <typename Scalar>
Scalar default_argmax_tol(Scalar max_value) {
  return Scalar(1e-9) * (Scalar(1) + std::abs(max_value));
}

/// Indices of every piece whose value at (x, t) lies within `tol` of the
/// maximum, in ascending order (never empty).
template <typename Scalar>
std::vector<Index> argmax_set(const NetworkParams<Scalar>& net,
                              const VecCRef<Scalar>& x,
                              Scalar t, Scalar tol) {
  detail::check_query(net, x, t);
  require(tol >= Scalar(0), "tolerance must be nonnegative");
  VectorX<Scalar> vals =
      net.slopes() * x - t * net.rates() - net.offsets();
  const Scalar best = vals.maxCoeff();
  std::vector<Index> out;
  for (Index i = 0; i < vals.size(); ++i)
    if (vals(i) >= best - tol) out.push_back(i);
  return out;
}

template <typename Scalar>
std::vector<Index> argmax_set(const NetworkParams<Scalar>& net,
                              const VecCRef<Scalar>& x,
                              Scalar t) {
  detail::check_query(net, x, t);
  VectorX<Scalar> vals =
      net.slopes() * x - t * net.rates() - net.offsets();
  const Scalar best = vals.maxCoeff();
  const Scalar tol = default_argmax_tol(best);
  std::vector<Index> out;
  for (Index i = 0; i < vals.size(); ++i)
    if (vals(i) >= best - tol) out.push_back(i);
  return out;
}

/// Spatial subdifferential of the network at (x, t): the generating slopes of
/// the maximizing pieces (the subdifferential itself is their convex hull).
/// A single generator means the network is differentiable there.
template <typename Scalar>
struct Subdifferential {
  MatrixX<Scalar> generators;  // one generator per row
  std::vector<Index> indices;  // maximizing piece per generator, ascending

  bool singleton() const { return indices.size() == 1; }
};

template <typename Scalar>
Subdifferential<Scalar> spatial_subdifferential(
    const NetworkParams<Scalar>& net,
    const VecCRef<Scalar>& x, Scalar t, Scalar tol) {
  Subdifferential<Scalar> sub;
  sub.indices = argmax_set(net, x, t, tol);
  sub.generators.resize(Index(sub.indices.size()), net.dim());
  for (std::size_t k = 0; k < sub.indices.size(); ++k)
    sub.generators.row(Index(k)) = net.slope(sub.indices[k]);
  return sub;
}

template <typename Scalar>
Subdifferential<Scalar> spatial_subdifferential(
    const NetworkParams<Scalar>& net,
    const VecCRef<Scalar>& x, Scalar t) {
  Subdifferential<Scalar> sub;
  sub.indices = argmax_set(net, x, t);
  sub.generators.resize(Index(sub.indices.size()), net.dim());
  for (std::size_t k = 0; k < sub.indices.size(); ++k)
    sub.generators.row(Index(k)) = net.slope(sub.indices[k]);
  return sub;
}

/// Smooth variant: epsilon * log sum_i exp(piece_i / epsilon), evaluated with
/// the max-shift so no finite input overflows. Sandwiched between the exact
/// maximum and the maximum plus epsilon * log(pieces).
template <typename Scalar>
Scalar evaluate_viscous(const NetworkParams<Scalar>& net,
                        const VecCRef<Scalar>& x, Scalar t,
                        Scalar epsilon) {
  detail::check_query(net, x, t);
  require(epsilon > Scalar(0), "epsilon must be positive");
  Scalar best = std::numeric_limits<Scalar>::lowest();
  for (Index i = 0; i < net.pieces(); ++i) {
    const Scalar v = net.slope(i).dot(x) - t * net.rate(i) - net.offset(i);
    if (v > best) best = v;
  }
  Scalar sum = Scalar(0);
  for (Index i = 0; i < net.pieces(); ++i) {
    const Scalar v = net.slope(i).dot(x) - t * net.rate(i) - net.offset(i);
    sum += std::exp((v - best) / epsilon);
  }
  return best + epsilon * std::log(sum);
}

/// Max-of-affine network with several time variables: piece i evaluates to
/// <slope_i, x> - sum_j times_j * rate_ij - offset_i.
template <typename Scalar = double>
class MultiTimeNetworkParams {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  MultiTimeNetworkParams(const Eigen::Ref<const MatrixX<Scalar>>& slopes,
                         const Eigen::Ref<const MatrixX<Scalar>>& rates,
                         const Eigen::Ref<const VectorX<Scalar>>& offsets)
      : slopes_(slopes), rates_(rates), offsets_(offsets) {
    require(slopes_.rows() >= 1 && slopes_.cols() >= 1,
            "network needs at least one piece and one spatial dimension");
    require(rates_.rows() == slopes_.rows() && offsets_.size() == slopes_.rows(),
            "slopes, rates and offsets must agree on the piece count");
    require(rates_.cols() >= 1, "at least one time axis required");
    require(slopes_.allFinite() && rates_.allFinite() && offsets_.allFinite(),
            "network parameters must be finite");
  }

  Index dim() const { return slopes_.cols(); }
  Index pieces() const { return slopes_.rows(); }
  Index time_axes() const { return rates_.cols(); }

  const MatrixX<Scalar>& slopes() const { return slopes_; }
  const MatrixX<Scalar>& rates() const { return rates_; }
  const VectorX<Scalar>& offsets() const { return offsets_; }

 private:
  MatrixX<Scalar> slopes_;
  MatrixX<Scalar> rates_;
  VectorX<Scalar> offsets_;
};

template <typename Scalar>
Scalar evaluate_multitime(const MultiTimeNetworkParams<Scalar>& net,
                          const VecCRef<Scalar>& x,
                          const VecCRef<Scalar>& times) {
  require(x.size() == net.dim(), "query dimension mismatch");
  require(times.size() == net.time_axes(), "one value per time axis required");
  require(x.allFinite() && times.allFinite(), "query must be finite");
  require(times.minCoeff() >= Scalar(0), "t must be nonnegative");
  Scalar best = std::numeric_limits<Scalar>::lowest();
  for (Index i = 0; i < net.pieces(); ++i) {
    const Scalar v = net.slopes().row(i).dot(x) -
                     net.rates().row(i).dot(times) - net.offsets()(i);
    if (v > best) best = v;
  }
  return best;
}

/// One step of the descent map u = x - t * gH(slope_j), where j is the
/// maximizing piece at (x, t) chosen by `tie` and gH tabulates the Hamiltonian
/// gradient at every slope (row i belongs to piece i). Rows with non-finite
/// entries count as missing.
template <typename Scalar>
VectorX<Scalar> lax_oleinik_step(
    const NetworkParams<Scalar>& net,
    const MatCRef<Scalar>& hamiltonian_gradients,
    const VecCRef<Scalar>& x, Scalar t,
    TieRule tie = TieRule::LowestIndex) {
  detail::check_query(net, x, t);
  require(hamiltonian_gradients.rows() == net.pieces() &&
              hamiltonian_gradients.cols() == net.dim(),
          "missing gradient entry: table must be pieces x dim");
  const std::vector<Index> winners = argmax_set(net, x, t);
  const Index j = (tie == TieRule::LowestIndex) ? winners.front() : winners.back();
  require(hamiltonian_gradients.row(j).allFinite(),
          "missing gradient entry for the selected piece");
  return x - t * hamiltonian_gradients.row(j).transpose();
}

}  // namespace hjnet
