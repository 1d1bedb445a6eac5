#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "hjnet/network.hpp"
#include "hjnet/rng.hpp"

namespace hjnet {

/// Hyperparameters for the mean-square fit of a max-of-affine network to
/// sampled solution data. Defaults follow the reference experiment setup.
/// steps = 0 and learning_rate = 0 are allowed and leave the seeded
/// initialization untouched.
template <typename Scalar = double>
struct TrainConfig {
  Index pieces = 2;
  long steps = 60000;
  Index batch_size = 500;
  Scalar learning_rate = Scalar(1e-4);
  Scalar beta1 = Scalar(0.5);
  Scalar beta2 = Scalar(0.9);
  Scalar adam_epsilon = Scalar(1e-8);
  std::uint64_t seed = 0;
  Index sample_count = 20000;
  Scalar init_scale = Scalar(1);
  long history_stride = 100;
  Index effective_probes = 10000;

  void validate() const {
    require(pieces >= 1, "need at least one piece");
    require(steps >= 0, "steps must be nonnegative");
    require(batch_size >= 1, "batch size must be positive");
    require(beta1 >= Scalar(0) && beta1 < Scalar(1) && beta2 >= Scalar(0) &&
                beta2 < Scalar(1),
            "moment decay rates must lie in [0, 1)");
    require(learning_rate >= Scalar(0), "learning rate must be nonnegative");
    require(adam_epsilon > Scalar(0), "adam epsilon must be positive");
    require(sample_count >= 1, "need at least one training sample");
    require(batch_size <= sample_count, "batch larger than the dataset");
    require(init_scale > Scalar(0), "init scale must be positive");
    require(history_stride >= 1, "history stride must be positive");
    require(effective_probes >= 1, "need at least one probe");
  }
};

/// Sampled (x, t, value) triples with a shared spatial dimension.
template <typename Scalar = double>
struct Dataset {
  MatrixX<Scalar> points;  // one x per row
  VectorX<Scalar> times;
  VectorX<Scalar> values;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  void validate() const {
    require(size() >= 1, "dataset is empty");
    require(times.size() == size() && values.size() == size(),
            "dataset columns must agree in length");
    require(points.allFinite() && times.allFinite() && values.allFinite(),
            "dataset must be finite");
    require(times.minCoeff() >= Scalar(0), "t must be nonnegative");
  }
};

/// Draws `count` samples of the target: x standard normal in `dim`
/// coordinates, t the absolute value of a standard normal, value = truth(x, t).
/// Bitwise reproducible from the seed.
template <typename Scalar, class Truth>
Dataset<Scalar> sample_dataset(Truth&& truth, Index dim, Index count,
                               std::uint64_t seed) {
  require(dim >= 1, "dimension must be positive");
  require(count >= 1, "need at least one sample");
  SplitMix64 rng(seed);
  Dataset<Scalar> data;
  data.points.resize(count, dim);
  data.times.resize(count);
  data.values.resize(count);
  VectorX<Scalar> x(dim);
  for (Index k = 0; k < count; ++k) {
    for (Index c = 0; c < dim; ++c) x(c) = Scalar(rng.next_normal());
    const Scalar t = std::abs(Scalar(rng.next_normal()));
    data.points.row(k) = x.transpose();
    data.times(k) = t;
    data.values(k) = truth(x, t);
  }
  data.validate();
  return data;
}

/// Mean squared residual of the network against the dataset.
template <typename Scalar>
Scalar loss(const NetworkParams<Scalar>& net, const Dataset<Scalar>& data) {
  data.validate();
  require(data.dim() == net.dim(), "dataset dimension mismatch");
  const VectorX<Scalar> fitted = evaluate_many(net, data.points, data.times);
  return (fitted - data.values).squaredNorm() / Scalar(data.size());
}

/// Subgradient of the mean-square loss in the flat parameter layout
/// (rows = [d/slope | d/rate | d/offset]). Per sample only the tie-selected
/// maximizing piece j receives the contribution 2 (f - value) / N times
/// (x, -t, -1).
template <typename Scalar>
RowMajorMatrix<Scalar> loss_gradient(const NetworkParams<Scalar>& net,
                                     const Dataset<Scalar>& batch,
                                     TieRule tie = TieRule::LowestIndex) {
  batch.validate();
  require(batch.dim() == net.dim(), "dataset dimension mismatch");
  const Index n = net.dim();
  const Index m = net.pieces();
  RowMajorMatrix<Scalar> grad = RowMajorMatrix<Scalar>::Zero(m, n + 2);
  const Scalar coeff = Scalar(2) / Scalar(batch.size());
  for (Index k = 0; k < batch.size(); ++k) {
    const auto x = batch.points.row(k).transpose();
    const Scalar t = batch.times(k);
    Index winner = 0;
    Scalar best = std::numeric_limits<Scalar>::lowest();
    for (Index i = 0; i < m; ++i) {
      const Scalar v = net.slope(i).dot(x) - t * net.rate(i) - net.offset(i);
      const bool take = (tie == TieRule::LowestIndex) ? (v > best) : (v >= best);
      if (take) {
        best = v;
        winner = i;
      }
    }
    const Scalar r = coeff * (best - batch.values(k));
    grad.row(winner).head(n) += r * batch.points.row(k);
    grad(winner, n) -= r * t;
    grad(winner, n + 1) -= r;
  }
  return grad;
}

/// Result of a training run: the fitted parameters, the full-data loss
/// recorded at step 0, every history_stride steps and at the final step, and
/// the pieces that attain the maximum somewhere over the probe distribution.
template <typename Scalar = double>
struct TrainRun {
  NetworkParams<Scalar> final_params;
  std::vector<std::pair<long, Scalar>> loss_history;
  std::vector<Index> effective_indices;
};

/// Pieces that win the maximum at any of `probes` points drawn like the
/// training distribution. Ascending; grows monotonically with the probe
/// count for a fixed seed.
template <typename Scalar>
std::vector<Index> effective_neurons(const NetworkParams<Scalar>& net,
                                     Index probes, std::uint64_t seed) {
  require(probes >= 1, "need at least one probe");
  SplitMix64 rng(seed);
  std::vector<char> hit(std::size_t(net.pieces()), 0);
  VectorX<Scalar> x(net.dim());
  for (Index k = 0; k < probes; ++k) {
    for (Index c = 0; c < net.dim(); ++c) x(c) = Scalar(rng.next_normal());
    const Scalar t = std::abs(Scalar(rng.next_normal()));
    for (const Index i : argmax_set(net, x, t)) hit[std::size_t(i)] = 1;
  }
  std::vector<Index> out;
  for (Index i = 0; i < net.pieces(); ++i)
    if (hit[std::size_t(i)]) out.push_back(i);
  return out;
}

/// Adam descent on the mean-square loss from a seeded normal initialization.
/// Identical config and data produce an identical run.
template <typename Scalar>
TrainRun<Scalar> train(const TrainConfig<Scalar>& config,
                       const Dataset<Scalar>& data) {
  config.validate();
  data.validate();
  require(config.batch_size <= data.size(), "batch larger than the dataset");
  const Index n = data.dim();
  const Index m = config.pieces;

  SplitMix64 root(config.seed);
  SplitMix64 init_rng = root.split(0);
  SplitMix64 batch_rng = root.split(1);
  const std::uint64_t probe_seed = root.split(2).state();

  RowMajorMatrix<Scalar> flat(m, n + 2);
  for (Index i = 0; i < m; ++i)
    for (Index c = 0; c < n + 2; ++c)
      flat(i, c) = config.init_scale * Scalar(init_rng.next_normal());

  TrainRun<Scalar> run{NetworkParams<Scalar>::from_flat(n, flat), {}, {}};
  run.loss_history.emplace_back(0, loss(run.final_params, data));

  RowMajorMatrix<Scalar> m1 = RowMajorMatrix<Scalar>::Zero(m, n + 2);
  RowMajorMatrix<Scalar> m2 = RowMajorMatrix<Scalar>::Zero(m, n + 2);
  Dataset<Scalar> batch;
  batch.points.resize(config.batch_size, n);
  batch.times.resize(config.batch_size);
  batch.values.resize(config.batch_size);

  for (long step = 1; step <= config.steps; ++step) {
    for (Index b = 0; b < config.batch_size; ++b) {
      const Index pick = Index(batch_rng.next_u64() % std::uint64_t(data.size()));
      batch.points.row(b) = data.points.row(pick);
      batch.times(b) = data.times(pick);
      batch.values(b) = data.values(pick);
    }
    const auto net = NetworkParams<Scalar>::from_flat(n, flat);
    const RowMajorMatrix<Scalar> grad = loss_gradient(net, batch);

    m1 = config.beta1 * m1 + (1 - config.beta1) * grad;
    m2.array() =
        config.beta2 * m2.array() + (1 - config.beta2) * grad.array().square();
    const Scalar c1 = 1 - std::pow(config.beta1, Scalar(step));
    const Scalar c2 = 1 - std::pow(config.beta2, Scalar(step));
    flat.array() -= config.learning_rate * (m1.array() / c1) /
                    ((m2.array() / c2).sqrt() + config.adam_epsilon);

    if (step % config.history_stride == 0 || step == config.steps) {
      run.loss_history.emplace_back(
          step, loss(NetworkParams<Scalar>::from_flat(n, flat), data));
    }
  }
  run.final_params = NetworkParams<Scalar>::from_flat(n, flat);
  run.effective_indices =
      effective_neurons(run.final_params, config.effective_probes, probe_seed);
  return run;
}

/// Relative mean-square errors between two parameter sets after sorting both
/// into the canonical order (lexicographic on the slope, ties by rate then
/// offset). A zero denominator switches that entry to the absolute mean
/// square error, flagged by the matching bool.
template <typename Scalar = double>
struct ParameterMetrics {
  Scalar slopes_error;
  Scalar rates_error;
  Scalar offsets_error;
  bool slopes_absolute = false;
  bool rates_absolute = false;
  bool offsets_absolute = false;
};

namespace detail {

template <typename Scalar>
std::vector<Index> canonical_order(const NetworkParams<Scalar>& net) {
  std::vector<Index> order(std::size_t(net.pieces()));
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&net](Index a, Index b) {
    for (Index c = 0; c < net.dim(); ++c) {
      if (net.slope(a)(c) != net.slope(b)(c))
        return net.slope(a)(c) < net.slope(b)(c);
    }
    if (net.rate(a) != net.rate(b)) return net.rate(a) < net.rate(b);
    return net.offset(a) < net.offset(b);
  });
  return order;
}

}  // namespace detail

template <typename Scalar>
ParameterMetrics<Scalar> parameter_metrics(const NetworkParams<Scalar>& fitted,
                                           const NetworkParams<Scalar>& truth) {
  require(fitted.pieces() == truth.pieces() && fitted.dim() == truth.dim(),
          "parameter sets must agree in shape");
  const auto a = detail::canonical_order(fitted);
  const auto b = detail::canonical_order(truth);
  const Index m = fitted.pieces();

  Scalar num_s = 0, den_s = 0, num_r = 0, den_r = 0, num_o = 0, den_o = 0;
  for (Index k = 0; k < m; ++k) {
    const Index i = a[std::size_t(k)];
    const Index j = b[std::size_t(k)];
    num_s += (fitted.slope(i) - truth.slope(j)).squaredNorm();
    den_s += truth.slope(j).squaredNorm();
    num_r += (fitted.rate(i) - truth.rate(j)) * (fitted.rate(i) - truth.rate(j));
    den_r += truth.rate(j) * truth.rate(j);
    num_o += (fitted.offset(i) - truth.offset(j)) *
             (fitted.offset(i) - truth.offset(j));
    den_o += truth.offset(j) * truth.offset(j);
  }
  ParameterMetrics<Scalar> out;
  out.slopes_absolute = den_s == Scalar(0);
  out.rates_absolute = den_r == Scalar(0);
  out.offsets_absolute = den_o == Scalar(0);
  out.slopes_error = out.slopes_absolute ? num_s / Scalar(m) : num_s / den_s;
  out.rates_error = out.rates_absolute ? num_r / Scalar(m) : num_r / den_r;
  out.offsets_error = out.offsets_absolute ? num_o / Scalar(m) : num_o / den_o;
  return out;
}

/// The fitted initial profile as a callable closure over the network.
template <typename Scalar>
std::function<Scalar(const Eigen::Ref<const VectorX<Scalar>>&)> recovered_initial(
    NetworkParams<Scalar> net) {
  return [net = std::move(net)](const Eigen::Ref<const VectorX<Scalar>>& x) {
    return initial_value(net, x);
  };
}

/// Relative mean-square error of the fitted initial profile against a truth
/// profile on a seeded standard-normal test set (absolute error per point
/// when the truth vanishes identically on the set).
template <typename Scalar, class TruthInitial>
Scalar initial_error(const NetworkParams<Scalar>& net, TruthInitial&& truth,
                     std::uint64_t seed, Index count = 2000) {
  require(count >= 1, "need at least one test point");
  SplitMix64 rng(seed);
  VectorX<Scalar> x(net.dim());
  Scalar num = 0, den = 0;
  for (Index k = 0; k < count; ++k) {
    for (Index c = 0; c < net.dim(); ++c) x(c) = Scalar(rng.next_normal());
    const Scalar fitted = initial_value(net, x);
    const Scalar exact = truth(x);
    num += (fitted - exact) * (fitted - exact);
    den += exact * exact;
  }
  return den > Scalar(0) ? num / den : num / Scalar(count);
}

}  // namespace hjnet
