#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hjnet/families.hpp"
#include "hjnet/network.hpp"
#include "hjnet/rng.hpp"
#include "oracles.hpp"

using hjnet::Index;
using hjnet::MatrixX;
using hjnet::NetworkParams;
using hjnet::RowMajorMatrix;
using hjnet::VectorX;

namespace {

VectorX<double> vec(std::initializer_list<double> v) {
  VectorX<double> out(Index(v.size()));
  Index i = 0;
  for (const double e : v) out(i++) = e;
  return out;
}

NetworkParams<double> single_piece(std::initializer_list<double> slope,
                                   double rate, double offset) {
  const Index n = Index(slope.size());
  RowMajorMatrix<double> flat(1, n + 2);
  Index c = 0;
  for (const double s : slope) flat(0, c++) = s;
  flat(0, n) = rate;
  flat(0, n + 1) = offset;
  return NetworkParams<double>::from_flat(n, std::move(flat));
}

NetworkParams<double> random_net(hjnet::SplitMix64& rng, Index dim, Index pieces) {
  RowMajorMatrix<double> flat(pieces, dim + 2);
  for (Index i = 0; i < pieces; ++i)
    for (Index c = 0; c < dim + 2; ++c)
      flat(i, c) = 2.0 * rng.next_double() - 1.0;
  return NetworkParams<double>::from_flat(dim, std::move(flat));
}

}  // namespace

TEST_CASE("value matches the l1 closed form") {
  const auto net = hjnet::make_l1_network<double>(2);
  CHECK(hjnet::evaluate(net, vec({0.5, -0.3}), 2.0) == doctest::Approx(2.8).epsilon(1e-14));
}

TEST_CASE("a single piece is exactly affine") {
  const auto net = single_piece({2.0}, 3.0, 1.0);
  CHECK(hjnet::evaluate(net, vec({1.0}), 2.0) == doctest::Approx(-5.0).epsilon(1e-15));
}

TEST_CASE("value agrees with an independent enumeration") {
  hjnet::SplitMix64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto net = random_net(rng, 3, 20);
    VectorX<double> x(3);
    for (Index c = 0; c < 3; ++c) x(c) = 4.0 * rng.next_double() - 2.0;
    const double t = 2.0 * rng.next_double();
    CHECK(hjnet::evaluate(net, x, t) ==
          doctest::Approx(testing_oracles::brute_force_value(net, x, t)).epsilon(1e-13));
  }
}

TEST_CASE("batch evaluation matches single evaluation") {
  hjnet::SplitMix64 rng(42);
  const auto net = random_net(rng, 3, 17);
  const Index count = 40;
  MatrixX<double> points(count, 3);
  VectorX<double> times(count);
  for (Index k = 0; k < count; ++k) {
    for (Index c = 0; c < 3; ++c) points(k, c) = 4.0 * rng.next_double() - 2.0;
    times(k) = rng.next_double();
  }
  const VectorX<double> batch = hjnet::evaluate_many(net, points, times);
  for (Index k = 0; k < count; ++k)
    CHECK(batch(k) ==
          doctest::Approx(hjnet::evaluate<double>(net, points.row(k).transpose(),
                                                  times(k)))
              .epsilon(1e-13));
}

TEST_CASE("initial profile values") {
  const auto net = hjnet::make_l1_network<double>(2);
  CHECK(hjnet::initial_value(net, vec({0.5, -0.3})) == doctest::Approx(0.8));
  CHECK(hjnet::initial_value(net, vec({0.0, 0.0})) == doctest::Approx(0.0));

  const auto mixed = hjnet::make_mixed_norm_network<double>(3);
  CHECK(hjnet::initial_value(mixed, vec({1.0, 1.0, 0.0})) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("argmax sets") {
  const auto net = hjnet::make_l1_network<double>(2);
  // Builder order: piece index i has slope ((i & 1) ? 1 : -1, (i & 2) ? 1 : -1).
  const auto unique = hjnet::argmax_set(net, vec({0.5, -0.3}), 0.0, 1e-12);
  REQUIRE(unique.size() == 1);
  CHECK(unique[0] == 1);

  const auto all = hjnet::argmax_set(net, vec({0.0, 0.0}), 0.0);
  CHECK(all == std::vector<Index>{0, 1, 2, 3});

  RowMajorMatrix<double> flat(2, 3);
  flat << -1.0, -0.5, 0.0, 1.0, -0.5, 0.0;
  const auto pair = NetworkParams<double>::from_flat(1, flat);
  CHECK(hjnet::argmax_set(pair, vec({0.0}), 1.0) == std::vector<Index>{0, 1});
}

TEST_CASE("spatial subdifferential generators") {
  const auto net = hjnet::make_l1_network<double>(2);
  const auto smooth = hjnet::spatial_subdifferential(net, vec({0.5, -0.3}), 1.0);
  REQUIRE(smooth.singleton());
  CHECK(smooth.generators(0, 0) == 1.0);
  CHECK(smooth.generators(0, 1) == -1.0);

  const auto corner = hjnet::spatial_subdifferential(net, vec({0.0, 0.0}), 1.0);
  CHECK(corner.indices.size() == 4);

  const auto riemann = hjnet::make_riemann_network<double>();
  const auto right = hjnet::spatial_subdifferential(riemann, vec({0.5}), 1.0);
  REQUIRE(right.singleton());
  CHECK(right.generators(0, 0) == 1.0);
}

TEST_CASE("smooth evaluation: exact single piece and closed two-piece form") {
  const auto affine = single_piece({1.5, -0.5}, 0.25, -1.0);
  const auto x = vec({0.3, 0.7});
  for (const double eps : {1.0, 1e-3})
    CHECK(hjnet::evaluate_viscous(affine, x, 0.5, eps) ==
          doctest::Approx(hjnet::evaluate(affine, x, 0.5)).epsilon(1e-15));

  RowMajorMatrix<double> flat(2, 3);
  flat << 0.0, 0.0, 0.0, 1.0, -0.5, 0.0;
  const auto net = NetworkParams<double>::from_flat(1, flat);
  CHECK(hjnet::evaluate_viscous(net, vec({0.0}), 0.0, 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("smooth evaluation stays inside the sandwich") {
  const auto net = hjnet::make_l1_network<double>(2);
  const auto x = vec({0.5, -0.3});
  const double exact = hjnet::evaluate(net, x, 2.0);
  CHECK(exact == doctest::Approx(2.8));
  for (const double eps : {1.0, 1e-2, 1e-4}) {
    const double smooth = hjnet::evaluate_viscous(net, x, 2.0, eps);
    CHECK(smooth >= exact);
    CHECK(smooth <= exact + eps * std::log(4.0) + 1e-15);
  }
  // No overflow even for tiny epsilon and widely spread values.
  CHECK(std::isfinite(hjnet::evaluate_viscous(net, vec({100.0, -50.0}), 0.0, 1e-6)));
}

TEST_CASE("multi-time evaluation") {
  hjnet::SplitMix64 rng(7);
  const auto net = random_net(rng, 2, 6);
  const hjnet::MultiTimeNetworkParams<double> single(
      net.slopes(), net.rates(), net.offsets());
  const auto x = vec({0.4, -1.1});
  VectorX<double> one(1);
  one(0) = 0.8;
  CHECK(hjnet::evaluate_multitime(single, x, one) ==
        doctest::Approx(hjnet::evaluate(net, x, 0.8)).epsilon(1e-14));

  VectorX<double> zero = VectorX<double>::Zero(1);
  CHECK(hjnet::evaluate_multitime(single, x, zero) ==
        doctest::Approx(hjnet::initial_value(net, x)).epsilon(1e-14));

  MatrixX<double> slopes(2, 1), rates(2, 2);
  slopes << 0.0, 1.0;
  rates << 0.0, 0.0, 1.0, 2.0;
  VectorX<double> offsets = VectorX<double>::Zero(2);
  const hjnet::MultiTimeNetworkParams<double> two(slopes, rates, offsets);
  VectorX<double> times(2);
  times << 1.0, 1.0;
  CHECK(hjnet::evaluate_multitime(two, vec({3.0}), times) == doctest::Approx(0.0));
}

TEST_CASE("descent step") {
  RowMajorMatrix<double> flat(2, 3);
  flat << -1.0, 0.5, 0.0, 1.0, 0.5, 0.0;
  const auto net = NetworkParams<double>::from_flat(1, flat);
  MatrixX<double> grads(2, 1);
  grads << -1.0, 1.0;  // gradient of p^2/2 at each slope

  CHECK(hjnet::lax_oleinik_step(net, grads, vec({0.7}), 0.0)(0) ==
        doctest::Approx(0.7));
  CHECK(hjnet::lax_oleinik_step(net, grads, vec({2.0}), 1.0)(0) ==
        doctest::Approx(1.0));
  CHECK(hjnet::lax_oleinik_step(net, grads, vec({-2.0}), 1.0)(0) ==
        doctest::Approx(-1.0));

  MatrixX<double> missing(2, 1);
  missing << -1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hjnet::lax_oleinik_step(net, missing, vec({2.0}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("joint convexity in (x, t)") {
  hjnet::SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = random_net(rng, 2, 8);
    VectorX<double> x1(2), x2(2);
    for (Index c = 0; c < 2; ++c) {
      x1(c) = 4.0 * rng.next_double() - 2.0;
      x2(c) = 4.0 * rng.next_double() - 2.0;
    }
    const double t1 = 2.0 * rng.next_double();
    const double t2 = 2.0 * rng.next_double();
    const double lam = rng.next_double();
    const VectorX<double> xm = lam * x1 + (1.0 - lam) * x2;
    const double tm = lam * t1 + (1.0 - lam) * t2;
    CHECK(hjnet::evaluate(net, xm, tm) <=
          lam * hjnet::evaluate(net, x1, t1) +
              (1.0 - lam) * hjnet::evaluate(net, x2, t2) + 1e-12);
  }
}

TEST_CASE("subgradient inequality for every generator") {
  hjnet::SplitMix64 rng(13);
  const auto net = random_net(rng, 3, 12);
  VectorX<double> x(3), y(3);
  for (Index c = 0; c < 3; ++c) x(c) = 2.0 * rng.next_double() - 1.0;
  const double t = rng.next_double();
  const auto sub = hjnet::spatial_subdifferential(net, x, t);
  const double fx = hjnet::evaluate(net, x, t);
  for (int k = 0; k < 100; ++k) {
    for (Index c = 0; c < 3; ++c) y(c) = 6.0 * rng.next_double() - 3.0;
    for (Index g = 0; g < sub.generators.rows(); ++g) {
      const double lower =
          fx + sub.generators.row(g).dot((y - x).transpose()) - 1e-9;
      CHECK(hjnet::evaluate(net, y, t) >= lower);
    }
  }
}

TEST_CASE("time slope at smooth points equals minus the winning rate") {
  hjnet::SplitMix64 rng(17);
  int checked = 0;
  while (checked < 20) {
    const auto net = random_net(rng, 2, 6);
    VectorX<double> x(2);
    for (Index c = 0; c < 2; ++c) x(c) = 2.0 * rng.next_double() - 1.0;
    const double t = 0.1 + rng.next_double();
    const double h = 1e-5;
    const auto lo = hjnet::argmax_set(net, x, t - h, 1e-12);
    const auto hi = hjnet::argmax_set(net, x, t + h, 1e-12);
    if (lo.size() != 1 || hi.size() != 1 || lo[0] != hi[0]) continue;
    const double fd = (hjnet::evaluate(net, x, t + h) -
                       hjnet::evaluate(net, x, t - h)) /
                      (2.0 * h);
    CHECK(fd == doctest::Approx(-net.rate(lo[0])).epsilon(1e-9));
    ++checked;
  }
}

TEST_CASE("piece order does not matter") {
  hjnet::SplitMix64 rng(19);
  const auto net = random_net(rng, 2, 7);
  RowMajorMatrix<double> reversed(net.pieces(), 4);
  for (Index i = 0; i < net.pieces(); ++i)
    reversed.row(i) = net.flat().row(net.pieces() - 1 - i);
  const auto flipped = NetworkParams<double>::from_flat(2, reversed);
  for (int k = 0; k < 20; ++k) {
    VectorX<double> x(2);
    x << 3.0 * rng.next_double() - 1.5, 3.0 * rng.next_double() - 1.5;
    const double t = rng.next_double();
    CHECK(hjnet::evaluate(net, x, t) ==
          doctest::Approx(hjnet::evaluate(flipped, x, t)).epsilon(1e-14));
  }
}

TEST_CASE("query validation") {
  const auto net = hjnet::make_l1_network<double>(2);
  CHECK_THROWS_AS(hjnet::evaluate(net, vec({1.0}), 0.0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(hjnet::evaluate(net, vec({0.0, 0.0}), -0.5),
                       "t must be nonnegative", std::invalid_argument);
  CHECK_THROWS_AS(
      hjnet::evaluate(net, vec({std::nan(""), 0.0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hjnet::evaluate_viscous(net, vec({0.0, 0.0}), 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(hjnet::argmax_set(net, vec({0.0, 0.0}), 1.0, -1.0),
                  std::invalid_argument);
}
