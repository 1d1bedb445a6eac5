#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hjnet/convex.hpp"

namespace hjnet {

/// Uniform 1D grid of `cells` cells on [lo, hi]; values live at cell centers.
template <typename Scalar = double>
struct Grid1D {
  Scalar lo;
  Scalar hi;
  Index cells;

  void validate() const {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
            "grid interval must be finite and nonempty");
    require(cells >= 2, "grid needs at least two cells");
  }
  Scalar h() const { return (hi - lo) / Scalar(cells); }
  Scalar center(Index i) const { return lo + (Scalar(i) + Scalar(0.5)) * h(); }
};

/// Brute-force variational maximum over an explicit dual grid:
///   max over rows p with finite j_star(p) of <p, x> - t * h_tilde(p) - j_star(p).
/// Returns nullopt when no grid point has a finite conjugate value.
template <typename Scalar, class JStar, class HTilde>
std::optional<Scalar> hopf_bruteforce(JStar&& j_star, HTilde&& h_tilde,
                                      const MatCRef<Scalar>& p_grid,
                                      const VecCRef<Scalar>& x,
                                      std::type_identity_t<Scalar> t) {
  require(p_grid.rows() >= 1, "empty dual grid");
  require(p_grid.cols() == x.size(), "dual grid dimension mismatch");
  require(t >= Scalar(0), "t must be nonnegative");
  bool any = false;
  Scalar best = std::numeric_limits<Scalar>::lowest();
  for (Index g = 0; g < p_grid.rows(); ++g) {
    const auto p = p_grid.row(g).transpose();
    const std::optional<Scalar> conj = j_star(p);
    if (!conj) continue;
    const Scalar v = p.dot(x) - t * h_tilde(p) - *conj;
    if (!any || v > best) best = v;
    any = true;
  }
  if (!any) return std::nullopt;
  return best;
}

/// Conjugate and minimal-Hamiltonian values tabulated on a uniform grid over
/// the bounding box of the slopes (with the slopes appended as extra rows so
/// the exact generators are always present). Points outside the conjugate's
/// domain carry NaN.
template <typename Scalar = double>
struct DualTable {
  MatrixX<Scalar> points;
  VectorX<Scalar> conjugate;
  VectorX<Scalar> hamiltonian;
  std::vector<Index> counts;  // uniform grid extent per axis (odometer order)
  Scalar step = Scalar(0);
  Index grid_total = 0;  // leading rows on the uniform grid; the rest are slopes
};

template <typename Scalar>
DualTable<Scalar> tabulate_dual(const NetworkParams<Scalar>& net, Scalar step,
                                bool append_slopes = true) {
  require(step > Scalar(0), "grid step must be positive");
  const Index n = net.dim();
  VectorX<Scalar> lo = net.slopes().colwise().minCoeff();
  VectorX<Scalar> hi = net.slopes().colwise().maxCoeff();
  std::vector<Index> counts(static_cast<std::size_t>(n));
  Index total = 1;
  for (Index k = 0; k < n; ++k) {
    counts[std::size_t(k)] =
        Index(std::floor(double((hi(k) - lo(k)) / step))) + 1;
    total *= counts[std::size_t(k)];
  }
  require(total <= Index(4) << 20, "dual grid too large");

  DualTable<Scalar> table;
  table.counts = counts;
  table.step = step;
  table.grid_total = total;
  const Index rows = total + (append_slopes ? net.pieces() : 0);
  table.points.resize(rows, n);
  table.conjugate.resize(rows);
  table.hamiltonian.resize(rows);

  std::vector<Index> idx(std::size_t(n), 0);
  VectorX<Scalar> p(n);
  for (Index g = 0; g < total; ++g) {
    for (Index k = 0; k < n; ++k)
      p(k) = std::min(lo(k) + Scalar(idx[std::size_t(k)]) * step, hi(k));
    table.points.row(g) = p.transpose();
    for (Index k = n - 1; k >= 0; --k) {
      if (++idx[std::size_t(k)] < counts[std::size_t(k)]) break;
      idx[std::size_t(k)] = 0;
    }
  }
  if (append_slopes) table.points.bottomRows(net.pieces()) = net.slopes();

  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
  for (Index g = 0; g < rows; ++g) {
    const auto conj = legendre_transform(net, table.points.row(g).transpose());
    if (!conj) {
      table.conjugate(g) = nan;
      table.hamiltonian(g) = nan;
      continue;
    }
    table.conjugate(g) = *conj;
    table.hamiltonian(g) =
        *minimal_hamiltonian(net, table.points.row(g).transpose());
  }
  return table;
}

/// Lipschitz estimates (conjugate, Hamiltonian) from differences between
/// axis-neighboring feasible grid points of a dual table.
template <typename Scalar>
std::pair<Scalar, Scalar> dual_lipschitz(const DualTable<Scalar>& table) {
  const Index n = table.points.cols();
  Scalar lip_conj = Scalar(0);
  Scalar lip_ham = Scalar(0);
  Index stride = 1;
  for (Index axis = n - 1; axis >= 0; --axis) {
    const Index extent = table.counts[std::size_t(axis)];
    for (Index g = 0; g + stride < table.grid_total; ++g) {
      const Index along = (g / stride) % extent;
      if (along + 1 >= extent) continue;
      const Index q = g + stride;
      if (std::isnan(table.conjugate(g)) || std::isnan(table.conjugate(q)))
        continue;
      const Scalar d = (table.points.row(q) - table.points.row(g)).norm();
      if (d <= Scalar(0)) continue;
      lip_conj = std::max(lip_conj,
                          std::abs(table.conjugate(q) - table.conjugate(g)) / d);
      lip_ham = std::max(
          lip_ham, std::abs(table.hamiltonian(q) - table.hamiltonian(g)) / d);
    }
    stride *= extent;
  }
  return {lip_conj, lip_ham};
}

/// First-order monotone finite-volume scheme for u_t + (flux(u))_x = 0 with
/// outflow extension at the ends. The time step follows cfl * h divided by
/// the largest flux slope sampled over the initial data range. Returns the
/// cell values at t_final.
template <typename Scalar, class Flux, class Init>
VectorX<Scalar> lax_friedrichs(Flux&& flux, Init&& u0, const Grid1D<Scalar>& grid,
                               Scalar t_final, Scalar cfl) {
  grid.validate();
  require(t_final >= Scalar(0), "t_final must be nonnegative");
  require(cfl > Scalar(0) && cfl <= Scalar(1), "cfl must lie in (0, 1]");

  const Index cells = grid.cells;
  VectorX<Scalar> u(cells);
  for (Index i = 0; i < cells; ++i) u(i) = u0(grid.center(i));
  if (t_final == Scalar(0)) return u;

  Scalar umin = u.minCoeff();
  Scalar umax = u.maxCoeff();
  if (umax - umin < Scalar(1e-12)) {
    umin -= Scalar(0.5);
    umax += Scalar(0.5);
  }
  Scalar max_slope = Scalar(0);
  const Index samples = 512;
  const Scalar du = (umax - umin) / Scalar(samples);
  const Scalar fd = std::max(du * Scalar(1e-3), Scalar(1e-9));
  for (Index s = 0; s <= samples; ++s) {
    const Scalar v = umin + Scalar(s) * du;
    max_slope = std::max(max_slope,
                         std::abs((flux(v + fd) - flux(v - fd)) / (2 * fd)));
  }
  max_slope = std::max(max_slope, Scalar(1e-8));

  const Scalar h = grid.h();
  const Index steps =
      std::max<Index>(1, Index(std::ceil(double(t_final * max_slope / (cfl * h)))));
  const Scalar dt = t_final / Scalar(steps);
  const Scalar lambda = dt / (2 * h);

  VectorX<Scalar> next(cells);
  VectorX<Scalar> f(cells);
  for (Index s = 0; s < steps; ++s) {
    for (Index i = 0; i < cells; ++i) f(i) = flux(u(i));
    for (Index i = 0; i < cells; ++i) {
      const Index l = (i == 0) ? 0 : i - 1;
      const Index r = (i == cells - 1) ? cells - 1 : i + 1;
      next(i) = Scalar(0.5) * (u(l) + u(r)) - lambda * (f(r) - f(l));
    }
    u.swap(next);
  }
  return u;
}

/// Tensor grid over an (x, t) box for the smooth-network residual check.
template <typename Scalar = double>
struct BoxGrid {
  VectorX<Scalar> x_lo;
  VectorX<Scalar> x_hi;
  Index x_cells;
  Scalar t_lo;
  Scalar t_hi;
  Index t_cells;

  void validate() const {
    require(x_lo.size() >= 1 && x_lo.size() == x_hi.size(),
            "box bounds must agree in dimension");
    require(((x_hi - x_lo).array() > Scalar(0)).all(), "box must be nonempty");
    require(x_cells >= 1 && t_cells >= 1, "box needs at least one cell per axis");
    require(t_lo >= Scalar(0) && t_hi > t_lo, "time interval must be valid");
  }
};

/// Largest absolute residual of
///   d/dt f_eps - 0.5 |grad_x f_eps|^2 - (eps/2) laplace_x f_eps
/// over the box nodes, all derivatives by second-order central differences of
/// the smooth network with step h. Requires rate_i = -|slope_i|^2 / 2, the
/// regime in which the smooth network solves this equation exactly, so the
/// returned number is pure discretisation error.
template <typename Scalar>
Scalar viscous_residual(const NetworkParams<Scalar>& net,
                        const BoxGrid<Scalar>& box, Scalar epsilon, Scalar h) {
  box.validate();
  require(epsilon > Scalar(0), "epsilon must be positive");
  require(h >= Scalar(1e-7), "step too small for double-precision differences");
  require(box.t_lo - h >= Scalar(0), "time stencil would reach below t = 0");
  for (Index i = 0; i < net.pieces(); ++i)
    require(std::abs(net.rate(i) + net.slope(i).squaredNorm() / 2) <= Scalar(1e-12),
            "rates must equal -|slope|^2 / 2");

  const Index n = net.dim();
  Index x_nodes = 1;
  for (Index k = 0; k < n; ++k) x_nodes *= box.x_cells + 1;
  require(x_nodes * (box.t_cells + 1) <= Index(1) << 22, "residual grid too large");

  const VectorX<Scalar> dx = (box.x_hi - box.x_lo) / Scalar(box.x_cells);
  const Scalar dt = (box.t_hi - box.t_lo) / Scalar(box.t_cells);

  Scalar worst = Scalar(0);
  std::vector<Index> idx(std::size_t(n), 0);
  VectorX<Scalar> x(n);
  VectorX<Scalar> xp(n);
  for (Index g = 0; g < x_nodes; ++g) {
    for (Index k = 0; k < n; ++k)
      x(k) = box.x_lo(k) + Scalar(idx[std::size_t(k)]) * dx(k);
    for (Index it = 0; it <= box.t_cells; ++it) {
      const Scalar t = box.t_lo + Scalar(it) * dt;
      const Scalar f0 = evaluate_viscous(net, x, t, epsilon);
      const Scalar ft = (evaluate_viscous(net, x, t + h, epsilon) -
                         evaluate_viscous(net, x, t - h, epsilon)) /
                        (2 * h);
      Scalar grad_sq = Scalar(0);
      Scalar lap = Scalar(0);
      for (Index k = 0; k < n; ++k) {
        xp = x;
        xp(k) = x(k) + h;
        const Scalar fp = evaluate_viscous(net, xp, t, epsilon);
        xp(k) = x(k) - h;
        const Scalar fm = evaluate_viscous(net, xp, t, epsilon);
        const Scalar d1 = (fp - fm) / (2 * h);
        grad_sq += d1 * d1;
        lap += (fp - 2 * f0 + fm) / (h * h);
      }
      const Scalar r = ft - grad_sq / 2 - epsilon / 2 * lap;
      worst = std::max(worst, std::abs(r));
    }
    for (Index k = n - 1; k >= 0; --k) {
      if (++idx[std::size_t(k)] < Index(box.x_cells) + 1) break;
      idx[std::size_t(k)] = 0;
    }
  }
  return worst;
}

/// Monotone Lax-Friedrichs march for the 2D equation S_t + H(S_x, S_y) = 0 on
/// a uniform square grid, with Dirichlet values supplied by `boundary` and
/// snapshots captured at the requested times (each must be a multiple of dt).
/// sigma_x / sigma_y bound |dH/dp| per slot; monotonicity needs
/// dt * (sigma_x + sigma_y) <= h.
template <typename Scalar, class Ham, class Init, class Bound>
std::vector<MatrixX<Scalar>> lax_friedrichs_hj_2d(
    Ham&& hamiltonian, Scalar sigma_x, Scalar sigma_y, Init&& initial,
    Bound&& boundary, Scalar lo, Scalar hi, Index nodes, Scalar dt,
    const std::vector<Scalar>& snapshot_times) {
  require(nodes >= 3, "grid needs at least three nodes per axis");
  require(lo < hi, "grid interval must be nonempty");
  require(dt > Scalar(0), "dt must be positive");
  require(!snapshot_times.empty(), "no snapshot times requested");
  const Scalar h = (hi - lo) / Scalar(nodes - 1);
  require(dt * (sigma_x + sigma_y) <= h * (Scalar(1) + Scalar(1e-12)),
          "time step violates the monotonicity bound");

  const auto coord = [&](Index i) { return lo + Scalar(i) * h; };
  Index total_steps = 0;
  for (const Scalar ts : snapshot_times) {
    const Scalar k = ts / dt;
    require(std::abs(k - std::round(double(k))) < 1e-9,
            "snapshot times must be multiples of dt");
    total_steps = std::max(total_steps, Index(std::llround(double(k))));
  }

  MatrixX<Scalar> s(nodes, nodes);
  for (Index i = 0; i < nodes; ++i)
    for (Index j = 0; j < nodes; ++j) s(i, j) = initial(coord(i), coord(j));

  std::vector<MatrixX<Scalar>> snaps;
  const auto capture = [&](Index step) {
    for (const Scalar ts : snapshot_times)
      if (std::llround(double(ts / dt)) == step) snaps.push_back(s);
  };
  capture(0);

  MatrixX<Scalar> next(nodes, nodes);
  for (Index step = 1; step <= total_steps; ++step) {
    const Scalar t = Scalar(step) * dt;
    for (Index i = 1; i + 1 < nodes; ++i) {
      for (Index j = 1; j + 1 < nodes; ++j) {
        const Scalar pxm = (s(i, j) - s(i - 1, j)) / h;
        const Scalar pxp = (s(i + 1, j) - s(i, j)) / h;
        const Scalar pym = (s(i, j) - s(i, j - 1)) / h;
        const Scalar pyp = (s(i, j + 1) - s(i, j)) / h;
        const Scalar ham = hamiltonian((pxm + pxp) / 2, (pym + pyp) / 2) -
                           sigma_x / 2 * (pxp - pxm) - sigma_y / 2 * (pyp - pym);
        next(i, j) = s(i, j) - dt * ham;
      }
    }
    for (Index i = 0; i < nodes; ++i) {
      next(i, 0) = boundary(coord(i), coord(0), t);
      next(i, nodes - 1) = boundary(coord(i), coord(nodes - 1), t);
      next(0, i) = boundary(coord(0), coord(i), t);
      next(nodes - 1, i) = boundary(coord(nodes - 1), coord(i), t);
    }
    s.swap(next);
    capture(step);
  }
  return snaps;
}

}  // namespace hjnet
