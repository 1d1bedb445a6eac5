#pragma once

#include <string>
#include <vector>

#include "hjnet/convex.hpp"

namespace hjnet {

/// One-dimensional network specialised for conservation-law profiles. Pieces
/// are sorted ascending by slope at construction; strictly increasing slopes
/// are required.
template <typename Scalar = double>
class EntropyNet1D {
 public:
  explicit EntropyNet1D(const NetworkParams<Scalar>& raw,
                        TieRule tie = TieRule::LowestIndex)
      : params_(sorted(raw)), tie_(tie) {
    for (Index i = 0; i + 1 < params_.pieces(); ++i)
      require(params_.slope(i)(0) < params_.slope(i + 1)(0),
              "slopes must be strictly increasing after sorting");
  }

  const NetworkParams<Scalar>& params() const { return params_; }
  TieRule tie_rule() const { return tie_; }
  Index pieces() const { return params_.pieces(); }
  Scalar slope_value(Index i) const { return params_.slope(i)(0); }
  Scalar rate(Index i) const { return params_.rate(i); }
  Scalar offset(Index i) const { return params_.offset(i); }

 private:
  static NetworkParams<Scalar> sorted(const NetworkParams<Scalar>& raw) {
    require(raw.dim() == 1, "conservation profiles are one-dimensional");
    std::vector<Index> order(std::size_t(raw.pieces()));
    for (Index i = 0; i < raw.pieces(); ++i) order[std::size_t(i)] = i;
    std::sort(order.begin(), order.end(), [&raw](Index a, Index b) {
      return raw.slope(a)(0) < raw.slope(b)(0);
    });
    RowMajorMatrix<Scalar> flat(raw.pieces(), 3);
    for (Index i = 0; i < raw.pieces(); ++i)
      flat.row(i) = raw.flat().row(order[std::size_t(i)]);
    return NetworkParams<Scalar>::from_flat(1, std::move(flat));
  }

  NetworkParams<Scalar> params_;
  TieRule tie_;
};

/// Profile value at (x, t): the slope of the maximizing piece, ties resolved
/// by the net's tie rule. The result always belongs to the stored slopes.
template <typename Scalar>
Scalar evaluate_entropy(const EntropyNet1D<Scalar>& net, Scalar x, Scalar t) {
  VectorX<Scalar> xv(1);
  xv(0) = x;
  const auto winners = argmax_set(net.params(), xv, t);
  const Index j = (net.tie_rule() == TieRule::LowestIndex) ? winners.front()
                                                           : winners.back();
  return net.slope_value(j);
}

/// Closed range of slopes attained by the initial profile's subdifferential
/// at x; a single point wherever the profile is differentiable.
template <typename Scalar>
struct SlopeRange {
  Scalar lo;
  Scalar hi;
  bool is_point() const { return lo == hi; }
};

template <typename Scalar>
SlopeRange<Scalar> initial_gradient(const EntropyNet1D<Scalar>& net, Scalar x) {
  VectorX<Scalar> xv(1);
  xv(0) = x;
  const auto winners = argmax_set(net.params(), xv, Scalar(0));
  return {net.slope_value(winners.front()), net.slope_value(winners.back())};
}

/// Straight line carrying a profile discontinuity: the pieces left_index and
/// right_index are jointly maximal exactly on x = slope * t + intercept for
/// t in [t_begin, t_end].
template <typename Scalar = double>
struct ShockLine {
  Index left_index;
  Index right_index;
  Scalar slope;
  Scalar intercept;
  Scalar t_begin;
  Scalar t_end;
};

/// All discontinuity lines of the profile for t in (0, t_max]. Enumerates
/// piece pairs and keeps a pair's line where both pieces are joint maximizers
/// on a t-interval of positive length. Requires the structural assumptions.
template <typename Scalar>
std::vector<ShockLine<Scalar>> shock_lines(const EntropyNet1D<Scalar>& net,
                                           Scalar t_max) {
  require(t_max > Scalar(0), "t_max must be positive");
  const auto report = check_assumptions(net.params(), Scalar(1e-8));
  if (!report.pass())
    throw std::invalid_argument(
        "shock extraction needs distinct slopes, convex offsets and essential pieces");

  const Index m = net.pieces();
  std::vector<ShockLine<Scalar>> lines;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const Scalar dp = net.slope_value(j) - net.slope_value(i);
      const Scalar a = (net.rate(j) - net.rate(i)) / dp;
      const Scalar b = (net.offset(j) - net.offset(i)) / dp;
      // Piece k stays below the pair on the line iff ck * t + dk <= 0.
      Scalar t_lo = Scalar(0);
      Scalar t_hi = t_max;
      bool alive = true;
      for (Index k = 0; k < m && alive; ++k) {
        if (k == i || k == j) continue;
        const Scalar dpk = net.slope_value(k) - net.slope_value(i);
        const Scalar ck = dpk * a - (net.rate(k) - net.rate(i));
        const Scalar dk = dpk * b - (net.offset(k) - net.offset(i));
        if (ck > Scalar(1e-12)) {
          t_hi = std::min(t_hi, -dk / ck);
        } else if (ck < Scalar(-1e-12)) {
          t_lo = std::max(t_lo, -dk / ck);
        } else if (dk > Scalar(1e-10)) {
          alive = false;
        }
      }
      if (alive && t_hi - t_lo > Scalar(1e-12) * (Scalar(1) + t_max)) {
        lines.push_back({i, j, a, b, std::max(t_lo, Scalar(0)),
                         std::min(t_hi, t_max)});
      }
    }
  }
  return lines;
}

/// Piecewise-linear Hamiltonian induced by the net on the slope range:
/// interpolates the (slope, rate) pairs of consecutive pieces. For nets
/// satisfying the structural assumptions this agrees with
/// `minimal_hamiltonian` on [slope_1, slope_m].
template <typename Scalar>
Scalar interpolated_hamiltonian(const EntropyNet1D<Scalar>& net, Scalar u) {
  const Index m = net.pieces();
  require(u >= net.slope_value(0) && u <= net.slope_value(m - 1),
          "point outside the slope range");
  Index k = 0;
  while (k + 2 < m && net.slope_value(k + 1) < u) ++k;
  const Scalar pl = net.slope_value(k);
  const Scalar pr = net.slope_value(k + 1);
  const Scalar w = (u - pl) / (pr - pl);
  return (Scalar(1) - w) * net.rate(k) + w * net.rate(k + 1);
}

/// Outcome of the admissibility checks for a candidate flux `h_tilde` against
/// the profile: every shock must travel at the flux's chord speed, interior
/// chords must not exceed it, and h_tilde must equal rate + shift at the
/// stored slopes while dominating the interpolated Hamiltonian + shift in
/// between. Failures are recorded, never thrown.
template <typename Scalar = double>
struct EntropyReport {
  bool speeds_match = true;
  bool chords_admissible = true;
  bool levels_match = true;
  bool dominates = true;
  std::vector<std::string> failures;

  bool pass() const {
    return speeds_match && chords_admissible && levels_match && dominates;
  }
};

template <typename Scalar, typename Flux>
EntropyReport<Scalar> verify_entropy_conditions(const EntropyNet1D<Scalar>& net,
                                                Flux&& h_tilde, Scalar shift,
                                                int u0_samples) {
  require(u0_samples >= 1, "need at least one interior sample");
  constexpr Scalar kTol = Scalar(1e-8);
  EntropyReport<Scalar> report;

  const auto lines = shock_lines(net, Scalar(1));
  for (const auto& line : lines) {
    const Scalar um = net.slope_value(line.left_index);
    const Scalar up = net.slope_value(line.right_index);
    const Scalar chord = (h_tilde(up) - h_tilde(um)) / (up - um);
    if (std::abs(line.slope - chord) > kTol) {
      report.speeds_match = false;
      report.failures.push_back("shock " + std::to_string(line.left_index) +
                                "-" + std::to_string(line.right_index) +
                                ": speed differs from the flux chord");
    }
    for (int k = 1; k <= u0_samples; ++k) {
      const Scalar u0 = um + (up - um) * Scalar(k) / Scalar(u0_samples + 1);
      const Scalar interior = (h_tilde(up) - h_tilde(u0)) / (up - u0);
      if (interior > line.slope + kTol) {
        report.chords_admissible = false;
        report.failures.push_back(
            "shock " + std::to_string(line.left_index) + "-" +
            std::to_string(line.right_index) +
            ": interior chord exceeds the shock speed");
        break;
      }
    }
  }

  for (Index i = 0; i < net.pieces(); ++i) {
    if (std::abs(h_tilde(net.slope_value(i)) - (net.rate(i) + shift)) > kTol) {
      report.levels_match = false;
      report.failures.push_back("piece " + std::to_string(i) +
                                ": flux does not match rate + shift");
      break;
    }
  }

  const Scalar lo = net.slope_value(0);
  const Scalar hi = net.slope_value(net.pieces() - 1);
  const Scalar step = Scalar(1e-3);
  for (Scalar u = lo; u < hi + step / 2; u += step) {
    const Scalar uu = std::min(u, hi);
    if (h_tilde(uu) < interpolated_hamiltonian(net, uu) + shift - kTol) {
      report.dominates = false;
      report.failures.push_back("flux drops below the induced Hamiltonian + shift");
      break;
    }
  }
  return report;
}

}  // namespace hjnet
