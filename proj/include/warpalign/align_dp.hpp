#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "warpalign/core.hpp"
#include "warpalign/shapeops.hpp"
#include "warpalign/srvf.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign {

struct DpStep {
  int di;  // advance in t
  int dj;  // advance in warp value
};

struct DpConfig {
  /// Lattice size used by callers that resample before aligning (the lattice
  /// itself is always the SRVF grid).
  int grid_size = 100;
  /// Admissible segment slopes; the first entry wins ties.
  std::vector<DpStep> neighborhood{{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}};
  int seed_stride = 1;

  void validate() const {
    if (grid_size < 3) throw ArgumentError("DP grid size must be at least 3");
    if (neighborhood.empty()) throw ArgumentError("DP neighborhood must not be empty");
    for (const auto& s : neighborhood)
      if (s.di < 1 || s.dj < 1) throw ArgumentError("DP steps must be positive");
    if (seed_stride < 1) throw ArgumentError("seed stride must be positive");
  }
};

struct DpResult {
  PLWarp warp;
  double energy = 0.0;
};

struct DpClosedResult {
  double seed = 0.0;
  PLWarp warp;
  double energy = 0.0;
};

namespace detail {

/// Quadrature of |q1(t) - q2(w(t)) sqrt(slope)|^2 over the samples a lattice
/// segment (i,j) -> (i2,j2) owns: grid points i..i2-1, plus i2 when it is the
/// last point. Matches warp_energy() of the assembled PL warp term by term.
class SegmentCost {
 public:
  SegmentCost(const Srvf& q1, const Srvf& q2)
      : g_(q1.grid.values()), q1_(q1.values), q2_(q2.values), w_(trapezoid_weights(q1.grid)) {}

  double operator()(int i, int j, int i2, int j2) const {
    const double t0 = g_[static_cast<std::size_t>(i)];
    const double y0 = g_[static_cast<std::size_t>(j)];
    const double dt = g_[static_cast<std::size_t>(i2)] - t0;
    const double dy = g_[static_cast<std::size_t>(j2)] - y0;
    const double scale = std::sqrt(dy / dt);
    const int last = static_cast<int>(g_.size()) - 1;
    const int stop = i2 == last ? i2 : i2 - 1;
    double cost = 0.0;
    int cell = j;
    for (int k = i; k <= stop; ++k) {
      const double t = g_[static_cast<std::size_t>(k)];
      const double u = std::clamp(t == t0 ? y0 : y0 + (t - t0) * dy / dt, 0.0, 1.0);
      while (cell + 1 < last && g_[static_cast<std::size_t>(cell + 1)] <= u) ++cell;
      const double lambda =
          (u - g_[static_cast<std::size_t>(cell)]) / (g_[static_cast<std::size_t>(cell + 1)] - g_[static_cast<std::size_t>(cell)]);
      double r2 = 0.0;
      for (Eigen::Index c = 0; c < q1_.cols(); ++c) {
        const double v = lambda == 0.0 ? q2_(cell, c) : (1.0 - lambda) * q2_(cell, c) + lambda * q2_(cell + 1, c);
        const double r = q1_(k, c) - v * scale;
        r2 += r * r;
      }
      cost += w_[k] * r2;
    }
    return cost;
  }

 private:
  std::span<const double> g_;
  const Points& q1_;
  const Points& q2_;
  Eigen::VectorXd w_;
};

}  // namespace detail

/// Minimizes the discretized E(w) over PL warps whose knots are lattice nodes
/// of the SRVF grid and whose segments use the configured slope steps.
inline DpResult dp_align(const Srvf& q1, const Srvf& q2, const DpConfig& cfg = {}) {
  cfg.validate();
  detail::require_same_grid(q1, q2);
  const int m = static_cast<int>(q1.size());
  if (m < 3) throw ArgumentError("DP needs at least three grid points");
  const detail::SegmentCost cost(q1, q2);
  constexpr double inf = std::numeric_limits<double>::infinity();

  const auto idx = [m](int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j); };
  std::vector<double> best(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), inf);
  std::vector<int> from(best.size(), -1);
  best[idx(0, 0)] = 0.0;

  for (int i = 1; i < m; ++i) {
    for (int j = 1; j < m; ++j) {
      double b = inf;
      int arg = -1;
      for (const auto& s : cfg.neighborhood) {
        const int pi = i - s.di;
        const int pj = j - s.dj;
        if (pi < 0 || pj < 0) continue;
        const double prev = best[idx(pi, pj)];
        if (prev == inf) continue;
        const double c = prev + cost(pi, pj, i, j);
        if (c < b) {
          b = c;
          arg = static_cast<int>(idx(pi, pj));
        }
      }
      best[idx(i, j)] = b;
      from[idx(i, j)] = arg;
    }
  }
  if (best[idx(m - 1, m - 1)] == inf) throw NumericalError("no admissible lattice path for this neighborhood");

  std::vector<double> t, y;
  for (int node = static_cast<int>(idx(m - 1, m - 1)); node >= 0; node = from[static_cast<std::size_t>(node)]) {
    t.push_back(q1.grid[static_cast<std::size_t>(node / m)]);
    y.push_back(q1.grid[static_cast<std::size_t>(node % m)]);
  }
  std::reverse(t.begin(), t.end());
  std::reverse(y.begin(), y.end());
  return {PLWarp(std::move(t), std::move(y)), best[idx(m - 1, m - 1)]};
}

/// DP over every seed candidate k * seed_stride / (m - 1) of q2; the returned seed s
/// is the one for which dp_align(q1, apply_seed(q2, s)) is best.
inline DpClosedResult dp_align_closed(const Srvf& q1, const Srvf& q2, const DpConfig& cfg = {}) {
  cfg.validate();
  if (q1.topology != Topology::closed || q2.topology != Topology::closed)
    throw ArgumentError("closed DP alignment needs closed-curve SRVFs");
  detail::require_same_grid(q1, q2);
  const int period = static_cast<int>(q1.size()) - 1;
  DpClosedResult result{0.0, PLWarp(), std::numeric_limits<double>::infinity()};
  for (int k = 0; k < period; k += cfg.seed_stride) {
    const double s = static_cast<double>(k) / period;
    auto r = dp_align(q1, apply_seed(q2, s), cfg);
    if (r.energy < result.energy) result = {s, std::move(r.warp), r.energy};
  }
  return result;
}

}  // namespace warpalign
