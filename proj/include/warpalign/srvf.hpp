#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "warpalign/core.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign {

enum class Topology { open, closed };

/// Row k holds the point (or SRVF value) at grid[k]; columns are coordinates.
using Points = Eigen::MatrixXd;

/// A curve g: [0,1] -> R^d sampled on a grid.
class Curve {
 public:
  Curve(Grid grid, Points points, Topology topology = Topology::open)
      : grid_(std::move(grid)), points_(std::move(points)), topology_(topology) {
    if (static_cast<std::size_t>(points_.rows()) != grid_.size())
      throw ArgumentError("curve needs one point per grid value");
    if (points_.cols() < 1 || points_.cols() > 3) throw ArgumentError("curves live in R^1, R^2 or R^3");
    if (topology_ == Topology::closed && (points_.row(0) - points_.row(points_.rows() - 1)).norm() > 1e-9)
      throw DataError("closed curve must end where it starts");
  }

  const Grid& grid() const noexcept { return grid_; }
  const Points& points() const noexcept { return points_; }
  Topology topology() const noexcept { return topology_; }
  bool closed() const noexcept { return topology_ == Topology::closed; }
  int dim() const noexcept { return static_cast<int>(points_.cols()); }
  std::size_t size() const noexcept { return grid_.size(); }

  /// Point at parameter t by linear interpolation between samples.
  Eigen::RowVectorXd at(double t) const;

  /// Polyline length.
  double length() const {
    double len = 0.0;
    for (Eigen::Index k = 1; k < points_.rows(); ++k) len += (points_.row(k) - points_.row(k - 1)).norm();
    return len;
  }

 private:
  Grid grid_;
  Points points_;
  Topology topology_;
};

/// Square-root velocity function q = f' / sqrt(|f'|) sampled on a grid.
struct Srvf {
  Grid grid;
  Points values;
  bool is_shape = false;  // unit L2 norm
  Topology topology = Topology::open;

  int dim() const noexcept { return static_cast<int>(values.cols()); }
  std::size_t size() const noexcept { return grid.size(); }
};

namespace detail {

/// Linear interpolation of row-valued samples over a grid.
inline Eigen::RowVectorXd interpolate(const Grid& grid, const Points& values, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("interpolation outside [0,1]");
  const auto g = grid.values();
  auto it = std::upper_bound(g.begin(), g.end(), t);
  std::size_t k = static_cast<std::size_t>(it - g.begin());
  k = k == 0 ? 0 : k - 1;
  k = std::min(k, g.size() - 2);
  const double lambda = (t - g[k]) / (g[k + 1] - g[k]);
  const auto row = static_cast<Eigen::Index>(k);
  if (lambda == 0.0) return values.row(row);
  return (1.0 - lambda) * values.row(row) + lambda * values.row(row + 1);
}

/// Trapezoidal quadrature weights of a grid.
inline Eigen::VectorXd trapezoid_weights(const Grid& grid) {
  const std::size_t m = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = 0.5 * (grid[k + 1] - grid[k]);
    w[static_cast<Eigen::Index>(k)] += h;
    w[static_cast<Eigen::Index>(k + 1)] += h;
  }
  return w;
}

inline void require_same_grid(const Srvf& a, const Srvf& b) {
  if (!(a.grid == b.grid)) throw ArgumentError("SRVFs must share a grid (resample first)");
  if (a.dim() != b.dim()) throw ArgumentError("SRVFs must have equal dimension");
}

}  // namespace detail

inline Eigen::RowVectorXd Curve::at(double t) const { return detail::interpolate(grid_, points_, t); }

/// Resamples to m equi-spaced parameter values by linear interpolation.
inline Curve resample(const Curve& c, std::size_t m) {
  if (m < 2) throw ArgumentError("resampling needs at least two points");
  Grid grid = Grid::uniform(m);
  Points p(static_cast<Eigen::Index>(m), c.dim());
  for (std::size_t k = 0; k < m; ++k) p.row(static_cast<Eigen::Index>(k)) = c.at(grid[k]);
  if (c.closed()) p.row(p.rows() - 1) = p.row(0);
  return Curve(std::move(grid), std::move(p), c.topology());
}

/// The reparameterized curve c o w on c's grid.
inline Curve reparameterize(const Curve& c, const PLWarp& w) {
  Points p(static_cast<Eigen::Index>(c.size()), c.dim());
  for (std::size_t k = 0; k < c.size(); ++k) p.row(static_cast<Eigen::Index>(k)) = c.at(w.eval(c.grid()[k]));
  if (c.closed()) p.row(p.rows() - 1) = p.row(0);
  return Curve(c.grid(), std::move(p), c.topology());
}

/// Resamples an SRVF by linear interpolation of its values.
inline Srvf resample(const Srvf& q, std::size_t m) {
  Grid grid = Grid::uniform(m);
  Points v(static_cast<Eigen::Index>(m), q.dim());
  for (std::size_t k = 0; k < m; ++k) v.row(static_cast<Eigen::Index>(k)) = detail::interpolate(q.grid, q.values, grid[k]);
  return Srvf{std::move(grid), std::move(v), false, q.topology};
}

/// Velocity by central differences: cyclic for closed curves, second-order
/// one-sided at the endpoints of open curves.
inline Points velocity(const Curve& c) {
  const auto& g = c.grid();
  const auto& f = c.points();
  const Eigen::Index m = f.rows();
  if (m < 3) throw ArgumentError("need at least three points to differentiate");
  Points v(m, f.cols());
  for (Eigen::Index k = 1; k + 1 < m; ++k) {
    const double h0 = g[static_cast<std::size_t>(k)] - g[static_cast<std::size_t>(k - 1)];
    const double h1 = g[static_cast<std::size_t>(k + 1)] - g[static_cast<std::size_t>(k)];
    // three-point formula, exact for quadratics on non-uniform grids
    v.row(k) = (-h1 / (h0 * (h0 + h1))) * f.row(k - 1) + ((h1 - h0) / (h0 * h1)) * f.row(k) +
               (h0 / (h1 * (h0 + h1))) * f.row(k + 1);
  }
  if (c.closed()) {
    const double h0 = 1.0 - g[static_cast<std::size_t>(m - 2)];
    const double h1 = g[1];
    const Eigen::RowVectorXd d = (-h1 / (h0 * (h0 + h1))) * f.row(m - 2) + ((h1 - h0) / (h0 * h1)) * f.row(0) +
                                 (h0 / (h1 * (h0 + h1))) * f.row(1);
    v.row(0) = d;
    v.row(m - 1) = d;
  } else {
    auto one_sided = [&](Eigen::Index a, Eigen::Index b, Eigen::Index cidx) -> Eigen::RowVectorXd {
      // derivative at a from samples a, b, c (b, c on the same side)
      const double ta = g[static_cast<std::size_t>(a)];
      const double h1 = g[static_cast<std::size_t>(b)] - ta;
      const double h2 = g[static_cast<std::size_t>(cidx)] - ta;
      return (-(h1 + h2) / (h1 * h2)) * f.row(a) + (h2 / (h1 * (h2 - h1))) * f.row(b) -
             (h1 / (h2 * (h2 - h1))) * f.row(cidx);
    };
    v.row(0) = one_sided(0, 1, 2);
    v.row(m - 1) = one_sided(m - 1, m - 2, m - 3);
  }
  return v;
}

/// q = f' / sqrt(|f'|), zero where |f'| < 1e-12.
inline Srvf to_srvf(const Curve& c) {
  Points q = velocity(c);
  for (Eigen::Index k = 0; k < q.rows(); ++k) {
    const double speed = q.row(k).norm();
    if (speed < 1e-12)
      q.row(k).setZero();
    else
      q.row(k) /= std::sqrt(speed);
  }
  return Srvf{c.grid(), std::move(q), false, c.topology()};
}

/// f(t) = start + integral_0^t q|q| by the trapezoid rule.
inline Curve from_srvf(const Srvf& q, const Eigen::RowVectorXd& start) {
  if (start.size() != q.dim()) throw ArgumentError("start point has the wrong dimension");
  const Eigen::Index m = q.values.rows();
  Points f(m, q.dim());
  f.row(0) = start;
  auto speed_vec = [&](Eigen::Index k) -> Eigen::RowVectorXd { return q.values.row(k) * q.values.row(k).norm(); };
  for (Eigen::Index k = 1; k < m; ++k) {
    const double h = q.grid[static_cast<std::size_t>(k)] - q.grid[static_cast<std::size_t>(k - 1)];
    f.row(k) = f.row(k - 1) + 0.5 * h * (speed_vec(k - 1) + speed_vec(k));
  }
  // Only close the polyline when the integrated velocity actually returns.
  Topology topo = Topology::open;
  if (q.topology == Topology::closed && (f.row(0) - f.row(m - 1)).norm() <= 1e-9) topo = Topology::closed;
  return Curve(q.grid, std::move(f), topo);
}


/// (q o w) sqrt(w') on q's grid, with q(.) linearly interpolated.
inline Srvf warp_action(const Srvf& q, const PLWarp& w) {
  const auto& g = q.grid;
  const std::size_t m = g.size();
  const auto kt = w.knot_t();
  const auto ky = w.knot_y();
  Points out(q.values.rows(), q.values.cols());
  // Grid values and w(t) are both non-decreasing, so one forward sweep finds
  // the warp segment and the interpolation cell for every sample.
  std::size_t seg = 0;
  std::size_t cell = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double t = g[k];
    while (seg + 2 < kt.size() && kt[seg + 1] <= t) ++seg;
    const double dt = kt[seg + 1] - kt[seg];
    const double dy = ky[seg + 1] - ky[seg];
    const double u = std::clamp(t == kt[seg] ? ky[seg] : ky[seg] + (t - kt[seg]) * dy / dt, 0.0, 1.0);
    while (cell + 2 < m && g[cell + 1] <= u) ++cell;
    const double lambda = (u - g[cell]) / (g[cell + 1] - g[cell]);
    const double scale = std::sqrt(dy / dt);
    const auto row = static_cast<Eigen::Index>(k);
    const auto c = static_cast<Eigen::Index>(cell);
    if (lambda == 0.0)
      out.row(row) = q.values.row(c) * scale;
    else
      out.row(row) = ((1.0 - lambda) * q.values.row(c) + lambda * q.values.row(c + 1)) * scale;
  }
  return Srvf{q.grid, std::move(out), q.is_shape, q.topology};
}

/// Trapezoidal L2 inner product.
inline double inner_product(const Srvf& a, const Srvf& b) {
  detail::require_same_grid(a, b);
  const Eigen::VectorXd w = detail::trapezoid_weights(a.grid);
  return w.dot((a.values.cwiseProduct(b.values)).rowwise().sum());
}

inline double l2_norm(const Srvf& q) {
  const Eigen::VectorXd w = detail::trapezoid_weights(q.grid);
  return std::sqrt(w.dot(q.values.rowwise().squaredNorm()));
}

inline double l2_dist(const Srvf& a, const Srvf& b) {
  detail::require_same_grid(a, b);
  const Eigen::VectorXd w = detail::trapezoid_weights(a.grid);
  const Points diff = a.values - b.values;
  return std::sqrt(w.dot(diff.rowwise().squaredNorm()));
}

/// Scales q to unit L2 norm and marks it as a shape representative.
inline Srvf as_shape(Srvf q) {
  const double n = l2_norm(q);
  if (!(n > 0.0)) throw ArgumentError("cannot normalize a zero SRVF");
  q.values /= n;
  q.is_shape = true;
  return q;
}

/// Great-circle distance arccos<q1,q2> on the unit sphere of SRVFs.
inline double shape_dist(const Srvf& a, const Srvf& b) {
  if (!a.is_shape || !b.is_shape) throw ArgumentError("shape distance needs unit-norm SRVFs");
  return std::acos(std::clamp(inner_product(a, b), -1.0, 1.0));
}

/// Path of `steps` SRVFs from a to b: great-circle arc for shapes, straight line otherwise.
inline std::vector<Srvf> geodesic(const Srvf& a, const Srvf& b, int steps) {
  detail::require_same_grid(a, b);
  if (steps < 2) throw ArgumentError("geodesic needs at least two steps");
  const bool sphere = a.is_shape && b.is_shape;
  double psi = 0.0;
  if (sphere) {
    psi = shape_dist(a, b);
    if (psi >= std::numbers::pi - 1e-6) throw NumericalError("geodesic between antipodal shapes is not unique");
  }
  std::vector<Srvf> path;
  path.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    if (i == 0) {
      path.push_back(a);
      continue;
    }
    if (i == steps - 1) {
      path.push_back(b);
      continue;
    }
    const double s = static_cast<double>(i) / (steps - 1);
    Srvf q{a.grid, Points(), sphere, a.topology};
    if (sphere && psi > 1e-12) {
      q.values = (std::sin((1.0 - s) * psi) * a.values + std::sin(s * psi) * b.values) / std::sin(psi);
    } else {
      q.values = (1.0 - s) * a.values + s * b.values;
    }
    path.push_back(std::move(q));
  }
  return path;
}

/// E(w) = || q1 - (q2 o w) sqrt(w') ||^2.
inline double warp_energy(const Srvf& q1, const Srvf& q2, const PLWarp& w) {
  const double d = l2_dist(q1, warp_action(q2, w));
  return d * d;
}

}  // namespace warpalign
