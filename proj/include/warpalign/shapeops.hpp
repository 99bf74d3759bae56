#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "warpalign/core.hpp"
#include "warpalign/srvf.hpp"

namespace warpalign {

/// A proper rotation of R^d (orthogonal, determinant +1).
class Rotation {
 public:
  explicit Rotation(int d = 1) : matrix_(Eigen::MatrixXd::Identity(d, d)) {}
  explicit Rotation(Eigen::MatrixXd m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols()) throw ArgumentError("rotation matrix must be square");
    const auto d = matrix_.rows();
    if ((matrix_.transpose() * matrix_ - Eigen::MatrixXd::Identity(d, d)).norm() > 1e-10)
      throw ArgumentError("rotation matrix must be orthogonal");
    if (matrix_.determinant() < 0.0) throw ArgumentError("rotation must have determinant +1");
  }

  static Rotation planar(double angle) {
    Eigen::MatrixXd m(2, 2);
    m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return Rotation(std::move(m));
  }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }

  Rotation transpose() const { return Rotation(Eigen::MatrixXd(matrix_.transpose())); }

 private:
  Eigen::MatrixXd matrix_;
};

/// Applies O to every value: q(t) -> O q(t).
inline Srvf rotate(const Srvf& q, const Rotation& o) {
  if (o.dim() != q.dim()) throw ArgumentError("rotation dimension does not match SRVF");
  Srvf out = q;
  out.values = q.values * o.matrix().transpose();
  return out;
}

inline Curve rotate(const Curve& c, const Rotation& o) {
  if (o.dim() != c.dim()) throw ArgumentError("rotation dimension does not match curve");
  return Curve(c.grid(), c.points() * o.matrix().transpose(), c.topology());
}

/// Scales a curve to unit polyline length.
inline Curve normalize_length(const Curve& c) {
  const double len = c.length();
  if (!(len > 0.0)) throw DataError("cannot normalize a zero-length curve");
  return Curve(c.grid(), c.points() / len, c.topology());
}

/// argmin over SO(d) of ||q1 - O q2|| (Procrustes via SVD of sum_k w_k q1_k q2_k^T).
inline Rotation optimal_rotation(const Srvf& q1, const Srvf& q2) {
  detail::require_same_grid(q1, q2);
  const int d = q1.dim();
  if (d == 1) return Rotation(1);
  const Eigen::VectorXd w = detail::trapezoid_weights(q1.grid);
  const Eigen::MatrixXd a = q1.values.transpose() * w.asDiagonal() * q2.values;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();
  const Eigen::MatrixXd v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(d - 1) *= -1.0;
  Eigen::MatrixXd o = u * v.transpose();
  // re-orthonormalize against rounding before the invariant check
  Eigen::JacobiSVD<Eigen::MatrixXd> polish(o, Eigen::ComputeFullU | Eigen::ComputeFullV);
  o = polish.matrixU() * polish.matrixV().transpose();
  return Rotation(std::move(o));
}

/// Grid offset of a seed on a closed SRVF with m samples (m-1 distinct points).
inline std::size_t seed_offset(const Srvf& q, double s) {
  const auto period = static_cast<long long>(q.size()) - 1;
  const double frac = s - std::floor(s);
  long long k = std::llround(frac * static_cast<double>(period));
  k %= period;
  if (k < 0) k += period;
  return static_cast<std::size_t>(k);
}

/// Re-unwraps a closed curve's SRVF at parameter s (snapped to the nearest grid
/// point): the result starts where the original was at s.
inline Srvf apply_seed(const Srvf& q, double s) {
  if (q.topology != Topology::closed) throw ArgumentError("seed shifts need a closed-curve SRVF");
  if (!q.grid.is_uniform()) throw ArgumentError("seed shifts need a uniform grid");
  const auto period = static_cast<Eigen::Index>(q.size()) - 1;
  const auto k = static_cast<Eigen::Index>(seed_offset(q, s));
  Srvf out = q;
  for (Eigen::Index i = 0; i < period; ++i) out.values.row(i) = q.values.row((i + k) % period);
  out.values.row(period) = out.values.row(0);
  return out;
}

/// Same re-unwrapping for a sampled closed curve.
inline Curve apply_seed(const Curve& c, double s) {
  if (!c.closed()) throw ArgumentError("seed shifts need a closed curve");
  const auto period = static_cast<Eigen::Index>(c.size()) - 1;
  const double frac = s - std::floor(s);
  const auto k = static_cast<Eigen::Index>(std::llround(frac * static_cast<double>(period)) % period);
  Points p = c.points();
  for (Eigen::Index i = 0; i < period; ++i) p.row(i) = c.points().row((i + k) % period);
  p.row(period) = p.row(0);
  return Curve(c.grid(), std::move(p), Topology::closed);
}

}  // namespace warpalign
