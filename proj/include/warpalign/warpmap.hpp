#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "warpalign/core.hpp"

namespace warpalign {

/// Smallest admissible increment of a warp between consecutive knots.
inline constexpr double kMinIncrement = 1e-10;

/// An ordered discretization 0 = t_0 < t_1 < ... < t_m = 1 of the unit interval.
class Grid {
 public:
  explicit Grid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw ArgumentError("grid needs at least two points");
    if (values_.front() != 0.0 || values_.back() != 1.0)
      throw ArgumentError("grid must start at 0 and end at 1");
    for (std::size_t k = 1; k < values_.size(); ++k)
      if (!(values_[k] > values_[k - 1])) throw ArgumentError("grid must be strictly increasing");
  }

  /// m equi-spaced points, endpoints exact.
  static Grid uniform(std::size_t m) {
    if (m < 2) throw ArgumentError("grid needs at least two points");
    std::vector<double> v(m);
    for (std::size_t k = 0; k < m; ++k) v[k] = static_cast<double>(k) / static_cast<double>(m - 1);
    v.back() = 1.0;
    return Grid(std::move(v));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  /// True when the spacing is constant to within 1e-12.
  bool is_uniform() const {
    const double h = 1.0 / static_cast<double>(values_.size() - 1);
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (std::abs(values_[k] - h * static_cast<double>(k)) > 1e-12) return false;
    return true;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<double> values_;
};

/// A piecewise-linear, strictly increasing map of [0,1] onto itself.
///
/// Knots (t_k, y_k) satisfy t_0 = y_0 = 0, t_K = y_K = 1 and both coordinates are
/// strictly increasing. Values are immutable after construction.
class PLWarp {
 public:
  /// The identity warp.
  PLWarp() : t_{0.0, 1.0}, y_{0.0, 1.0} {}

  PLWarp(std::vector<double> t, std::vector<double> y) : t_(std::move(t)), y_(std::move(y)) {
    if (t_.size() != y_.size()) throw ArgumentError("knot coordinate lengths differ");
    if (t_.size() < 2) throw ArgumentError("warp needs at least two knots");
    if (t_.front() != 0.0 || t_.back() != 1.0 || y_.front() != 0.0 || y_.back() != 1.0)
      throw ArgumentError("warp must fix the endpoints 0 and 1");
    for (std::size_t k = 1; k < t_.size(); ++k) {
      if (!(t_[k] > t_[k - 1])) throw ArgumentError("warp knots must be strictly increasing in t");
      if (!(y_[k] > y_[k - 1])) throw ArgumentError("warp values must be strictly increasing");
    }
  }

  static PLWarp identity() { return PLWarp(); }

  /// Builds a warp from knot positions and non-negative increments summing to one.
  /// Increments below kMinIncrement are raised to it and the vector renormalized,
  /// so the result is strictly increasing even when a sampler underflowed.
  static PLWarp from_increments(std::vector<double> t, std::span<const double> increments) {
    if (increments.size() + 1 != t.size())
      throw ArgumentError("need one increment per partition cell");
    std::vector<double> p(increments.begin(), increments.end());
    double total = 0.0;
    for (double& v : p) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("increments must be finite and non-negative");
      v = std::max(v, kMinIncrement);
      total += v;
    }
    std::vector<double> y(t.size());
    y[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      acc += p[k] / total;
      y[k + 1] = acc;
    }
    y.back() = 1.0;
    return sanitized(std::move(t), std::move(y));
  }

  /// Drops interior knots that would break strict monotonicity through rounding.
  static PLWarp sanitized(std::vector<double> t, std::vector<double> y) {
    std::vector<double> tt{0.0}, yy{0.0};
    tt.reserve(t.size());
    yy.reserve(y.size());
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
      if (t[k] > tt.back() && y[k] > yy.back() && t[k] < 1.0 && y[k] < 1.0) {
        tt.push_back(t[k]);
        yy.push_back(y[k]);
      }
    }
    tt.push_back(1.0);
    yy.push_back(1.0);
    return PLWarp(std::move(tt), std::move(yy));
  }

  std::size_t knot_count() const noexcept { return t_.size(); }
  std::span<const double> knot_t() const noexcept { return t_; }
  std::span<const double> knot_y() const noexcept { return y_; }

  /// Linear interpolation between knots; exact at knots.
  double eval(double t) const {
    check_domain(t);
    const std::size_t k = segment(t);
    if (t == t_[k]) return y_[k];
    return y_[k] + (t - t_[k]) * (y_[k + 1] - y_[k]) / (t_[k + 1] - t_[k]);
  }

  /// Slope of the segment containing t; right-continuous at knots, left slope at t = 1.
  double derivative(double t) const {
    check_domain(t);
    const std::size_t k = segment(t);
    return (y_[k + 1] - y_[k]) / (t_[k + 1] - t_[k]);
  }

  std::vector<double> eval_on(const Grid& grid) const {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = eval(grid[k]);
    return out;
  }

  friend bool operator==(const PLWarp&, const PLWarp&) = default;

 private:
  static void check_domain(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("warp evaluated outside [0,1]: " + std::to_string(t));
  }

  // Index k of the segment [t_k, t_{k+1}) containing t; t = 1 maps to the last segment.
  std::size_t segment(double t) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - t_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, t_.size() - 2);
  }

  std::vector<double> t_;
  std::vector<double> y_;
};

inline PLWarp inverse(const PLWarp& w) {
  const auto t = w.knot_t();
  const auto y = w.knot_y();
  return PLWarp(std::vector<double>(y.begin(), y.end()), std::vector<double>(t.begin(), t.end()));
}

/// outer after inner. Knots at the inner knots and the inner-preimages of the
/// outer knots, which makes the result exact as a PL map.
inline PLWarp compose(const PLWarp& outer, const PLWarp& inner) {
  struct Point {
    double s;  // position in the domain of inner
    double v;  // inner(s)
  };
  std::vector<Point> pts;
  pts.reserve(outer.knot_count() + inner.knot_count());
  const auto it = inner.knot_t();
  const auto iy = inner.knot_y();
  for (std::size_t k = 0; k < it.size(); ++k) pts.push_back({it[k], iy[k]});
  const PLWarp inner_inv = inverse(inner);
  const auto ot = outer.knot_t();
  for (std::size_t k = 1; k + 1 < ot.size(); ++k) pts.push_back({inner_inv.eval(ot[k]), ot[k]});
  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.s < b.s; });

  std::vector<double> t, y;
  t.reserve(pts.size());
  y.reserve(pts.size());
  for (const auto& p : pts) {
    t.push_back(p.s);
    y.push_back(outer.eval(p.v));
  }
  return PLWarp::sanitized(std::move(t), std::move(y));
}

/// Restriction of w to [a,b] rescaled to a warp of [0,1]:
///   u -> (w(a + u(b-a)) - w(a)) / (w(b) - w(a)).
inline PLWarp restrict(const PLWarp& w, double a, double b) {
  if (!(a >= 0.0 && b <= 1.0 && a < b)) throw ArgumentError("restrict needs 0 <= a < b <= 1");
  const double ya = w.eval(a);
  const double yb = w.eval(b);
  const double len = b - a;
  const double height = yb - ya;
  std::vector<double> t{0.0}, y{0.0};
  const auto kt = w.knot_t();
  for (std::size_t k = 0; k < kt.size(); ++k) {
    if (kt[k] > a && kt[k] < b) {
      t.push_back((kt[k] - a) / len);
      y.push_back((w.knot_y()[k] - ya) / height);
    }
  }
  t.push_back(1.0);
  y.push_back(1.0);
  return PLWarp::sanitized(std::move(t), std::move(y));
}

namespace detail {
inline std::vector<double> union_knots(const PLWarp& a, const PLWarp& b) {
  std::vector<double> t;
  t.reserve(a.knot_count() + b.knot_count());
  std::ranges::merge(a.knot_t(), b.knot_t(), std::back_inserter(t));
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}
}  // namespace detail

/// Pointwise convex combination weight * a + (1 - weight) * b on the union knot set.
inline PLWarp blend(const PLWarp& a, const PLWarp& b, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw ArgumentError("blend weight must lie in [0,1]");
  std::vector<double> t = detail::union_knots(a, b);
  std::vector<double> y(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) y[k] = weight * a.eval(t[k]) + (1.0 - weight) * b.eval(t[k]);
  y.front() = 0.0;
  y.back() = 1.0;
  return PLWarp::sanitized(std::move(t), std::move(y));
}

/// sup_t |a(t) - b(t)|, exact for PL maps (attained at a knot of either).
inline double sup_distance(const PLWarp& a, const PLWarp& b) {
  double d = 0.0;
  for (double t : detail::union_knots(a, b)) d = std::max(d, std::abs(a.eval(t) - b.eval(t)));
  return d;
}

/// A warp of the unit-circumference circle: t -> (base(t) + seed) mod 1.
class CircularWarp {
 public:
  CircularWarp(PLWarp base, double seed, double wrap_point)
      : base_(std::move(base)), seed_(seed), wrap_point_(wrap_point) {}

  const PLWarp& base() const noexcept { return base_; }
  double seed() const noexcept { return seed_; }
  /// The unique t_c with base(t_c) + seed = 1; 0 for the degenerate seed 1.
  double wrap_point() const noexcept { return wrap_point_; }

  /// Value in [0,1). Left of the wrap point values rise toward 1; from the wrap point on they restart at 0.
  double eval(double t) const {
    if (seed_ == 1.0) return base_.eval(t);
    if (t < wrap_point_) return base_.eval(t) + seed_;
    if (t == wrap_point_) return 0.0;
    return std::max(0.0, base_.eval(t) + seed_ - 1.0);
  }

  /// The lift base(t) + seed, continuous and increasing on [0,1].
  double lift(double t) const { return base_.eval(t) + seed_; }

 private:
  PLWarp base_;
  double seed_;
  double wrap_point_;
};

inline CircularWarp make_circular(PLWarp g, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ArgumentError("circular seed must lie in (0,1]");
  const double tc = c == 1.0 ? 0.0 : inverse(g).eval(1.0 - c);
  return CircularWarp(std::move(g), c, tc);
}

}  // namespace warpalign
