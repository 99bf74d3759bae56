#pragma once

// Synthetic curve pairs standing in for the data sets the method is usually
// demonstrated on: bump functions, an ECG-like complex, 3D spirals and planar
// closed outlines.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "warpalign/srvf.hpp"

namespace warpalign::fixtures {

struct CurvePair {
  std::string name;
  Curve first;
  Curve second;
};

namespace detail {

inline double bump(double t, double center, double width) {
  const double z = (t - center) / width;
  return std::exp(-0.5 * z * z);
}

inline Curve sample(std::size_t m, int dim, Topology topo, const std::function<Eigen::RowVectorXd(double)>& f) {
  Grid g = Grid::uniform(m);
  Points p(static_cast<Eigen::Index>(m), dim);
  for (std::size_t k = 0; k < m; ++k) p.row(static_cast<Eigen::Index>(k)) = f(g[k]);
  if (topo == Topology::closed) p.row(p.rows() - 1) = p.row(0);
  return Curve(std::move(g), std::move(p), topo);
}

inline Eigen::RowVectorXd scalar(double v) {
  Eigen::RowVectorXd r(1);
  r << v;
  return r;
}

}  // namespace detail

/// Two-bump functions with peaks at (0.3, 0.7) and (0.4, 0.75).
inline CurvePair two_bump(std::size_t m = 100) {
  using detail::bump;
  auto f1 = [](double t) { return detail::scalar(bump(t, 0.30, 0.07) + 0.7 * bump(t, 0.70, 0.07)); };
  auto f2 = [](double t) { return detail::scalar(0.9 * bump(t, 0.40, 0.06) + 0.8 * bump(t, 0.75, 0.05)); };
  return {"two_bump", detail::sample(m, 1, Topology::open, f1), detail::sample(m, 1, Topology::open, f2)};
}

/// Peak locations of two_bump(), as (first, second) landmark pairs.
inline std::vector<std::pair<double, double>> two_bump_peaks() { return {{0.30, 0.40}, {0.70, 0.75}}; }

/// ECG-like P, Q, R, S, T waves; the second complex has shifted and rescaled waves.
inline CurvePair pqrst(std::size_t m = 100) {
  using detail::bump;
  auto wave = [](double t, double p, double r, double tw) {
    return 0.15 * bump(t, p, 0.035) - 0.12 * bump(t, r - 0.04, 0.012) + 1.0 * bump(t, r, 0.015) -
           0.25 * bump(t, r + 0.04, 0.012) + 0.3 * bump(t, tw, 0.05);
  };
  auto f1 = [&](double t) { return detail::scalar(wave(t, 0.18, 0.40, 0.70)); };
  auto f2 = [&](double t) { return detail::scalar(0.9 * wave(t, 0.22, 0.47, 0.78)); };
  return {"pqrst", detail::sample(m, 1, Topology::open, f1), detail::sample(m, 1, Topology::open, f2)};
}

/// 3D spirals; the second has a slightly different pitch and radius profile and
/// is traversed with a strongly non-uniform speed.
inline CurvePair spirals(std::size_t m = 100) {
  constexpr double pi = std::numbers::pi;
  auto spiral = [](double s, double turns, double shrink, double height) {
    Eigen::RowVectorXd p(3);
    const double r = 1.0 - shrink * s;
    p << r * std::cos(2.0 * pi * turns * s), r * std::sin(2.0 * pi * turns * s), height * s;
    return p;
  };
  auto f1 = [&](double t) { return spiral(t, 2.0, 0.5, 2.0); };
  auto f2 = [&](double t) {
    const double s = 0.5 * (t + t * t * t);  // speeds up along the curve
    return spiral(s, 2.1, 0.45, 2.1);
  };
  return {"spirals", detail::sample(m, 3, Topology::open, f1), detail::sample(m, 3, Topology::open, f2)};
}

/// Planar closed outlines given by radial profiles; the second is a perturbed
/// copy, traversed non-uniformly and starting from a different point.
inline CurvePair closed_shapes(std::size_t m = 100) {
  constexpr double pi = std::numbers::pi;
  auto outline = [](double phi, double a3, double p3, double a2) {
    const double r = 1.0 + a3 * std::cos(3.0 * phi + p3) + a2 * std::sin(2.0 * phi);
    Eigen::RowVectorXd p(2);
    p << r * std::cos(phi), r * std::sin(phi);
    return p;
  };
  auto f1 = [&](double t) { return outline(2.0 * pi * t, 0.25, 0.0, 0.12); };
  auto f2 = [&](double t) {
    const double s = t + 0.04 * std::sin(2.0 * pi * t);  // non-uniform speed, still a circle map
    return outline(2.0 * pi * (s + 0.2), 0.22, 0.15, 0.15);
  };
  return {"closed_shapes", detail::sample(m, 2, Topology::closed, f1), detail::sample(m, 2, Topology::closed, f2)};
}

inline std::vector<CurvePair> all(std::size_t m = 100) { return {two_bump(m), pqrst(m), spirals(m), closed_shapes(m)}; }

}  // namespace warpalign::fixtures
