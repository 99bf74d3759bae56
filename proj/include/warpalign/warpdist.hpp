#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "warpalign/core.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign {

/// Parameters of the distribution D_theta o H on warps of [0,1]: the mean warp H,
/// the partition size n and the concentration theta.
struct WarpPrior {
  PLWarp mean_warp;
  int partition_size = 20;
  double concentration = 10.0;

  WarpPrior() = default;
  WarpPrior(PLWarp h, int n, double theta) : mean_warp(std::move(h)), partition_size(n), concentration(theta) {
    validate();
  }

  void validate() const {
    if (partition_size < 2) throw ArgumentError("partition size must be at least 2");
    if (!(concentration > 0.0) || !std::isfinite(concentration))
      throw ArgumentError("concentration must be positive");
  }
};

/// Distribution of the unwrapping seed c of a circular warp.
struct SeedDistribution {
  enum class Kind { uniform, von_mises };
  Kind kind = Kind::uniform;
  double center = 0.0;  // in [0,1), von Mises only
  double kappa = 0.0;

  static SeedDistribution uniform() { return {}; }
  static SeedDistribution von_mises(double center, double kappa) {
    if (!(kappa >= 0.0)) throw ArgumentError("von Mises concentration must be non-negative");
    if (!(center >= 0.0 && center < 1.0)) throw ArgumentError("von Mises center must lie in [0,1)");
    return {Kind::von_mises, center, kappa};
  }

  /// A draw in (0,1]; 0 is reported as 1 (the same point on the circle).
  double draw(Rng& rng) const {
    if (kind == Kind::uniform) return 1.0 - rnd::uniform(rng);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double c = rnd::von_mises(two_pi * center, kappa, rng) / two_pi;
    c -= std::floor(c);
    return c <= 0.0 ? 1.0 : c;
  }
};

/// Dirichlet(params) via normalized Gamma variates, computed in log space.
/// Components below kMinIncrement are raised to it and the vector renormalized.
inline std::vector<double> dirichlet_sample(std::span<const double> params, Rng& rng) {
  if (params.empty()) throw ArgumentError("Dirichlet needs at least one parameter");
  std::vector<double> logs(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0) || !std::isfinite(params[i]))
      throw ArgumentError("Dirichlet parameters must be positive");
    logs[i] = rnd::log_gamma_variate(params[i], rng);
  }
  const double top = *std::ranges::max_element(logs);
  double total = 0.0;
  for (double& v : logs) {
    v = std::exp(v - top);
    total += v;
  }
  double clamped_total = 0.0;
  for (double& v : logs) {
    v = std::max(v / total, kMinIncrement);
    clamped_total += v;
  }
  for (double& v : logs) v /= clamped_total;
  return logs;
}

/// Fixed-partition sampling with all Dirichlet parameters equal to alpha, on the
/// supplied partition.
inline PLWarp sample_on_partition(const Grid& partition, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be positive");
  const std::vector<double> params(partition.size() - 1, alpha);
  const auto p = dirichlet_sample(params, rng);
  return PLWarp::from_increments(std::vector<double>(partition.begin(), partition.end()), p);
}

/// Fixed-partition sampling on the equi-spaced partition k/n.
inline PLWarp sample_fixed(int n, double alpha, Rng& rng) {
  if (n < 2) throw ArgumentError("partition size must be at least 2");
  return sample_on_partition(Grid::uniform(static_cast<std::size_t>(n) + 1), alpha, rng);
}

/// Draws n-1 sorted Uniform(0,1) interior knots.
inline Grid random_partition(int n, Rng& rng) {
  if (n < 2) throw ArgumentError("partition size must be at least 2");
  for (;;) {
    std::vector<double> s(static_cast<std::size_t>(n) + 1);
    s.front() = 0.0;
    s.back() = 1.0;
    for (int k = 1; k < n; ++k) s[static_cast<std::size_t>(k)] = rnd::uniform_open(rng);
    std::sort(s.begin() + 1, s.end() - 1);
    if (std::adjacent_find(s.begin(), s.end()) == s.end()) return Grid(std::move(s));
  }
}

/// Dirichlet parameters theta * (H(s_k) - H(s_{k-1})) of the increments over a partition.
inline std::vector<double> increment_parameters(const WarpPrior& prior, const Grid& partition) {
  std::vector<double> params(partition.size() - 1);
  double prev = 0.0;
  for (std::size_t k = 1; k < partition.size(); ++k) {
    const double h = prior.mean_warp.eval(partition[k]);
    params[k - 1] = std::max(prior.concentration * (h - prev), std::numeric_limits<double>::min());
    prev = h;
  }
  return params;
}

/// Draw from D_theta o H conditional on a partition: knot values are the
/// cumulative sums of Dirichlet(theta * dH) increments.
inline PLWarp sample_on_partition(const WarpPrior& prior, const Grid& partition, Rng& rng) {
  const auto p = dirichlet_sample(increment_parameters(prior, partition), rng);
  return PLWarp::from_increments(std::vector<double>(partition.begin(), partition.end()), p);
}

/// Random-partition sampling from D_theta o H: uniform order-statistic knots,
/// increments Dirichlet with parameters theta * (H(s_k) - H(s_{k-1})).
inline PLWarp sample(const WarpPrior& prior, Rng& rng) {
  prior.validate();
  return sample_on_partition(prior, random_partition(prior.partition_size, rng), rng);
}

inline CircularWarp sample_circular(const WarpPrior& prior, const SeedDistribution& seeds, Rng& rng) {
  const double c = seeds.draw(rng);
  return make_circular(sample(prior, rng), c);
}

/// Log density of the knot values (at the interior partition points) under the
/// finite-dimensional Dirichlet projection of D_theta o H.
inline double log_density(const WarpPrior& prior, const Grid& partition, std::span<const double> values) {
  if (values.size() + 2 != partition.size())
    throw ArgumentError("need one value per interior partition point");
  const auto params = increment_parameters(prior, partition);
  double result = std::lgamma(prior.concentration);
  double prev = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double next = k < values.size() ? values[k] : 1.0;
    if (k < values.size() && !(next > 0.0 && next < 1.0))
      throw ArgumentError("knot values must lie in (0,1)");
    const double step = next - prev;
    if (!(step > 0.0)) throw ArgumentError("knot values must be strictly increasing");
    result += (params[k] - 1.0) * std::log(step) - std::lgamma(params[k]);
    prev = next;
  }
  return result;
}

struct Moments {
  double mean;
  double variance;
};

/// Marginal mean H(t) and variance H(t)(1 - H(t)) / (1 + theta).
inline Moments prior_moments(const WarpPrior& prior, double t) {
  const double h = prior.mean_warp.eval(t);
  return {h, h * (1.0 - h) / (1.0 + prior.concentration)};
}

struct DegeneracyRow {
  int n;
  double median_sup_distance;
};

/// For each n: fixed-partition warps on the partition t_k = F(k/n) (F = partition_cdf)
/// and the median sup-distance to their limit, the quantile function F^{-1}.
inline std::vector<DegeneracyRow> degeneracy_report(std::span<const int> n_list, double alpha,
                                                    const PLWarp& partition_cdf, int samples, Rng& rng) {
  if (n_list.empty()) throw ArgumentError("degeneracy report needs at least one partition size");
  if (samples < 1) throw ArgumentError("need at least one sample per partition size");
  const PLWarp limit = inverse(partition_cdf);
  std::vector<DegeneracyRow> rows;
  for (int n : n_list) {
    if (n < 2) throw ArgumentError("partition size must be at least 2");
    std::vector<double> knots(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
      knots[static_cast<std::size_t>(k)] = partition_cdf.eval(static_cast<double>(k) / n);
    const Grid partition(std::move(knots));
    std::vector<double> dist(static_cast<std::size_t>(samples));
    for (auto& d : dist) d = sup_distance(sample_on_partition(partition, alpha, rng), limit);
    std::sort(dist.begin(), dist.end());
    const std::size_t mid = dist.size() / 2;
    const double median = dist.size() % 2 ? dist[mid] : 0.5 * (dist[mid - 1] + dist[mid]);
    rows.push_back({n, median});
  }
  return rows;
}

/// PL approximation of a distribution function on [0,1] on an m-point uniform grid.
template <typename Cdf>
PLWarp tabulate_cdf(Cdf&& cdf, std::size_t m = 1001) {
  const Grid g = Grid::uniform(m);
  std::vector<double> t(g.begin(), g.end());
  std::vector<double> y(m);
  for (std::size_t k = 0; k < m; ++k) y[k] = cdf(t[k]);
  y.front() = 0.0;
  y.back() = 1.0;
  return PLWarp::sanitized(std::move(t), std::move(y));
}

}  // namespace warpalign
