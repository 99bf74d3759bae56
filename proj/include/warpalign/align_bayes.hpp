#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "warpalign/core.hpp"
#include "warpalign/srvf.hpp"
#include "warpalign/warpdist.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign {

struct BayesConfig {
  WarpPrior prior{PLWarp(), 20, 10.0};
  double a0 = 0.01;  // Gamma prior on the likelihood precision: shape
  double b0 = 0.01;  // and rate
  int draws = 20000;
  int resample_size = 2000;

  void validate() const {
    prior.validate();
    if (!(a0 > 0.0) || !(b0 > 0.0)) throw ArgumentError("Gamma hyperparameters must be positive");
    if (resample_size < 1 || draws < resample_size) throw ArgumentError("need draws >= resample size >= 1");
  }
};

struct PosteriorSample {
  std::vector<PLWarp> warps;   // resampled, equally weighted
  std::vector<double> weights;  // normalized importance weights of the prior draws
  double ess = 0.0;
};

/// Sum of squared residuals |q1(t_k) - (q2 o w)(t_k) sqrt(w'(t_k))|^2 over grid points.
inline double residual_sse(const Srvf& q1, const Srvf& q2, const PLWarp& w) {
  detail::require_same_grid(q1, q2);
  return (q1.values - warp_action(q2, w).values).squaredNorm();
}

/// Log-likelihood with the common Gaussian precision integrated out under a
/// Gamma(a0, b0) prior, up to a warp-independent constant:
///   -(a0 + N/2) log(b0 + SSE/2), N = number of observed coordinates.
inline double marginal_loglik_from_sse(double sse, std::size_t observations, double a0, double b0) {
  return -(a0 + 0.5 * static_cast<double>(observations)) * std::log(b0 + 0.5 * sse);
}

inline double marginal_loglik(const Srvf& q1, const Srvf& q2, const PLWarp& w, double a0, double b0) {
  const double sse = residual_sse(q1, q2, w);
  return marginal_loglik_from_sse(sse, q1.size() * static_cast<std::size_t>(q1.dim()), a0, b0);
}

/// Normalized weights from log weights, shifted by their maximum.
inline std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw ArgumentError("no weights to normalize");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : log_weights)
    if (!std::isnan(v)) top = std::max(top, v);
  if (!std::isfinite(top)) throw NumericalError("likelihood collapse: no finite importance weight");
  std::vector<double> w(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::isnan(log_weights[i]) ? 0.0 : std::exp(log_weights[i] - top);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

inline double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return 1.0 / s;
}

/// Multinomial resampling of `count` indices proportional to weights.
inline std::vector<std::size_t> resample_indices(std::span<const double> weights, int count, Rng& rng) {
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cumulative[i] = acc += weights[i];
  std::vector<std::size_t> out(static_cast<std::size_t>(count));
  for (auto& idx : out) {
    const double u = rnd::uniform(rng) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    idx = std::min(static_cast<std::size_t>(it - cumulative.begin()), weights.size() - 1);
  }
  return out;
}

/// Sampling importance resampling with the prior as importance function.
inline PosteriorSample sir_posterior(const Srvf& q1, const Srvf& q2, const BayesConfig& cfg, Rng& rng) {
  cfg.validate();
  detail::require_same_grid(q1, q2);
  std::vector<PLWarp> draws;
  draws.reserve(static_cast<std::size_t>(cfg.draws));
  std::vector<double> logw(static_cast<std::size_t>(cfg.draws));
  for (int i = 0; i < cfg.draws; ++i) {
    draws.push_back(sample(cfg.prior, rng));
    logw[static_cast<std::size_t>(i)] = marginal_loglik(q1, q2, draws.back(), cfg.a0, cfg.b0);
  }
  PosteriorSample out;
  out.weights = normalize_log_weights(logw);
  out.ess = effective_sample_size(out.weights);
  for (std::size_t idx : resample_indices(out.weights, cfg.resample_size, rng)) out.warps.push_back(draws[idx]);
  return out;
}

/// Posterior mean warp with a pointwise 95% band on a grid.
struct PosteriorBand {
  Grid grid;
  PLWarp mean_warp;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Linear-interpolation empirical quantile of sorted data (the "type 7" rule).
inline double empirical_quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline PosteriorBand posterior_summary(std::span<const PLWarp> warps, const Grid& grid) {
  if (warps.empty()) throw ArgumentError("empty posterior sample");
  const std::size_t m = grid.size();
  PosteriorBand band{grid, PLWarp(), std::vector<double>(m, 0.0), std::vector<double>(m), std::vector<double>(m)};
  std::vector<std::vector<double>> columns(m, std::vector<double>(warps.size()));
  for (std::size_t i = 0; i < warps.size(); ++i) {
    const auto values = warps[i].eval_on(grid);
    for (std::size_t k = 0; k < m; ++k) columns[k][i] = values[k];
  }
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0;
    for (double v : columns[k]) s += v;
    // averages of increasing maps are increasing; the max only absorbs rounding
    running = std::max(running, s / static_cast<double>(warps.size()));
    band.mean[k] = running;
    std::sort(columns[k].begin(), columns[k].end());
    band.lower[k] = empirical_quantile(columns[k], 0.025);
    band.upper[k] = empirical_quantile(columns[k], 0.975);
  }
  band.mean.front() = 0.0;
  band.mean.back() = 1.0;
  band.mean_warp = PLWarp::sanitized(std::vector<double>(grid.begin(), grid.end()), band.mean);
  return band;
}

inline PosteriorBand posterior_summary(const PosteriorSample& s, const Grid& grid) {
  return posterior_summary(std::span<const PLWarp>(s.warps), grid);
}

}  // namespace warpalign
