#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <cstdint>
#include <utility>
#include <vector>

#include "warpalign/align_bayes.hpp"
#include "warpalign/align_sa.hpp"
#include "warpalign/core.hpp"
#include "warpalign/srvf.hpp"
#include "warpalign/warpdist.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign {

/// Corresponding positions: a on the domain of curve 1, b on the domain of curve 2.
struct LandmarkPair {
  double a;
  double b;
};

class LandmarkSet {
 public:
  LandmarkSet() = default;
  explicit LandmarkSet(std::vector<LandmarkPair> pairs) : pairs_(std::move(pairs)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto [a, b] = pairs_[i];
      if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) throw ArgumentError("landmarks must lie in (0,1)");
      if (i > 0 && !(a > pairs_[i - 1].a && b > pairs_[i - 1].b))
        throw ArgumentError("landmark positions must be strictly increasing on both curves");
    }
  }

  const std::vector<LandmarkPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

 private:
  std::vector<LandmarkPair> pairs_;
};

/// PL warp through (0,0), (a_i, b_i), (1,1): curve 2 composed with it has its
/// landmarks at the curve-1 positions.
inline PLWarp landmark_prewarp(const LandmarkSet& lm) {
  std::vector<double> t{0.0}, y{0.0};
  for (const auto& p : lm.pairs()) {
    t.push_back(p.a);
    y.push_back(p.b);
  }
  t.push_back(1.0);
  y.push_back(1.0);
  return PLWarp(std::move(t), std::move(y));
}

/// Segment boundaries 0, a_1, ..., a_m, 1 on the curve-1 domain.
inline std::vector<double> landmark_breakpoints(const LandmarkSet& lm) {
  std::vector<double> bp{0.0};
  for (const auto& p : lm.pairs()) bp.push_back(p.a);
  bp.push_back(1.0);
  return bp;
}

/// Prior for a segment of length L: identity mean, concentration theta * L,
/// partition size max(2, round(n * L)).
inline WarpPrior segment_prior(const WarpPrior& base, double length) {
  const int n = std::max(2, static_cast<int>(std::lround(base.partition_size * length)));
  return WarpPrior(PLWarp::identity(), n, base.concentration * length);
}

inline SaConfig segment_config(const SaConfig& base, double length) {
  SaConfig c = base;
  c.mode = SaMode::function;
  c.n = std::max(2, static_cast<int>(std::lround(base.n * length)));
  c.theta = base.theta * length;
  return c;
}

inline BayesConfig segment_config(const BayesConfig& base, double length) {
  BayesConfig c = base;
  c.prior = segment_prior(base.prior, length);
  return c;
}

/// Glues per-segment warps of [0,1] into one warp; segment j acts on
/// [breakpoints[j], breakpoints[j+1]] and fixes its endpoints.
inline PLWarp glue_segments(std::span<const double> breakpoints, std::span<const PLWarp> pieces) {
  if (pieces.size() + 1 != breakpoints.size()) throw ArgumentError("need one warp per segment");
  std::vector<double> t{0.0}, y{0.0};
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const double lo = breakpoints[j];
    const double hi = breakpoints[j + 1];
    const double len = hi - lo;
    const auto kt = pieces[j].knot_t();
    const auto ky = pieces[j].knot_y();
    for (std::size_t k = 1; k + 1 < kt.size(); ++k) {
      t.push_back(lo + kt[k] * len);
      y.push_back(lo + ky[k] * len);
    }
    t.push_back(hi);
    y.push_back(hi);
  }
  // Breakpoints stay exact; interior knots that round onto or past them are dropped.
  std::vector<double> tt{0.0}, yy{0.0};
  for (std::size_t k = 1; k < t.size(); ++k) {
    const bool breakpoint = std::find(breakpoints.begin(), breakpoints.end(), t[k]) != breakpoints.end() && t[k] == y[k];
    if (breakpoint) {
      while (tt.size() > 1 && (tt.back() >= t[k] || yy.back() >= y[k])) {
        tt.pop_back();
        yy.pop_back();
      }
      tt.push_back(t[k]);
      yy.push_back(y[k]);
    } else if (t[k] > tt.back() && y[k] > yy.back()) {
      tt.push_back(t[k]);
      yy.push_back(y[k]);
    }
  }
  return PLWarp(std::move(tt), std::move(yy));
}

/// Curve samples restricted to [lo, hi] and reparameterized to [0,1] on `count` uniform points.
inline Curve restrict_curve(const Curve& c, double lo, double hi, std::size_t count) {
  const Grid g = Grid::uniform(count);
  Points p(static_cast<Eigen::Index>(count), c.dim());
  for (std::size_t k = 0; k < count; ++k) {
    const double t = k + 1 == count ? hi : lo + g[k] * (hi - lo);
    p.row(static_cast<Eigen::Index>(k)) = c.at(t);
  }
  return Curve(g, std::move(p), Topology::open);
}

struct ConstrainedResult {
  PLWarp warp;      // final map: prewarp o glued
  PLWarp prewarp;
  PLWarp glued;
  std::vector<double> breakpoints;
  std::vector<PLWarp> segment_warps;
  std::vector<WarpPrior> segment_priors;
  std::vector<double> segment_energies;
  std::vector<PLWarp> posterior_warps;  // Bayes only: global warps, one per resample index
  double energy = 0.0;                  // E(glued) between curve 1 and the pre-warped curve 2
};

namespace detail {

struct PreparedSegments {
  PLWarp prewarp;
  std::vector<double> breakpoints;
  std::vector<Srvf> q1;
  std::vector<Srvf> q2;
  Srvf full_q1;
  Srvf full_q2;
};

inline PreparedSegments prepare_segments(const Curve& g1, const Curve& g2, const LandmarkSet& lm) {
  if (g1.dim() != g2.dim()) throw ArgumentError("curves must have equal dimension");
  PLWarp pre = landmark_prewarp(lm);
  // curve 2 reparameterized by the prewarp, sampled on curve 1's grid
  Points p2(static_cast<Eigen::Index>(g1.size()), g2.dim());
  for (std::size_t k = 0; k < g1.size(); ++k) p2.row(static_cast<Eigen::Index>(k)) = g2.at(pre.eval(g1.grid()[k]));
  const Curve moved(g1.grid(), std::move(p2), Topology::open);

  PreparedSegments out{pre, landmark_breakpoints(lm), {}, {}, to_srvf(Curve(g1.grid(), g1.points(), Topology::open)),
                       to_srvf(moved)};
  for (std::size_t j = 0; j + 1 < out.breakpoints.size(); ++j) {
    const double lo = out.breakpoints[j];
    const double hi = out.breakpoints[j + 1];
    std::size_t count = 0;
    for (double t : g1.grid())
      if (t >= lo && t <= hi) ++count;
    if (count < 3)
      throw DataError("landmark segment [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] holds fewer than 3 samples; resample the curves more finely");
    out.q1.push_back(to_srvf(restrict_curve(g1, lo, hi, count)));
    out.q2.push_back(to_srvf(restrict_curve(moved, lo, hi, count)));
  }
  return out;
}

inline void finish(ConstrainedResult& r, const PreparedSegments& prep) {
  r.prewarp = prep.prewarp;
  r.breakpoints = prep.breakpoints;
  r.glued = glue_segments(r.breakpoints, r.segment_warps);
  r.warp = compose(r.prewarp, r.glued);
  r.energy = warp_energy(prep.full_q1, prep.full_q2, r.glued);
}

}  // namespace detail

/// Landmark-constrained simulated annealing with one RNG stream per segment.
/// Segments are independent and run on up to `threads` threads.
inline ConstrainedResult constrained_align_streams(const Curve& g1, const Curve& g2, const LandmarkSet& lm,
                                                   const SaConfig& cfg, std::span<const std::uint64_t> streams,
                                                   unsigned threads = 1) {
  const auto prep = detail::prepare_segments(g1, g2, lm);
  if (streams.size() != prep.q1.size()) throw ArgumentError("need one RNG stream per segment");
  const std::size_t count = prep.q1.size();
  std::vector<AlignmentResult> results(count);
  std::vector<SaConfig> configs(count);
  for (std::size_t j = 0; j < count; ++j) configs[j] = segment_config(cfg, prep.breakpoints[j + 1] - prep.breakpoints[j]);
  parallel_for(count, threads, [&](std::size_t j) {
    Rng rng(streams[j]);
    results[j] = sa_align(prep.q1[j], prep.q2[j], configs[j], rng);
  });
  ConstrainedResult r;
  for (std::size_t j = 0; j < count; ++j) {
    r.segment_priors.emplace_back(PLWarp::identity(), configs[j].n, configs[j].theta);
    r.segment_energies.push_back(results[j].final_energy);
    r.segment_warps.push_back(std::move(results[j].warp));
  }
  detail::finish(r, prep);
  return r;
}

/// Landmark-constrained SIR; the reported warp is the glued posterior mean.
inline ConstrainedResult constrained_align_streams(const Curve& g1, const Curve& g2, const LandmarkSet& lm,
                                                   const BayesConfig& cfg, std::span<const std::uint64_t> streams,
                                                   unsigned threads = 1) {
  cfg.validate();
  const auto prep = detail::prepare_segments(g1, g2, lm);
  if (streams.size() != prep.q1.size()) throw ArgumentError("need one RNG stream per segment");
  const std::size_t segments = prep.q1.size();
  std::vector<BayesConfig> configs(segments);
  for (std::size_t j = 0; j < segments; ++j)
    configs[j] = segment_config(cfg, prep.breakpoints[j + 1] - prep.breakpoints[j]);
  std::vector<PosteriorSample> posteriors(segments);
  parallel_for(segments, threads, [&](std::size_t j) {
    Rng rng(streams[j]);
    posteriors[j] = sir_posterior(prep.q1[j], prep.q2[j], configs[j], rng);
  });
  ConstrainedResult r;
  for (std::size_t j = 0; j < segments; ++j) {
    const auto band = posterior_summary(posteriors[j], prep.q1[j].grid);
    r.segment_priors.push_back(configs[j].prior);
    r.segment_energies.push_back(warp_energy(prep.q1[j], prep.q2[j], band.mean_warp));
    r.segment_warps.push_back(band.mean_warp);
  }
  detail::finish(r, prep);
  const std::size_t count = posteriors.front().warps.size();
  r.posterior_warps.reserve(count);
  std::vector<PLWarp> pieces(posteriors.size());
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < posteriors.size(); ++j) pieces[j] = posteriors[j].warps[i];
    r.posterior_warps.push_back(compose(r.prewarp, glue_segments(r.breakpoints, pieces)));
  }
  return r;
}

/// Derives the per-segment streams from one seed (stream j = stream_seed(seed, j)).
template <typename Config>
ConstrainedResult constrained_align(const Curve& g1, const Curve& g2, const LandmarkSet& lm, const Config& cfg,
                                    std::uint64_t seed, unsigned threads = 1) {
  std::vector<std::uint64_t> streams(lm.size() + 1);
  for (std::size_t j = 0; j < streams.size(); ++j) streams[j] = stream_seed(seed, j);
  return constrained_align_streams(g1, g2, lm, cfg, streams, threads);
}

/// Grid of the curve plus every landmark position (for band summaries).
inline Grid grid_with_landmarks(const Grid& grid, const LandmarkSet& lm) {
  std::vector<double> v(grid.begin(), grid.end());
  for (const auto& p : lm.pairs()) v.push_back(p.a);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return Grid(std::move(v));
}

}  // namespace warpalign
