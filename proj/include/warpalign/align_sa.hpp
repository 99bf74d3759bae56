#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "warpalign/core.hpp"
#include "warpalign/shapeops.hpp"
#include "warpalign/srvf.hpp"
#include "warpalign/warpdist.hpp"
#include "warpalign/warpmap.hpp"

namespace warpalign {

enum class SaMode { function, open_shape, closed_shape };

struct SaConfig {
  int n = 20;                  // partition size of the proposal distribution
  double theta = 100.0;        // proposal concentration (neighbourhood size)
  double t0 = 10.0;            // initial temperature
  double cooling = 1.0001;     // T <- T / cooling each iteration
  double blend = 0.9;          // weight of the sampled warp against the identity
  int max_iters = 20000;
  SaMode mode = SaMode::function;
  double von_mises_kappa = 50.0;  // seed proposal concentration, closed mode only
  bool early_stop = true;         // stop once T < 1e-3 and 500 iterations pass without acceptance

  void validate() const {
    if (n < 2) throw ArgumentError("SA partition size must be at least 2");
    if (!(theta > 0.0)) throw ArgumentError("SA concentration must be positive");
    if (!(t0 > 0.0)) throw ArgumentError("SA initial temperature must be positive");
    if (!(cooling > 1.0)) throw ArgumentError("SA cooling factor must exceed 1");
    if (!(blend >= 0.0 && blend <= 1.0)) throw ArgumentError("SA blend must lie in [0,1]");
    if (max_iters < 1) throw ArgumentError("SA needs at least one iteration");
    if (!(von_mises_kappa >= 0.0)) throw ArgumentError("von Mises concentration must be non-negative");
  }
};

struct AlignmentResult {
  PLWarp warp;
  Rotation rotation;
  double seed = 0.0;  // closed mode: q2 is re-unwrapped at this parameter before warping
  /// Energy of the Metropolis state after every iteration, starting with the
  /// initial state; the final entry is the energy of the returned (best) state.
  std::vector<double> energy_trace;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  int iterations = 0;
  int accepted = 0;
};

/// min{1, exp((E_current - E_proposed) / T)}.
inline double acceptance_probability(double e_current, double e_proposed, double temperature) {
  const double delta = e_current - e_proposed;
  if (delta >= 0.0) return 1.0;
  return std::exp(delta / temperature);
}

/// Metropolis decision for a uniform variate u in [0,1).
inline bool metropolis_accept(double e_current, double e_proposed, double temperature, double u) {
  return u < acceptance_probability(e_current, e_proposed, temperature);
}

/// Temperature after k iterations of geometric cooling.
inline double temperature_after(const SaConfig& cfg, int k) { return cfg.t0 / std::pow(cfg.cooling, k); }

/// One proposal: a draw from D_theta o H centred at the current warp, blended
/// toward the identity.
inline PLWarp propose_warp(const PLWarp& current, const SaConfig& cfg, Rng& rng) {
  const WarpPrior centred(current, cfg.n, cfg.theta);
  return blend(sample(centred, rng), PLWarp::identity(), cfg.blend);
}

namespace detail {

struct Evaluated {
  double energy;
  Rotation rotation;
};

inline Evaluated evaluate(const Srvf& q1, const Srvf& q2, const PLWarp& w, bool procrustes) {
  Srvf warped = warp_action(q2, w);
  Rotation o(q1.dim());
  if (procrustes) {
    o = optimal_rotation(q1, warped);
    warped = rotate(warped, o);
  }
  const double d = l2_dist(q1, warped);
  return {d * d, std::move(o)};
}

inline AlignmentResult anneal(const Srvf& q1, const Srvf& q2, const SaConfig& cfg, Rng& rng) {
  cfg.validate();
  detail::require_same_grid(q1, q2);
  const bool procrustes = cfg.mode != SaMode::function && q1.dim() > 1;
  const bool moving_seed = cfg.mode == SaMode::closed_shape;

  PLWarp current;
  double current_seed = 0.0;
  std::size_t current_offset = 0;
  Evaluated cur = evaluate(q1, q2, current, procrustes);

  AlignmentResult best;
  best.warp = current;
  best.rotation = cur.rotation;
  best.seed = 0.0;
  best.initial_energy = cur.energy;
  best.final_energy = cur.energy;
  best.energy_trace.reserve(static_cast<std::size_t>(cfg.max_iters) + 2);
  best.energy_trace.push_back(cur.energy);

  const std::size_t period = q1.size() - 1;
  Srvf shifted = q2;
  double temperature = cfg.t0;
  int since_accept = 0;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    double seed = current_seed;
    std::size_t offset = current_offset;
    if (moving_seed) {
      const double draw = SeedDistribution::von_mises(current_seed, cfg.von_mises_kappa).draw(rng);
      offset = seed_offset(q2, draw);
      seed = static_cast<double>(offset) / static_cast<double>(period);
    }
    const Srvf* source = &shifted;
    std::optional<Srvf> reseeded;
    if (offset != current_offset) {
      reseeded = apply_seed(q2, seed);
      source = &*reseeded;
    }

    PLWarp proposal = propose_warp(current, cfg, rng);
    Evaluated ev = evaluate(q1, *source, proposal, procrustes);
    const double u = rnd::uniform(rng);
    if (metropolis_accept(cur.energy, ev.energy, temperature, u)) {
      current = std::move(proposal);
      cur = std::move(ev);
      if (offset != current_offset) {
        shifted = std::move(*reseeded);
        current_offset = offset;
        current_seed = seed;
      }
      ++best.accepted;
      since_accept = 0;
      if (cur.energy < best.final_energy) {
        best.final_energy = cur.energy;
        best.warp = current;
        best.rotation = cur.rotation;
        best.seed = current_seed;
      }
    } else {
      ++since_accept;
    }
    best.energy_trace.push_back(cur.energy);
    temperature /= cfg.cooling;
    if (cfg.early_stop && temperature < 1e-3 && since_accept >= 500) {
      ++iter;
      break;
    }
  }
  best.iterations = iter;
  best.energy_trace.push_back(best.final_energy);
  return best;
}

}  // namespace detail

/// Simulated annealing over warps of [0,1] for univariate functions.
inline AlignmentResult sa_align(const Srvf& q1, const Srvf& q2, const SaConfig& cfg, Rng& rng) {
  SaConfig c = cfg;
  c.mode = SaMode::function;
  return detail::anneal(q1, q2, c, rng);
}

/// Shapes of open curves: a Procrustes rotation is fitted for every proposal.
inline AlignmentResult sa_align_open_shape(const Srvf& q1, const Srvf& q2, const SaConfig& cfg, Rng& rng) {
  if (!q1.is_shape || !q2.is_shape) throw ArgumentError("shape alignment needs unit-norm SRVFs");
  SaConfig c = cfg;
  c.mode = SaMode::open_shape;
  return detail::anneal(q1, q2, c, rng);
}

/// Shapes of closed curves: joint proposal of a von Mises seed move and a warp.
inline AlignmentResult sa_align_closed(const Srvf& q1, const Srvf& q2, const SaConfig& cfg, Rng& rng) {
  if (q1.topology != Topology::closed || q2.topology != Topology::closed)
    throw ArgumentError("closed alignment needs closed-curve SRVFs");
  if (!q1.is_shape || !q2.is_shape) throw ArgumentError("shape alignment needs unit-norm SRVFs");
  SaConfig c = cfg;
  c.mode = SaMode::closed_shape;
  return detail::anneal(q1, q2, c, rng);
}

/// Dispatches on cfg.mode.
inline AlignmentResult align(const Srvf& q1, const Srvf& q2, const SaConfig& cfg, Rng& rng) {
  switch (cfg.mode) {
    case SaMode::open_shape:
      return sa_align_open_shape(q1, q2, cfg, rng);
    case SaMode::closed_shape:
      return sa_align_closed(q1, q2, cfg, rng);
    case SaMode::function:
      break;
  }
  return sa_align(q1, q2, cfg, rng);
}

/// Applies an alignment result to q2: re-unwrap (closed), warp, rotate.
inline Srvf apply_alignment(const Srvf& q2, const AlignmentResult& r) {
  Srvf q = q2;
  if (q.topology == Topology::closed && r.seed != 0.0) q = apply_seed(q, r.seed);
  q = warp_action(q, r.warp);
  if (r.rotation.dim() == q.dim() && q.dim() > 1) q = rotate(q, r.rotation);
  return q;
}

}  // namespace warpalign
