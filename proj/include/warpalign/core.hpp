#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace warpalign {

inline constexpr const char* kVersion = "0.1.0";

// Thrown for inputs outside an operation's mathematical domain (e.g. eval at t > 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown for malformed arguments: bad parameters, mismatched grids, wrong topology.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when input data (files, curves) violates a data invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical procedure cannot produce a result (e.g. all SIR weights underflow).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The random engine used throughout. mt19937_64 is fully specified by the
/// standard, so a fixed seed gives bit-identical streams on every platform.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream index.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t base, std::uint64_t index) {
  return Rng{stream_seed(base, index)};
}

/// Runs fn(0..count-1) on up to `threads` threads. Each index runs exactly once,
/// so results depend only on fn, not on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace rnd {

// The std:: distributions are implementation-defined; these are not, which keeps
// sampled warps reproducible across standard libraries.

/// Uniform on [0, 1) with 53 random bits.
inline double uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1).
inline double uniform_open(Rng& rng) {
  double u;
  do {
    u = uniform(rng);
  } while (u == 0.0);
  return u;
}

/// Standard normal by the Marsaglia polar method (second variate discarded).
inline double normal(Rng& rng) {
  double u, v, s;
  do {
    u = 2.0 * uniform(rng) - 1.0;
    v = 2.0 * uniform(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

/// log of a Gamma(shape, 1) variate.
///
/// Marsaglia-Tsang squeeze for shape >= 1. For shape < 1 the boosting identity
/// G(a) = G(a+1) * U^(1/a) is applied in log space, so tiny shapes cannot
/// underflow the variate to zero.
inline double log_gamma_variate(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw ArgumentError("gamma shape must be positive");
  if (shape < 1.0) {
    const double boosted = log_gamma_variate(shape + 1.0, rng);
    return boosted + std::log(uniform_open(rng)) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

inline double gamma(double shape, Rng& rng) { return std::exp(log_gamma_variate(shape, rng)); }

/// Angle in (-pi, pi] from the von Mises distribution with mean direction mu and
/// concentration kappa (Best-Fisher rejection sampler). kappa = 0 is uniform.
inline double von_mises(double mu, double kappa, Rng& rng) {
  constexpr double pi = std::numbers::pi;
  double angle;
  if (kappa < 1e-8) {
    angle = pi * (2.0 * uniform(rng) - 1.0);
  } else {
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    double f;
    for (;;) {
      const double u1 = uniform(rng);
      const double z = std::cos(pi * u1);
      f = (1.0 + r * z) / (r + z);
      const double c = kappa * (r - f);
      const double u2 = uniform_open(rng);
      if (c * (2.0 - c) - u2 > 0.0) break;
      if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    const double u3 = uniform(rng);
    angle = (u3 > 0.5 ? 1.0 : -1.0) * std::acos(std::clamp(f, -1.0, 1.0));
  }
  angle += mu;
  angle = std::remainder(angle, 2.0 * pi);
  return angle;
}

}  // namespace rnd

}  // namespace warpalign
