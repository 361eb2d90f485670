#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "crcdl/mathutil.hpp"

namespace crcdl {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/** Deterministic stream id for chain c under a base seed. */
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 1));
}

/**
 * @brief mt19937_64 core with hand-rolled variate transforms.
 *
 * All transforms are implemented here rather than via <random> distribution
 * adaptors so a given seed reproduces the identical draw stream on any
 * standard library.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // uniform on [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Marsaglia polar method with one cached variate
  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    cache_ = v * f;
    have_cache_ = true;
    return u * f;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential() { return -std::log1p(-uniform()); }

  // Marsaglia and Tsang for shape >= 1, boost trick below 1
  double gamma(double shape) {
    assert(shape > 0.0);
    if (shape < 1.0) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  void dirichlet(std::span<const double> alpha, std::span<double> out) {
    assert(alpha.size() == out.size());
    double s = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      out[k] = gamma(alpha[k]);
      s += out[k];
    }
    for (std::size_t k = 0; k < alpha.size(); ++k) out[k] /= s;
  }

  // index draw from unnormalised log weights
  int categorical_logw(std::span<const double> logw) {
    double m = kNegInf;
    for (double v : logw) m = std::max(m, v);
    assert(!std::isinf(m));
    double total = 0.0;
    for (double v : logw) total += std::exp(v - m);
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < logw.size(); ++k) {
      acc += std::exp(logw[k] - m);
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(logw.size()) - 1;
  }

  /**
   * Normal(mean, sd) restricted to (lo, hi). Rejection from the normal when
   * the interval straddles the bulk, uniform rejection for narrow interior
   * intervals, and an exponential envelope (Robert 1995) for far tails.
   */
  double truncated_normal(double mean, double sd, double lo, double hi) {
    assert(sd > 0.0 && lo < hi);
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    return mean + sd * std_truncated_normal(a, b);
  }

 private:
  double std_truncated_normal(double a, double b) {
    if (std::isinf(a) && std::isinf(b)) return normal();
    if (std::isinf(b)) return lower_truncated(a);
    if (std::isinf(a)) return -lower_truncated(-b);
    if (a > 0.0) return two_sided_positive(a, b);
    if (b < 0.0) return -two_sided_positive(-b, -a);
    // straddles zero
    if (b - a > 1.0) {
      for (;;) {
        double z = normal();
        if (z > a && z < b) return z;
      }
    }
    for (;;) {
      double z = uniform(a, b);
      if (std::log(uniform()) < -0.5 * z * z) return z;
    }
  }

  double lower_truncated(double a) {
    if (a < 0.45) {
      for (;;) {
        double z = normal();
        if (z > a) return z;
      }
    }
    double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
      double z = a + exponential() / alpha;
      double d = z - alpha;
      if (std::log(uniform()) < -0.5 * d * d) return z;
    }
  }

  // both bounds on the same side of zero, 0 < a < b
  double two_sided_positive(double a, double b) {
    for (;;) {
      double z = uniform(a, b);
      if (std::log(uniform()) < 0.5 * (a * a - z * z)) return z;
    }
  }

  std::mt19937_64 gen_;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace crcdl
