#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace crcdl {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double invlogit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(invlogit(x)) without underflow for large |x|
inline double log_invlogit(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// log(1 - invlogit(x))
inline double log1m_invlogit(double x) { return log_invlogit(-x); }

inline double log_normal_pdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -0.5 * (kLog2Pi + z * z) - std::log(sd);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

// log of the standard-normal mass on (a, b); arranged so nearly-equal tail
// probabilities are differenced on the erfc scale rather than near 1
inline double normal_interval_logmass(double a, double b) {
  if (!(a < b)) return kNegInf;
  double mass;
  if (a >= 0.0) {
    mass = 0.5 * (std::erfc(a * M_SQRT1_2) - (std::isinf(b) ? 0.0 : std::erfc(b * M_SQRT1_2)));
  } else if (b <= 0.0) {
    mass = 0.5 * (std::erfc(-b * M_SQRT1_2) - (std::isinf(a) ? 0.0 : std::erfc(-a * M_SQRT1_2)));
  } else {
    mass = normal_cdf(b) - normal_cdf(a);
  }
  if (mass <= 0.0) return kNegInf;
  return std::log(mass);
}

inline double logsumexp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

// Quantile by linear interpolation of order statistics: with n sorted values
// the p-quantile sits at rank (n-1)p, interpolating between neighbours.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  std::size_t n = sorted.size();
  if (n == 0) return kNaN;
  if (n == 1) return sorted[0];
  double h = (static_cast<double>(n) - 1.0) * p;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? kNaN : s / static_cast<double>(x.size());
}

// unbiased sample variance
inline double variance(std::span<const double> x) {
  std::size_t n = x.size();
  if (n < 2) return kNaN;
  double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(n - 1);
}

}  // namespace crcdl
