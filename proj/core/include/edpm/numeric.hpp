#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace edpm::numeric {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

// log(sum(exp(v))); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

// Normalised probabilities from log masses (max-subtracted).
inline std::vector<double> softmax(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  const double lse = log_sum_exp(v);
  if (lse == kNegInf) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i] - lse);
  return out;
}

// log N(x; mean, variance).
inline double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -kLogSqrt2Pi - 0.5 * std::log(variance) - 0.5 * d * d / variance;
}

// log density of a location-scale Student t with `dof` degrees of freedom and
// squared scale `scale2`.
inline double log_student_t_pdf(double x, double dof, double location, double scale2) {
  const double z = (x - location) * (x - location) / scale2;
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi * scale2) -
         0.5 * (dof + 1.0) * std::log1p(z / dof);
}

// Type-7 sample quantile (linear interpolation between order statistics,
// h = (n-1) * level). `sorted` must be ascending and non-empty.
inline double quantile_type7(std::span<const double> sorted, double level) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace edpm::numeric
