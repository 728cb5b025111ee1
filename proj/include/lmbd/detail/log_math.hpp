#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace lmbd::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// k * log(p) with the convention 0 * log(0) = 0.
inline double xlogy(double k, double p) {
  if (k == 0.0) return 0.0;
  if (p == 0.0) return kNegInf;
  return k * std::log(p);
}

/// k * log(1 - p) with the convention 0 * log(0) = 0.
inline double xlog1my(double k, double p) {
  if (k == 0.0) return 0.0;
  if (p == 1.0) return kNegInf;
  return k * std::log1p(-p);
}

inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum(exp(x))) over a span; -inf for an empty span or all -inf entries.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Signed value of exp(a) - exp(b), factoring out the larger exponent so that
/// nearly equal arguments keep their relative accuracy.
inline double exp_difference(double a, double b) {
  if (a == b) return 0.0;
  if (a > b) return -std::exp(a) * std::expm1(b - a);
  return std::exp(b) * std::expm1(a - b);
}

/// log C(n, k). Exact integer arithmetic while the coefficient fits in 64
/// bits, log-gamma beyond.
inline double log_binomial(int n, int k) {
  if (k < 0 || k > n) return kNegInf;
  k = std::min(k, n - k);
  if (k == 0) return 0.0;
  if (n <= 62) {
    unsigned __int128 c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    return std::log(static_cast<double>(static_cast<std::uint64_t>(c)));
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log of the rising factorial x (x+1) ... (x+m-1).
inline double log_rising(double x, int m) {
  double acc = 0.0;
  for (int k = 0; k < m; ++k) acc += std::log(x + k);
  return acc;
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double inv_logit(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// Double-double arithmetic for the compensated polynomial evaluation.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DoubleDouble operator+(DoubleDouble x, DoubleDouble y) {
  DoubleDouble s = two_sum(x.hi, y.hi);
  s.lo += x.lo + y.lo;
  return two_sum(s.hi, s.lo);
}

inline DoubleDouble operator*(DoubleDouble x, double y) {
  DoubleDouble p = two_prod(x.hi, y);
  p.lo += x.lo * y;
  return two_sum(p.hi, p.lo);
}

inline DoubleDouble operator*(DoubleDouble x, DoubleDouble y) {
  DoubleDouble p = two_prod(x.hi, y.hi);
  p.lo += x.hi * y.lo + x.lo * y.hi;
  return two_sum(p.hi, p.lo);
}

}  // namespace lmbd::detail
