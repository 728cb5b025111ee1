#pragma once

// Exact log-domain evaluation of the LMBD
//
//   P(Y_n = y) = C(n,y) psi^y (1-psi)^(n-y) omega^((n-y) y) / K_n(psi, omega)
//
// together with the partial normalisers K_{n-a}, the ratios tau_r, moments,
// the exchangeable joint law of the underlying trials and seeded sampling.
// Every quantity that involves omega^((n-y)y) is handled as a logarithm: the
// exponent reaches n^2/4 * |log omega|, which leaves double range long before
// n gets interesting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmbd/detail/log_math.hpp"
#include "lmbd/params.hpp"

namespace lmbd {

namespace detail {

inline void check_k_args(int n, int a, double psi, double omega) {
  if (n < 1) throw std::domain_error("log_k: n must be >= 1");
  if (a < 0 || a > n) throw std::domain_error("log_k: a must lie in [0, n]");
  if (!(psi >= 0.0 && psi <= 1.0)) throw std::domain_error("log_k: psi must lie in [0, 1]");
  if (!(omega > 0.0)) throw std::domain_error("log_k: omega must be > 0");
}

/// Per-term logs of K_{n-a}: log C(m,i) + i log psi + (m-i) log(1-psi) + (m-i)(i+a) log omega.
inline std::vector<double> log_k_terms(int n, int a, double psi, double omega) {
  const int m = n - a;
  const double log_omega = std::log(omega);
  std::vector<double> terms(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    const double omega_exp = static_cast<double>(m - i) * static_cast<double>(i + a);
    terms[static_cast<std::size_t>(i)] = log_binomial(m, i) + xlogy(i, psi) + xlog1my(m - i, psi) +
                                         (omega_exp == 0.0 ? 0.0 : omega_exp * log_omega);
  }
  return terms;
}

}  // namespace detail

/// log K_{n-a}(psi, omega). At omega == 1 the sum is a binomial expansion and
/// the result is exactly 0.
inline double log_k(int n, int a, double psi, double omega) {
  detail::check_k_args(n, a, psi, omega);
  if (omega == 1.0) return 0.0;
  const auto terms = detail::log_k_terms(n, a, psi, omega);
  return detail::log_sum_exp(terms);
}

/// tau_r = K_{n-r} / K_n for 1 <= r <= n.
inline double tau(int r, const ModelParams& p) {
  if (r < 1 || r > p.n()) throw std::domain_error("tau: r must lie in [1, n]");
  return std::exp(log_k(p.n(), r, p.psi(), p.omega()) - log_k(p.n(), 0, p.psi(), p.omega()));
}

/// Log-probabilities of Y_n over the support {0, ..., n}.
class PmfTable {
 public:
  PmfTable(ModelParams params, std::vector<double> log_prob, double log_normalizer)
      : params_(params), log_prob_(std::move(log_prob)), log_normalizer_(log_normalizer) {
    if (log_prob_.size() != static_cast<std::size_t>(params_.n()) + 1)
      throw std::invalid_argument("PmfTable: expected n + 1 log-probabilities");
  }

  const ModelParams& params() const noexcept { return params_; }
  int n() const noexcept { return params_.n(); }
  std::span<const double> log_prob() const noexcept { return log_prob_; }
  double log_prob(int y) const { return log_prob_.at(static_cast<std::size_t>(y)); }
  double prob(int y) const { return std::exp(log_prob(y)); }
  double log_normalizer() const noexcept { return log_normalizer_; }

  std::vector<double> probs() const {
    std::vector<double> out(log_prob_.size());
    std::transform(log_prob_.begin(), log_prob_.end(), out.begin(), [](double l) { return std::exp(l); });
    return out;
  }

  /// P(Y <= y).
  double cdf(int y) const {
    check_index(y);
    if (y == n()) return 1.0;
    return std::min(1.0, std::exp(detail::log_sum_exp(log_prob().first(static_cast<std::size_t>(y) + 1))));
  }

  /// P(Y > y), summed from the upper tail rather than as 1 - cdf.
  double survival(int y) const {
    check_index(y);
    if (y == n()) return 0.0;
    return std::min(1.0, std::exp(detail::log_sum_exp(log_prob().subspan(static_cast<std::size_t>(y) + 1))));
  }

  /// Cumulative probabilities, last entry exactly 1.
  std::vector<double> cumulative() const {
    std::vector<double> out(log_prob_.size());
    double acc = detail::kNegInf;
    for (std::size_t y = 0; y < log_prob_.size(); ++y) {
      acc = detail::log_add_exp(acc, log_prob_[y]);
      out[y] = std::min(1.0, std::exp(acc));
    }
    out.back() = 1.0;
    return out;
  }

  /// Mean and variance summed directly over the table.
  double mean() const {
    double m = 0.0;
    for (int y = 1; y <= n(); ++y) m += y * prob(y);
    return m;
  }

  double variance() const {
    const double m = mean();
    double v = 0.0;
    for (int y = 0; y <= n(); ++y) v += (y - m) * (y - m) * prob(y);
    return v;
  }

 private:
  void check_index(int y) const {
    if (y < 0 || y > n())
      throw std::out_of_range("support index " + std::to_string(y) + " outside [0, " + std::to_string(n()) + "]");
  }

  ModelParams params_;
  std::vector<double> log_prob_;
  double log_normalizer_;
};

inline PmfTable pmf(const ModelParams& p) {
  const int n = p.n();
  std::vector<double> lp(static_cast<std::size_t>(n) + 1, detail::kNegInf);
  if (p.psi() == 0.0 || p.psi() == 1.0) {
    lp[p.psi() == 0.0 ? 0 : static_cast<std::size_t>(n)] = 0.0;
    return {p, std::move(lp), 0.0};
  }
  // The terms of K_n are the unnormalised pmf. Normalising in two steps
  // (shift by the largest term, then by the log of the shifted sum) keeps the
  // entries accurate when log K_n itself is large.
  lp = detail::log_k_terms(n, 0, p.psi(), p.omega());
  const double hi = *std::max_element(lp.begin(), lp.end());
  for (double& l : lp) l -= hi;
  const double log_shifted = detail::log_sum_exp(lp);
  for (double& l : lp) l -= log_shifted;
  return {p, std::move(lp), p.omega() == 1.0 ? 0.0 : hi + log_shifted};
}

inline double cdf(const ModelParams& p, int y) { return pmf(p).cdf(y); }

inline double survival(const ModelParams& p, int y) { return pmf(p).survival(y); }

struct MomentSummary {
  double tau1 = 1.0;
  double tau2 = 1.0;  ///< 0 when n == 1 (it only enters through (n-1) tau2).
  double eta = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double pi = 0.0;  ///< per-trial marginal success probability psi * tau1
};

namespace detail {

/// log of sum_i C(m,i) psi^i (1-psi)^(m-i) omega^((n-ones-i)(ones+i) - e_ref),
/// m = n - ones - zeros: a K-type sum with `ones` trials pinned at 1 and
/// `zeros` pinned at 0. Subtracting the integer e_ref from the exponent before
/// multiplying by log omega keeps the common factor omega^e_ref out of the
/// rounding, so ratios of such sums stay accurate when n^2 |log omega| is large.
inline double log_pinned_sum(int n, int ones, int zeros, double psi, double omega, long long e_ref = 0) {
  const int m = n - ones - zeros;
  const double log_omega = std::log(omega);
  std::vector<double> terms(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    const long long e = static_cast<long long>(n - ones - i) * (ones + i) - e_ref;
    terms[static_cast<std::size_t>(i)] =
        log_binomial(m, i) + xlogy(i, psi) + xlog1my(m - i, psi) + (e == 0 ? 0.0 : static_cast<double>(e) * log_omega);
  }
  return log_sum_exp(terms);
}

}  // namespace detail

/// Closed-form moments E = n psi tau1, V = n psi eta with
/// eta = tau1 - psi (n tau1^2 - (n-1) tau2).
///
/// Written in terms of pair probabilities P_ab = P(Z_1 = a, Z_2 = b), with
/// psi tau1 = P_11 + P_10 and psi^2 tau2 = P_11, the same expression reads
///
///   n psi eta = n [ (P_11 + P_10)(P_10 + P_00) + (n-1)(P_11 P_00 - P_10^2) ],
///
/// which is what is evaluated: the literal form subtracts terms of size
/// n tau1^2 psi to leave eta, and loses every digit once V << E^2.
inline MomentSummary moments(const ModelParams& p) {
  const int n = p.n();
  const double psi = p.psi();
  const double omega = p.omega();
  MomentSummary s;
  if (p.degenerate_psi() || p.independent()) {
    s.tau1 = tau(1, p);
    s.tau2 = n >= 2 ? tau(2, p) : 0.0;
    s.pi = std::clamp(psi * s.tau1, 0.0, 1.0);
    s.eta = s.tau1 - psi * (n * s.tau1 * s.tau1 - (n - 1) * s.tau2);
    s.mean = psi == 0.0 ? 0.0 : n * psi;
    s.variance = n * psi * s.eta;
    return s;
  }
  // Every sum below is taken relative to omega^e_ref, the size of the
  // dominant omega power in K_n.
  const long long e_ref = omega > 1.0 ? static_cast<long long>(n / 2) * (n - n / 2) : 0;
  const double log_kn = detail::log_pinned_sum(n, 0, 0, psi, omega, e_ref);
  s.tau1 = std::exp(detail::log_pinned_sum(n, 1, 0, psi, omega, e_ref) - log_kn);
  s.pi = std::clamp(psi * s.tau1, 0.0, 1.0);
  s.mean = n * s.pi;
  if (n == 1) {
    s.tau2 = 0.0;
    s.variance = psi * (1.0 - psi);
  } else {
    const double l2 = detail::log_pinned_sum(n, 2, 0, psi, omega, e_ref);
    s.tau2 = std::exp(l2 - log_kn);
    const double lp = std::log(psi);
    const double lq = std::log1p(-psi);
    const double l11 = 2 * lp + l2 - log_kn;
    const double l10 = lp + lq + detail::log_pinned_sum(n, 1, 1, psi, omega, e_ref) - log_kn;
    const double l00 = 2 * lq + detail::log_pinned_sum(n, 0, 2, psi, omega, e_ref) - log_kn;
    const double one = std::exp(detail::log_add_exp(l11, l10));
    const double zero = std::exp(detail::log_add_exp(l10, l00));
    const double cov = detail::exp_difference(l11 + l00, 2 * l10);
    const double spread = one * zero;
    s.variance = std::max(0.0, n * (spread + (n - 1) * cov));
    // Near-deterministic laws (omega far from 1) cancel spread against the
    // covariance term to below working precision; the centred sum over the
    // pmf has no cancellation there.
    if (s.variance < 1e-6 * n * spread) s.variance = pmf(p).variance();
  }
  s.eta = s.variance / (n * psi);
  return s;
}

/// pi = P(Z_1 = 1) = psi * tau1.
inline double marginal_pi(const ModelParams& p) { return std::clamp(p.psi() * tau(1, p), 0.0, 1.0); }

/// One realisation of the n binary trials with its log joint probability.
struct JointOutcome {
  std::vector<std::uint8_t> bits;
  double log_prob = detail::kNegInf;
};

namespace detail {

inline int count_successes(const ModelParams& p, std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(p.n()))
    throw std::invalid_argument("joint law: expected " + std::to_string(p.n()) + " trials, got " +
                                std::to_string(bits.size()));
  int y = 0;
  for (auto b : bits) {
    if (b > 1) throw std::invalid_argument("joint law: trial outcomes must be 0 or 1");
    y += b;
  }
  return y;
}

}  // namespace detail

/// log P(Z = bits) = y log psi + (n-y) log(1-psi) + (n-y) y log omega - log K_n,
/// y = sum(bits). Exchangeable: depends on bits only through y.
inline double joint_log_prob(const ModelParams& p, std::span<const std::uint8_t> bits) {
  const int y = detail::count_successes(p, bits);
  const int n = p.n();
  const double omega_exp = static_cast<double>(n - y) * y;
  return detail::xlogy(y, p.psi()) + detail::xlog1my(n - y, p.psi()) +
         (omega_exp == 0.0 ? 0.0 : omega_exp * std::log(p.omega())) - log_k(n, 0, p.psi(), p.omega());
}

inline JointOutcome joint_outcome(const ModelParams& p, std::vector<std::uint8_t> bits) {
  const double lp = joint_log_prob(p, bits);
  return {std::move(bits), lp};
}

/// Cross-product ratio of (Z_1, Z_2) given the remaining n-2 trials, of which
/// `rest_successes` are ones. Equals omega^-2 whatever the conditioning set.
inline double conditional_cpr(const ModelParams& p, int rest_successes = 0) {
  const int n = p.n();
  if (n < 2) throw std::domain_error("conditional_cpr: needs n >= 2");
  if (p.degenerate_psi()) throw std::domain_error("conditional_cpr: psi must lie in (0, 1)");
  if (rest_successes < 0 || rest_successes > n - 2)
    throw std::domain_error("conditional_cpr: rest_successes must lie in [0, n-2]");

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
  std::fill_n(bits.begin() + 2, rest_successes, std::uint8_t{1});
  auto lp = [&](std::uint8_t z1, std::uint8_t z2) {
    bits[0] = z1;
    bits[1] = z2;
    return joint_log_prob(p, bits);
  };
  return std::exp(lp(1, 1) + lp(0, 0) - lp(1, 0) - lp(0, 1));
}

namespace detail {

/// Uniform double on [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// `count` i.i.d. draws of Y_n by inverse-cdf over the exact table.
inline std::vector<int> sample(const ModelParams& p, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample: count must be >= 1");
  const auto cum = pmf(p).cumulative();
  std::mt19937_64 gen(seed);
  std::vector<int> draws(count);
  for (auto& d : draws) {
    const double u = detail::unit_uniform(gen);
    d = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  }
  return draws;
}

}  // namespace lmbd
