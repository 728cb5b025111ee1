#pragma once

// Majority-vote accuracy of an ensemble of n exchangeable classifiers, the
// Binomial and Beta-Binomial baselines, and maximum-likelihood fitting from
// observed counts of correct votes.
//
// The LMBD is a two-parameter exponential family in the natural coordinates
// theta = (logit psi, log omega) with sufficient statistic T(y) = (y, y(n-y)):
//
//   log P(y) = log C(n,y) + y theta_1 + y(n-y) theta_2 - A(theta).
//
// The mean log-likelihood is therefore concave in theta with gradient
// mean(T) - E[T] and Hessian -Cov[T], both exact from the pmf table.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lmbd/core.hpp"
#include "lmbd/optimize.hpp"

namespace lmbd {

/// q = n/2 (even n) or (n-1)/2 (odd n); the ensemble is right when more than
/// q members are, so ties count as failures.
inline int majority_threshold(int n) {
  if (n < 1) throw std::domain_error("majority_threshold: n must be >= 1");
  return n / 2;
}

/// P(Y_n > q) under the LMBD.
inline double ensemble_accuracy(const ModelParams& p) { return pmf(p).survival(majority_threshold(p.n())); }

/// Binomial tail sum_{y>q} C(n,y) pi^y (1-pi)^(n-y).
inline double binomial_accuracy(int n, double pi) {
  if (n < 1) throw std::domain_error("binomial_accuracy: n must be >= 1");
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::domain_error("binomial_accuracy: pi must lie in [0, 1]");
  std::vector<double> logs;
  for (int y = majority_threshold(n) + 1; y <= n; ++y)
    logs.push_back(detail::log_binomial(n, y) + detail::xlogy(y, pi) + detail::xlog1my(n - y, pi));
  return std::min(1.0, std::exp(detail::log_sum_exp(logs)));
}

/// log P(Y = y) for the Beta(alpha, beta)-Binomial, with
/// B(y+a, n-y+b)/B(a, b) written as rising factorials.
inline double beta_binomial_log_pmf(int n, double alpha, double beta, int y) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw std::domain_error("beta-binomial: shape parameters must be finite and > 0");
  if (y < 0 || y > n) return detail::kNegInf;
  return detail::log_binomial(n, y) + detail::log_rising(alpha, y) + detail::log_rising(beta, n - y) -
         detail::log_rising(alpha + beta, n);
}

inline double beta_binomial_accuracy(int n, double alpha, double beta) {
  if (n < 1) throw std::domain_error("beta_binomial_accuracy: n must be >= 1");
  std::vector<double> logs;
  for (int y = majority_threshold(n) + 1; y <= n; ++y) logs.push_back(beta_binomial_log_pmf(n, alpha, beta, y));
  if (logs.empty()) {
    (void)beta_binomial_log_pmf(n, alpha, beta, 0);  // validates the shapes
    return 0.0;
  }
  return std::min(1.0, std::exp(detail::log_sum_exp(logs)));
}

/// Frequencies of observed success counts y in [0, n].
class CountSample {
 public:
  CountSample(int n, std::vector<std::int64_t> counts) : n_(n), counts_(std::move(counts)) {
    if (n < 1) throw std::domain_error("CountSample: n must be >= 1");
    if (counts_.size() != static_cast<std::size_t>(n) + 1)
      throw std::invalid_argument("CountSample: expected n + 1 frequencies");
    for (auto c : counts_)
      if (c < 0) throw std::invalid_argument("CountSample: negative frequency");
    if (total() < 1) throw std::invalid_argument("CountSample: no observations");
  }

  static CountSample from_draws(int n, std::span<const int> draws) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    for (int y : draws) {
      if (y < 0 || y > n) throw std::out_of_range("CountSample: draw outside [0, n]");
      ++counts[static_cast<std::size_t>(y)];
    }
    return {n, std::move(counts)};
  }

  /// Reads a `y,count` table. Blank lines and lines starting with '#' are
  /// skipped; repeated y values accumulate.
  static CountSample from_csv(std::istream& in, int n) {
    if (n < 1) throw std::domain_error("CountSample: n must be >= 1");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
      if (line.empty() || line.front() == '#') continue;
      if (!header_seen) {
        if (line != "y,count") throw std::invalid_argument("CountSample: expected header 'y,count'");
        header_seen = true;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
        throw std::invalid_argument("CountSample: line " + std::to_string(line_no) + " is not 'y,count'");
      const long long y = parse_integer(line.substr(0, comma), line_no);
      const long long c = parse_integer(line.substr(comma + 1), line_no);
      if (y < 0 || y > n)
        throw std::out_of_range("CountSample: line " + std::to_string(line_no) + " has y outside [0, n]");
      if (c < 0) throw std::invalid_argument("CountSample: line " + std::to_string(line_no) + " has a negative count");
      counts[static_cast<std::size_t>(y)] += c;
    }
    if (!header_seen) throw std::invalid_argument("CountSample: missing 'y,count' header");
    return {n, std::move(counts)};
  }

  int n() const noexcept { return n_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::int64_t count(int y) const { return counts_.at(static_cast<std::size_t>(y)); }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  /// Sample means of the sufficient statistics (y, y(n-y)).
  std::array<double, 2> mean_statistics() const {
    double s1 = 0.0;
    double s2 = 0.0;
    for (int y = 0; y <= n_; ++y) {
      const double c = static_cast<double>(counts_[static_cast<std::size_t>(y)]);
      s1 += c * y;
      s2 += c * y * (n_ - y);
    }
    const double t = static_cast<double>(total());
    return {s1 / t, s2 / t};
  }

  std::vector<int> observed_values() const {
    std::vector<int> out;
    for (int y = 0; y <= n_; ++y)
      if (counts_[static_cast<std::size_t>(y)] > 0) out.push_back(y);
    return out;
  }

  /// Fraction of observations above the majority threshold.
  double empirical_accuracy() const {
    std::int64_t above = 0;
    for (int y = majority_threshold(n_) + 1; y <= n_; ++y) above += counts_[static_cast<std::size_t>(y)];
    return static_cast<double>(above) / static_cast<double>(total());
  }

 private:
  static long long parse_integer(const std::string& s, int line_no) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size())
      throw std::invalid_argument("CountSample: line " + std::to_string(line_no) + " has a non-integer field");
    return v;
  }

  int n_;
  std::vector<std::int64_t> counts_;
};

/// Sum of count-weighted log-probabilities.
inline double log_likelihood(const CountSample& s, const PmfTable& table) {
  if (s.n() != table.n()) throw std::invalid_argument("log_likelihood: support mismatch");
  double ll = 0.0;
  for (int y = 0; y <= s.n(); ++y) {
    const auto c = s.count(y);
    if (c > 0) ll += static_cast<double>(c) * table.log_prob(y);
  }
  return ll;
}

inline double log_likelihood(const CountSample& s, const ModelParams& p) { return log_likelihood(s, pmf(p)); }

/// The LMBD maximum-likelihood estimate exists iff the mean sufficient
/// statistic lies in the interior of the convex hull of {(y, y(n-y))}. Those
/// points sit on a strictly concave parabola, so this fails exactly when n < 2,
/// fewer than two values are observed, or the two observed values span a hull
/// edge (adjacent values, or {0, n}).
inline bool lmbd_mle_exists(const CountSample& s) {
  if (s.n() < 2) return false;
  const auto vals = s.observed_values();
  if (vals.size() >= 3) return true;
  if (vals.size() < 2) return false;
  const bool adjacent = vals[1] - vals[0] == 1;
  const bool extremes = vals[0] == 0 && vals[1] == s.n();
  return !adjacent && !extremes;
}

struct FitResult {
  double psi_hat = 0.0;
  double omega_hat = 1.0;
  double log_likelihood = 0.0;
  bool converged = false;
  /// The supremum is approached on the parameter boundary; estimates are
  /// placeholders (psi = mean/n, omega = 1).
  bool boundary = false;
  int iterations = 0;
  /// Norm of the per-observation score in (logit psi, log omega), i.e. the
  /// mismatch between sample and model means of (y, y(n-y)).
  double score_norm = 0.0;
  /// (se(psi_hat), se(omega_hat)) from a finite-difference Hessian.
  std::optional<std::pair<double, double>> standard_errors;
};

namespace detail {

struct ScoreInfo {
  double mean_ll = 0.0;
  std::array<double, 2> score{};
  std::array<double, 3> cov{};  // var T1, cov T1 T2, var T2
};

inline ScoreInfo score_info(const CountSample& s, double theta_psi, double theta_omega) {
  const int n = s.n();
  const auto table = pmf(ModelParams(n, inv_logit(theta_psi), std::exp(theta_omega)));
  const auto probs = table.probs();
  double e1 = 0.0, e2 = 0.0;
  for (int y = 0; y <= n; ++y) {
    e1 += probs[static_cast<std::size_t>(y)] * y;
    e2 += probs[static_cast<std::size_t>(y)] * y * (n - y);
  }
  double v11 = 0.0, v12 = 0.0, v22 = 0.0;
  for (int y = 0; y <= n; ++y) {
    const double d1 = y - e1;
    const double d2 = static_cast<double>(y) * (n - y) - e2;
    const double w = probs[static_cast<std::size_t>(y)];
    v11 += w * d1 * d1;
    v12 += w * d1 * d2;
    v22 += w * d2 * d2;
  }
  const auto t = s.mean_statistics();
  return {log_likelihood(s, table) / static_cast<double>(s.total()), {t[0] - e1, t[1] - e2}, {v11, v12, v22}};
}

inline double lmbd_total_ll(const CountSample& s, double theta_psi, double theta_omega) {
  return log_likelihood(s, ModelParams(s.n(), inv_logit(theta_psi), std::exp(theta_omega)));
}

}  // namespace detail

struct FitOptions {
  double score_tolerance = 1e-8;
  double step_tolerance = 1e-10;
  int max_iterations = 200;
  double hessian_step = 1e-5;
};

/// Damped Newton ascent on the mean log-likelihood in (logit psi, log omega).
inline FitResult fit_mle(const CountSample& s, const FitOptions& opt = {}) {
  FitResult r;
  const auto t = s.mean_statistics();
  if (!lmbd_mle_exists(s)) {
    r.boundary = true;
    r.psi_hat = std::clamp(t[0] / s.n(), 0.0, 1.0);
    r.omega_hat = 1.0;
    r.log_likelihood = log_likelihood(s, ModelParams(s.n(), r.psi_hat, 1.0));
    return r;
  }

  const double start = std::clamp(t[0] / s.n(), 1e-6, 1.0 - 1e-6);
  std::array<double, 2> theta{detail::logit(start), 0.0};
  auto info = detail::score_info(s, theta[0], theta[1]);
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    r.score_norm = std::hypot(info.score[0], info.score[1]);
    if (r.score_norm < opt.score_tolerance) {
      r.converged = true;
      break;
    }
    const double det = info.cov[0] * info.cov[2] - info.cov[1] * info.cov[1];
    std::array<double, 2> step;
    if (det > 0.0) {
      step = {(info.cov[2] * info.score[0] - info.cov[1] * info.score[1]) / det,
              (info.cov[0] * info.score[1] - info.cov[1] * info.score[0]) / det};
    } else {
      step = info.score;  // gradient ascent fallback
    }
    double scale = 1.0;
    detail::ScoreInfo next;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      next = detail::score_info(s, theta[0] + scale * step[0], theta[1] + scale * step[1]);
      if (next.mean_ll >= info.mean_ll - 1e-15 * std::abs(info.mean_ll)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    theta = {theta[0] + scale * step[0], theta[1] + scale * step[1]};
    info = next;
    if (scale * std::hypot(step[0], step[1]) < opt.step_tolerance) {
      r.score_norm = std::hypot(info.score[0], info.score[1]);
      r.converged = true;
      ++r.iterations;
      break;
    }
  }

  r.psi_hat = detail::inv_logit(theta[0]);
  r.omega_hat = std::exp(theta[1]);
  r.log_likelihood = info.mean_ll * static_cast<double>(s.total());

  // Central-difference Hessian of the total log-likelihood.
  const double h = opt.hessian_step;
  auto ll = [&](double dp, double dw) { return detail::lmbd_total_ll(s, theta[0] + dp, theta[1] + dw); };
  const double f0 = ll(0, 0);
  const double h11 = (ll(h, 0) - 2 * f0 + ll(-h, 0)) / (h * h);
  const double h22 = (ll(0, h) - 2 * f0 + ll(0, -h)) / (h * h);
  const double h12 = (ll(h, h) - ll(h, -h) - ll(-h, h) + ll(-h, -h)) / (4 * h * h);
  const double det = h11 * h22 - h12 * h12;
  if (h11 < 0.0 && det > 0.0) {
    const double var_psi_theta = -h22 / det;
    const double var_omega_theta = -h11 / det;
    r.standard_errors = std::pair{r.psi_hat * (1.0 - r.psi_hat) * std::sqrt(var_psi_theta),
                                  r.omega_hat * std::sqrt(var_omega_theta)};
  }
  return r;
}

struct ModelFit {
  std::string name;
  int parameter_count = 0;
  std::vector<std::pair<std::string, double>> estimates;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double predicted_accuracy = 0.0;
  bool converged = false;
};

struct ComparisonReport {
  int n = 0;
  std::int64_t observations = 0;
  double empirical_accuracy = 0.0;
  std::vector<ModelFit> models;  ///< lmbd, binomial, beta-binomial
  std::string best_by_aic;
};

inline double aic(double log_likelihood, int parameter_count) { return 2.0 * parameter_count - 2.0 * log_likelihood; }

inline ModelFit fit_binomial(const CountSample& s) {
  const int n = s.n();
  const double pi = std::clamp(s.mean_statistics()[0] / n, 0.0, 1.0);
  double ll = 0.0;
  for (int y = 0; y <= n; ++y) {
    const auto c = s.count(y);
    if (c > 0) ll += c * (detail::log_binomial(n, y) + detail::xlogy(y, pi) + detail::xlog1my(n - y, pi));
  }
  return {"binomial", 1, {{"pi", pi}}, ll, aic(ll, 1), binomial_accuracy(n, pi), true};
}

/// Beta-Binomial MLE over (logit mean, log(alpha + beta)) by Nelder-Mead. The
/// precision alpha + beta is capped at e^30, beyond which the model is the
/// Binomial to double precision.
inline ModelFit fit_beta_binomial(const CountSample& s) {
  const int n = s.n();
  constexpr double kMaxLogPrecision = 30.0;
  const auto t = s.mean_statistics();
  const double mu0 = std::clamp(t[0] / n, 1e-3, 1.0 - 1e-3);

  double var = 0.0;
  for (int y = 0; y <= n; ++y) var += s.count(y) * (y - t[0]) * (y - t[0]);
  var /= static_cast<double>(s.total());
  double log_prec0 = std::log(1e3);
  if (n > 1) {
    const double rho = (var / (n * mu0 * (1.0 - mu0)) - 1.0) / (n - 1);
    if (rho > 1e-6 && rho < 1.0) log_prec0 = std::log((1.0 - rho) / rho);
  }

  auto shapes = [&](const std::vector<double>& x) {
    const double mu = std::clamp(detail::inv_logit(x[0]), 1e-300, 1.0 - 1e-16);
    const double prec = std::exp(std::min(x[1], kMaxLogPrecision));
    return std::pair{mu * prec, (1.0 - mu) * prec};
  };
  auto mean_ll = [&](const std::vector<double>& x) {
    const auto [a, b] = shapes(x);
    double ll = 0.0;
    for (int y = 0; y <= n; ++y) {
      const auto c = s.count(y);
      if (c > 0) ll += c * beta_binomial_log_pmf(n, a, b, y);
    }
    return ll / static_cast<double>(s.total());
  };

  const auto nm = nelder_mead([&](const std::vector<double>& x) { return -mean_ll(x); },
                              {detail::logit(mu0), std::clamp(log_prec0, -5.0, kMaxLogPrecision)});
  const auto [a, b] = shapes(nm.x);
  const double ll = mean_ll(nm.x) * static_cast<double>(s.total());
  return {"beta-binomial", 2, {{"alpha", a}, {"beta", b}}, ll, aic(ll, 2), beta_binomial_accuracy(n, a, b), nm.converged};
}

inline ModelFit fit_lmbd(const CountSample& s) {
  const auto f = fit_mle(s);
  const double acc = ensemble_accuracy(ModelParams(s.n(), f.psi_hat, f.omega_hat));
  return {"lmbd", 2, {{"psi", f.psi_hat}, {"omega", f.omega_hat}}, f.log_likelihood, aic(f.log_likelihood, 2), acc,
          f.converged};
}

/// Fits LMBD, Binomial and Beta-Binomial and compares them by AIC and by
/// their predicted majority-vote accuracy.
inline ComparisonReport model_comparison(const CountSample& s) {
  ComparisonReport r;
  r.n = s.n();
  r.observations = s.total();
  r.empirical_accuracy = s.empirical_accuracy();
  r.models = {fit_lmbd(s), fit_binomial(s), fit_beta_binomial(s)};
  const auto best = std::min_element(r.models.begin(), r.models.end(),
                                     [](const ModelFit& a, const ModelFit& b) { return a.aic < b.aic; });
  r.best_by_aic = best->name;
  return r;
}

}  // namespace lmbd
