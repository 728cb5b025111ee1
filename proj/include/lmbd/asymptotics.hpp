#pragma once

// Limits of the LMBD as omega -> 0+ or omega -> +inf for fixed n.
//
// As omega leaves 1 the normalisers K_{n-j} and K_n are dominated by the terms
// whose omega-exponent is extremal: (n-i)i = 0 (i in {0, n}) for omega -> 0,
// and (n-i)i maximal (i = n/2, or i in {(n-1)/2, (n+1)/2} for odd n) for
// omega -> inf. tau_j tends to the ratio of the dominant coefficient sums and
// the pmf tends to a law supported on the dominant indices.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmbd/core.hpp"

namespace lmbd {

enum class OmegaEdge { to_zero, to_infinity };
enum class PsiEdge { none, to_zero, to_one };

struct LimitRegime {
  OmegaEdge omega_edge = OmegaEdge::to_zero;
  PsiEdge psi_edge = PsiEdge::none;
  int n = 1;

  bool odd() const noexcept { return n % 2 == 1; }
};

struct SupportMass {
  int y = 0;
  double mass = 0.0;
};

using LimitLaw = std::vector<SupportMass>;

struct LimitMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct ConvergenceProbe {
  double omega = 0.0;
  double tv = 0.0;
  /// d log(tv) / d log(omega) against the previous probe; NaN for the first
  /// probe or when either distance is exactly zero.
  double slope = std::numeric_limits<double>::quiet_NaN();
};

struct LimitReport {
  LimitRegime regime;
  double psi = 0.0;
  double limit_mean = 0.0;
  double limit_variance = 0.0;
  LimitLaw limit_distribution;
  std::vector<ConvergenceProbe> numeric_evidence;
  /// Total variation non-increasing along the probes (up to rounding).
  bool monotone = true;
};

namespace detail {

inline void require_interior_psi(double psi, const char* what) {
  if (!(psi > 0.0 && psi < 1.0)) throw std::domain_error(std::string(what) + ": psi must lie in (0, 1)");
}

inline void check_regime(const LimitRegime& r) {
  if (r.n < 1) throw std::domain_error("limit regime: n must be >= 1");
}

}  // namespace detail

/// Limit of tau_j by dominant-term extraction: keep the terms of K_{n-j} and
/// K_n with extremal omega-exponent and take the ratio of their coefficient
/// sums. Returns 0 or +inf when the two extremal exponents differ.
inline double dominant_tau_limit(int j, int n, double psi, OmegaEdge edge) {
  detail::require_interior_psi(psi, "dominant_tau_limit");
  if (n < 1 || j < 1 || j > n) throw std::domain_error("dominant_tau_limit: need 1 <= j <= n");

  const bool to_inf = edge == OmegaEdge::to_infinity;
  auto dominant = [&](int a, long long& extreme) {
    const int m = n - a;
    extreme = to_inf ? -1 : std::numeric_limits<long long>::max();
    for (int i = 0; i <= m; ++i) {
      const long long e = static_cast<long long>(m - i) * (i + a);
      extreme = to_inf ? std::max(extreme, e) : std::min(extreme, e);
    }
    std::vector<double> logs;
    for (int i = 0; i <= m; ++i) {
      if (static_cast<long long>(m - i) * (i + a) != extreme) continue;
      logs.push_back(detail::log_binomial(m, i) + detail::xlogy(i, psi) + detail::xlog1my(m - i, psi));
    }
    return detail::log_sum_exp(logs);
  };

  long long num_exp = 0;
  long long den_exp = 0;
  const double log_num = dominant(j, num_exp);
  const double log_den = dominant(0, den_exp);
  if (num_exp != den_exp) {
    const bool vanishes = to_inf ? num_exp < den_exp : num_exp > den_exp;
    return vanishes ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(log_num - log_den);
}

/// lim_{omega->0} tau_j = psi^(n-j) / (psi^n + (1-psi)^n), 1 <= j <= n.
inline double tau_limit_omega_zero(int j, int n, double psi) {
  detail::require_interior_psi(psi, "tau_limit_omega_zero");
  if (n < 1 || j < 1 || j > n) throw std::domain_error("tau_limit_omega_zero: need 1 <= j <= n");
  const double log_s = detail::log_add_exp(n * std::log(psi), n * std::log1p(-psi));
  return std::exp((n - j) * std::log(psi) - log_s);
}

/// lim_{omega->inf} tau_j for even n: psi^-j C(n-j, n/2-j) / C(n, n/2), 1 <= j <= n/2.
inline double tau_limit_omega_inf_even(int j, int n, double psi) {
  detail::require_interior_psi(psi, "tau_limit_omega_inf_even");
  if (n < 2 || n % 2 != 0) throw std::domain_error("tau_limit_omega_inf_even: n must be even");
  if (j < 1 || j > n / 2) throw std::domain_error("tau_limit_omega_inf_even: need 1 <= j <= n/2");
  return std::exp(-j * std::log(psi) + detail::log_binomial(n - j, n / 2 - j) - detail::log_binomial(n, n / 2));
}

/// lim_{omega->inf} tau_j for odd n, 1 <= j <= (n-1)/2. Both K_{n-j} and K_n
/// are dominated by their two terms with omega-exponent (n^2-1)/4; for j = 1
/// this is ((n-1)/2 + psi) / (n psi) and for j = 2 ((n-3)/4 + psi) / (n psi^2).
inline double tau_limit_omega_inf_odd(int j, int n, double psi) {
  if (n < 1 || n % 2 != 1) throw std::domain_error("tau_limit_omega_inf_odd: n must be odd");
  if (j < 1 || j > (n - 1) / 2) throw std::domain_error("tau_limit_omega_inf_odd: need 1 <= j <= (n-1)/2");
  return dominant_tau_limit(j, n, psi, OmegaEdge::to_infinity);
}

/// Limiting mean and variance. With psi_edge == none the limits are taken at
/// the fixed interior `psi`; otherwise `psi` is ignored and the psi limit is
/// applied afterwards.
inline LimitMoments limit_moments(const LimitRegime& r, double psi) {
  detail::check_regime(r);
  const double n = r.n;
  if (r.omega_edge == OmegaEdge::to_zero) {
    switch (r.psi_edge) {
      case PsiEdge::to_zero: return {0.0, 0.0};
      case PsiEdge::to_one: return {n, 0.0};
      case PsiEdge::none: break;
    }
    detail::require_interior_psi(psi, "limit_moments");
    // w = psi^n / (psi^n + (1-psi)^n)
    const double w =
        std::exp(n * std::log(psi) - detail::log_add_exp(n * std::log(psi), n * std::log1p(-psi)));
    return {n * w, n * n * w - n * n * w * w};
  }
  if (!r.odd()) {
    if (r.psi_edge == PsiEdge::none) detail::require_interior_psi(psi, "limit_moments");
    return {n / 2.0, 0.0};
  }
  switch (r.psi_edge) {
    case PsiEdge::to_zero: return {(n - 1) / 2.0, 0.0};
    case PsiEdge::to_one: return {(n + 1) / 2.0, 0.0};
    case PsiEdge::none: break;
  }
  detail::require_interior_psi(psi, "limit_moments");
  return {(n - 1) / 2.0 + psi, psi * (1.0 - psi)};
}

/// Weak limit of Y_n. For fixed interior psi: {0, n} two-point law as
/// omega -> 0, the point n/2 (even n) or {(n-1)/2, (n+1)/2} (odd n) as
/// omega -> inf. A psi edge collapses these to the corresponding Dirac mass.
inline LimitLaw limit_distribution(const LimitRegime& r, double psi) {
  detail::check_regime(r);
  const int n = r.n;
  if (r.omega_edge == OmegaEdge::to_zero) {
    switch (r.psi_edge) {
      case PsiEdge::to_zero: return {{0, 1.0}};
      case PsiEdge::to_one: return {{n, 1.0}};
      case PsiEdge::none: break;
    }
    detail::require_interior_psi(psi, "limit_distribution");
    const double log_s = detail::log_add_exp(n * std::log(psi), n * std::log1p(-psi));
    return {{0, std::exp(n * std::log1p(-psi) - log_s)}, {n, std::exp(n * std::log(psi) - log_s)}};
  }
  if (!r.odd()) {
    if (r.psi_edge == PsiEdge::none) detail::require_interior_psi(psi, "limit_distribution");
    return {{n / 2, 1.0}};
  }
  const int lower = (n - 1) / 2;
  switch (r.psi_edge) {
    case PsiEdge::to_zero: return {{lower, 1.0}};
    case PsiEdge::to_one: return {{lower + 1, 1.0}};
    case PsiEdge::none: break;
  }
  detail::require_interior_psi(psi, "limit_distribution");
  return {{lower, 1.0 - psi}, {lower + 1, psi}};
}

inline double total_variation(const PmfTable& table, const LimitLaw& law) {
  std::vector<double> q(static_cast<std::size_t>(table.n()) + 1, 0.0);
  for (const auto& [y, mass] : law) q.at(static_cast<std::size_t>(y)) += mass;
  double acc = 0.0;
  for (int y = 0; y <= table.n(); ++y) acc += std::abs(table.prob(y) - q[static_cast<std::size_t>(y)]);
  return 0.5 * acc;
}

/// omega probes 10^-1 ... 10^-8 or 10^1 ... 10^8.
inline std::vector<double> default_probes(OmegaEdge edge) {
  std::vector<double> out;
  for (int k = 1; k <= 8; ++k) out.push_back(std::pow(10.0, edge == OmegaEdge::to_zero ? -k : k));
  return out;
}

/// Evaluates the exact pmf at each omega probe (psi held fixed) and records
/// its total-variation distance to the limit law.
inline LimitReport convergence_report(const LimitRegime& r, double psi, const std::vector<double>& probes) {
  detail::check_regime(r);
  if (probes.empty()) throw std::invalid_argument("convergence_report: no probe points");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!(probes[i] > 0.0) || !std::isfinite(probes[i]))
      throw std::invalid_argument("convergence_report: probes must be finite positive omegas");
    if (i > 0) {
      const bool toward = r.omega_edge == OmegaEdge::to_zero ? probes[i] < probes[i - 1] : probes[i] > probes[i - 1];
      if (!toward) throw std::invalid_argument("convergence_report: probes must approach the omega edge monotonically");
    }
  }

  LimitReport report;
  report.regime = r;
  report.psi = psi;
  const auto m = limit_moments(r, psi);
  report.limit_mean = m.mean;
  report.limit_variance = m.variance;
  report.limit_distribution = limit_distribution(r, psi);

  // Slack for distances that have reached rounding level.
  constexpr double kSlack = 4.0 * std::numeric_limits<double>::epsilon();
  for (double omega : probes) {
    ConvergenceProbe probe;
    probe.omega = omega;
    probe.tv = total_variation(pmf(ModelParams(r.n, psi, omega)), report.limit_distribution);
    if (!report.numeric_evidence.empty()) {
      const auto& prev = report.numeric_evidence.back();
      if (probe.tv > prev.tv + kSlack) report.monotone = false;
      if (probe.tv > 0.0 && prev.tv > 0.0)
        probe.slope = (std::log(probe.tv) - std::log(prev.tv)) / (std::log(omega) - std::log(prev.omega));
    }
    report.numeric_evidence.push_back(probe);
  }
  return report;
}

}  // namespace lmbd
