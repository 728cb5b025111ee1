#pragma once

// Brute-force reference for the pmf: walks all 2^n binary outcomes, weights
// each by psi^y (1-psi)^(n-y) omega^((n-y)y) and groups by y. It shares no
// code with the K_n / binomial-coefficient path in core.hpp and normalises by
// its own total, so it can serve as ground truth for that path.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lmbd/constants.hpp"
#include "lmbd/core.hpp"

namespace lmbd {

inline PmfTable enumerate_pmf_oracle(const ModelParams& p) {
  const int n = p.n();
  if (n > kMaxOracleTrials) throw std::invalid_argument("enumerate_pmf_oracle: n > 20 refused");

  const double log_psi = p.psi() > 0.0 ? std::log(p.psi()) : detail::kNegInf;
  const double log_q = p.psi() < 1.0 ? std::log1p(-p.psi()) : detail::kNegInf;
  const double log_omega = std::log(p.omega());

  const std::uint32_t outcomes = std::uint32_t{1} << n;
  std::vector<double> log_weight(outcomes);
  double shift = detail::kNegInf;
  for (std::uint32_t mask = 0; mask < outcomes; ++mask) {
    double lw = 0.0;
    int y = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        lw += log_psi;
        ++y;
      } else {
        lw += log_q;
      }
    }
    if (y != 0 && y != n) lw += static_cast<double>(n - y) * y * log_omega;
    log_weight[mask] = lw;
    shift = std::max(shift, lw);
  }

  std::vector<long double> mass(static_cast<std::size_t>(n) + 1, 0.0L);
  for (std::uint32_t mask = 0; mask < outcomes; ++mask)
    mass[static_cast<std::size_t>(std::popcount(mask))] += std::exp(static_cast<long double>(log_weight[mask] - shift));

  long double total = 0.0L;
  for (auto m : mass) total += m;

  std::vector<double> lp(mass.size());
  for (std::size_t y = 0; y < mass.size(); ++y)
    lp[y] = mass[y] > 0.0L ? static_cast<double>(std::log(mass[y] / total)) : detail::kNegInf;
  return {p, std::move(lp), static_cast<double>(shift + std::log(total))};
}

}  // namespace lmbd
