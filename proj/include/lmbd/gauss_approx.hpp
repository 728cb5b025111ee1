#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lmbd/core.hpp"

namespace lmbd {

/// Standard normal cdf through erfc, which keeps full relative accuracy in the
/// lower tail.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct CltScanRow {
  int n = 0;
  double psi = 0.0;
  double omega = 0.0;
  double ks_distance = 0.0;
};

/// sup_y |F(y) - Phi(z_y)| with z_y = (y - n psi tau1) / sqrt(n psi eta), taken
/// over the right-continuous points of the discrete cdf.
inline double standardized_ks_distance(const ModelParams& p) {
  const auto m = moments(p);
  if (!(m.variance > 0.0)) throw std::domain_error("standardized_ks_distance: degenerate variance");
  const double sd = std::sqrt(m.variance);
  const auto cum = pmf(p).cumulative();
  double sup = 0.0;
  for (int y = 0; y <= p.n(); ++y)
    sup = std::max(sup, std::abs(cum[static_cast<std::size_t>(y)] - normal_cdf((y - m.mean) / sd)));
  return std::min(sup, 1.0);
}

inline std::vector<CltScanRow> clt_scan(std::span<const int> ns, double psi, double omega) {
  std::vector<CltScanRow> rows;
  rows.reserve(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i > 0 && ns[i] <= ns[i - 1]) throw std::invalid_argument("clt_scan: trial counts must be strictly increasing");
    const ModelParams p(ns[i], psi, omega);
    rows.push_back({p.n(), psi, omega, standardized_ks_distance(p)});
  }
  return rows;
}

}  // namespace lmbd
