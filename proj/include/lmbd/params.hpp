#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lmbd {

/// One LMBD instance: n exchangeable trials, independence-marginal
/// probability psi and intra-units association omega.
///
/// omega < 1 is positive association, omega > 1 negative association and
/// omega == 1 independence (the Binomial case).
class ModelParams {
 public:
  ModelParams(int n, double psi, double omega) : n_(n), psi_(psi), omega_(omega) {
    if (n < 1) throw std::domain_error("n must be >= 1, got " + std::to_string(n));
    if (!(psi >= 0.0 && psi <= 1.0))
      throw std::domain_error("psi must lie in [0, 1], got " + std::to_string(psi));
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw std::domain_error("omega must be a finite positive real, got " + std::to_string(omega));
  }

  int n() const noexcept { return n_; }
  double psi() const noexcept { return psi_; }
  double omega() const noexcept { return omega_; }

  bool independent() const noexcept { return omega_ == 1.0; }
  bool degenerate_psi() const noexcept { return psi_ == 0.0 || psi_ == 1.0; }

  ModelParams with_n(int n) const { return {n, psi_, omega_}; }
  ModelParams with_psi(double psi) const { return {n_, psi, omega_}; }
  ModelParams with_omega(double omega) const { return {n_, psi_, omega}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  int n_;
  double psi_;
  double omega_;
};

}  // namespace lmbd
