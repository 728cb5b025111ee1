#pragma once

// The sign of tau1 - 1 and the factorisation of
//
//   D_n = K_{n-1} - K_n = Delta (psi-1)(2psi-1)(omega-1) [(omega+1) if n odd].
//
// Delta is available two ways: numerically as D_n over the factor product
// (delta()), and as an exact integer polynomial in (psi, omega) obtained by
// dividing the polynomial D_n by the linear factors (DeltaPolynomial). The
// division leaving no remainder is itself the factorisation identity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lmbd/constants.hpp"
#include "lmbd/core.hpp"

namespace lmbd {

/// K_{n-1} - K_n, differenced in the log domain with the larger exponent
/// factored out.
inline double d_n(const ModelParams& p) {
  if (p.independent()) return 0.0;
  return detail::exp_difference(log_k(p.n(), 1, p.psi(), p.omega()), log_k(p.n(), 0, p.psi(), p.omega()));
}

/// (psi-1)(2psi-1)(omega-1), times (omega+1) for odd n.
inline double factor_product(const ModelParams& p) {
  const double psi = p.psi();
  const double omega = p.omega();
  double f = (psi - 1.0) * (2.0 * psi - 1.0) * (omega - 1.0);
  if (p.n() % 2 == 1) f *= omega + 1.0;
  return f;
}

/// Within kSingularRadius of psi = 1/2, psi = 1 or omega = 1, where Delta is
/// a 0/0 ratio.
inline bool near_singular_set(const ModelParams& p) {
  constexpr double r = tolerance::kSingularRadius;
  return std::abs(p.psi() - 0.5) < r || std::abs(p.psi() - 1.0) < r || std::abs(p.omega() - 1.0) < r;
}

/// D_n / factor_product, or nullopt near the singular set.
inline std::optional<double> delta(const ModelParams& p) {
  if (near_singular_set(p)) return std::nullopt;
  return d_n(p) / factor_product(p);
}

/// Delta(psi, omega) = sum_{a,b} c[a][b] psi^a omega^b with integer
/// coefficients, built by exact polynomial division.
class DeltaPolynomial {
 public:
  static constexpr int kMaxTrials = 30;

  /// nullopt if D_n is not divisible by the factor product (never observed,
  /// but the division checks rather than assumes).
  static std::optional<DeltaPolynomial> factor(int n) {
    if (n < 2 || n > kMaxTrials) throw std::domain_error("DeltaPolynomial: n must lie in [2, 30]");
    Grid d = d_n_polynomial(n);
    // (psi-1)(2psi-1)(omega-1)(omega+1) = -(1-psi)(1-2psi)(1-omega)(1+omega)
    if (!divide_psi(d, 1) || !divide_psi(d, 2) || !divide_omega(d, 1)) return std::nullopt;
    if (n % 2 == 1 && !divide_omega(d, -1)) return std::nullopt;
    // Drop vanishing top rows and columns so the degrees are the true ones.
    while (d.size() > 1 && std::all_of(d.back().begin(), d.back().end(), [](Wide v) { return v == 0; })) d.pop_back();
    while (d.front().size() > 1 &&
           std::all_of(d.begin(), d.end(), [](const std::vector<Wide>& row) { return row.back() == 0; }))
      for (auto& row : d) row.pop_back();
    DeltaPolynomial out;
    out.n_ = n;
    out.coeffs_.assign(d.size(), std::vector<std::int64_t>(d.front().size()));
    for (std::size_t a = 0; a < d.size(); ++a)
      for (std::size_t b = 0; b < d[a].size(); ++b) out.coeffs_[a][b] = narrow(-d[a][b]);
    return out;
  }

  int n() const noexcept { return n_; }
  int psi_degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  int omega_degree() const noexcept { return static_cast<int>(coeffs_.front().size()) - 1; }
  std::int64_t coeff(int a, int b) const { return coeffs_.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)); }

  /// Nested Horner in double-double; the coefficients alternate in sign and
  /// plain double Horner loses ~8 digits by n = 12.
  double evaluate(double psi, double omega) const {
    detail::DoubleDouble outer;
    for (auto row = coeffs_.rbegin(); row != coeffs_.rend(); ++row) {
      detail::DoubleDouble inner;
      for (auto c = row->rbegin(); c != row->rend(); ++c) inner = inner * omega + detail::DoubleDouble{static_cast<double>(*c), 0.0};
      outer = outer * psi + inner;
    }
    return outer.hi + outer.lo;
  }

 private:
  using Wide = __int128;
  using Grid = std::vector<std::vector<Wide>>;

  static std::int64_t narrow(Wide v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("DeltaPolynomial: coefficient exceeds 64 bits");
    return static_cast<std::int64_t>(v);
  }

  static Wide binom(int n, int k) {
    Wide c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
  }

  // D_n as coefficients c[a][b] of psi^a omega^b, expanding (1-psi)^(m-i).
  static Grid d_n_polynomial(int n) {
    const int max_exp = (n / 2) * (n - n / 2);
    Grid g(static_cast<std::size_t>(n) + 1, std::vector<Wide>(static_cast<std::size_t>(max_exp) + 1, 0));
    auto add_k = [&](int a, int sign) {
      const int m = n - a;
      for (int i = 0; i <= m; ++i) {
        const auto b = static_cast<std::size_t>((m - i) * (i + a));
        for (int k = 0; k <= m - i; ++k) {
          const Wide term = binom(m, i) * binom(m - i, k) * ((k % 2) ? -1 : 1);
          g[static_cast<std::size_t>(i + k)][b] += sign * term;
        }
      }
    };
    add_k(1, +1);
    add_k(0, -1);
    return g;
  }

  // In-place division by (1 - c psi); false on a non-zero remainder.
  static bool divide_psi(Grid& g, int c) {
    const std::size_t top = g.size() - 1;
    Grid q(top, std::vector<Wide>(g.front().size(), 0));
    for (std::size_t b = 0; b < g.front().size(); ++b) {
      Wide prev = 0;
      for (std::size_t a = 0; a < top; ++a) prev = q[a][b] = g[a][b] + c * prev;
      if (g[top][b] + c * prev != 0) return false;
    }
    g = std::move(q);
    return true;
  }

  // In-place division by (1 - c omega); false on a non-zero remainder.
  static bool divide_omega(Grid& g, int c) {
    const std::size_t top = g.front().size() - 1;
    for (auto& row : g) {
      std::vector<Wide> q(top, 0);
      Wide prev = 0;
      for (std::size_t b = 0; b < top; ++b) prev = q[b] = row[b] + c * prev;
      if (row[top] + c * prev != 0) return false;
      row = std::move(q);
    }
    return true;
  }

  int n_ = 0;
  std::vector<std::vector<std::int64_t>> coeffs_;
};

struct GridSpec {
  std::vector<double> psi_values;
  std::vector<double> omega_values;
  int n = 1;

  /// `steps` evenly spaced points per axis, endpoints included exactly.
  static GridSpec uniform(int n, double psi_min, double psi_max, int psi_steps, double omega_min, double omega_max,
                          int omega_steps) {
    auto axis = [](double lo, double hi, int steps) {
      if (steps < 1) throw std::invalid_argument("GridSpec: an axis needs at least one point");
      std::vector<double> v(static_cast<std::size_t>(steps));
      for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
      if (steps > 1) v.back() = hi;
      return v;
    };
    GridSpec s{axis(psi_min, psi_max, psi_steps), axis(omega_min, omega_max, omega_steps), n};
    s.validate();
    return s;
  }

  /// psi in [0.01, 0.99], omega in [0.05, 2], 101 points each.
  static GridSpec default_grid(int n) { return uniform(n, 0.01, 0.99, 101, 0.05, 2.0, 101); }

  void validate() const {
    if (n < 1) throw std::domain_error("GridSpec: n must be >= 1");
    if (psi_values.empty() || omega_values.empty()) throw std::invalid_argument("GridSpec: empty axis");
    for (std::size_t i = 0; i < psi_values.size(); ++i) {
      if (!(psi_values[i] >= 0.0 && psi_values[i] <= 1.0)) throw std::domain_error("GridSpec: psi outside [0, 1]");
      if (i > 0 && !(psi_values[i] > psi_values[i - 1])) throw std::invalid_argument("GridSpec: psi axis not increasing");
    }
    for (std::size_t i = 0; i < omega_values.size(); ++i) {
      if (!(omega_values[i] > 0.0)) throw std::domain_error("GridSpec: omega must be > 0");
      if (i > 0 && !(omega_values[i] > omega_values[i - 1]))
        throw std::invalid_argument("GridSpec: omega axis not increasing");
    }
  }
};

enum class GridKind { delta, tau1 };

struct GridCell {
  double psi = 0.0;
  double omega = 0.0;
  double value = 0.0;  ///< tau1, or Delta (NaN when singular)
  bool flag = false;   ///< tau1 <= 1, or Delta defined
};

/// Cells in row-major order: psi is the slow index, omega the fast one.
struct RegionGrid {
  GridSpec spec;
  GridKind kind = GridKind::delta;
  std::vector<GridCell> cells;

  const GridCell& at(std::size_t psi_index, std::size_t omega_index) const {
    return cells.at(psi_index * spec.omega_values.size() + omega_index);
  }
};

/// tau1 <= 1, ties within kTie counted as "<=".
inline bool tau1_at_most_one(double tau1) { return tau1 <= 1.0 + tolerance::kTie; }

/// D_n <= 0 with the same tie convention, relative to K_n.
inline bool d_n_nonpositive(const ModelParams& p) {
  return d_n(p) <= tolerance::kTie * std::exp(log_k(p.n(), 0, p.psi(), p.omega()));
}

/// The closed-form region {psi <= 1/2, omega <= 1} U {psi >= 1/2, omega >= 1}.
inline bool in_tau1_region(double psi, double omega) {
  return (psi <= 0.5 && omega <= 1.0) || (psi >= 0.5 && omega >= 1.0);
}

template <class CellFn>
RegionGrid evaluate_grid(const GridSpec& spec, GridKind kind, CellFn&& fn) {
  spec.validate();
  RegionGrid g{spec, kind, {}};
  g.cells.reserve(spec.psi_values.size() * spec.omega_values.size());
  for (double psi : spec.psi_values)
    for (double omega : spec.omega_values) g.cells.push_back(fn(ModelParams(spec.n, psi, omega)));
  return g;
}

inline RegionGrid delta_grid(const GridSpec& spec) {
  return evaluate_grid(spec, GridKind::delta, [](const ModelParams& p) {
    const auto d = delta(p);
    return GridCell{p.psi(), p.omega(), d.value_or(std::numeric_limits<double>::quiet_NaN()), d.has_value()};
  });
}

inline RegionGrid tau1_region_grid(const GridSpec& spec) {
  return evaluate_grid(spec, GridKind::tau1, [](const ModelParams& p) {
    const double t = tau(1, p);
    return GridCell{p.psi(), p.omega(), t, tau1_at_most_one(t)};
  });
}

enum class Ordering { less, equal, greater };

struct OrderingReport {
  double psi = 0.0;
  double pi = 0.0;
  double tau1 = 1.0;
  Ordering psi_vs_pi = Ordering::equal;
  /// 1/2 < psi < 1 and omega > 1: the strict inequality psi > pi is asserted.
  bool strict_order_expected = false;
  bool holds = true;
};

inline Ordering compare_psi_pi(double psi, double pi) {
  if (std::abs(psi - pi) <= tolerance::kTie * std::max(psi, pi)) return Ordering::equal;
  return psi > pi ? Ordering::greater : Ordering::less;
}

inline OrderingReport psi_pi_ordering(const ModelParams& p) {
  OrderingReport r;
  r.psi = p.psi();
  r.tau1 = tau(1, p);
  r.pi = std::clamp(p.psi() * r.tau1, 0.0, 1.0);
  r.psi_vs_pi = compare_psi_pi(r.psi, r.pi);
  r.strict_order_expected = p.psi() > 0.5 && p.psi() < 1.0 && p.omega() > 1.0;
  r.holds = !r.strict_order_expected || r.psi_vs_pi == Ordering::greater;
  return r;
}

}  // namespace lmbd
