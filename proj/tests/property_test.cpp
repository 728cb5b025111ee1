// Randomised invariants. Each test draws kPropertyCases parameter sets from a
// fixed seed so failures reproduce exactly.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lmbd/lmbd.hpp"
#include "test_support.hpp"

using namespace lmbd;
using lmbd::testing::kPropertyCases;
using lmbd::testing::ParamGen;

TEST(Property, PmfIsNormalised) {
  ParamGen g(101);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(1, 300, 0.05, 20.0);
    const auto t = pmf(p);
    long double s = 0.0L;
    for (int y = 0; y <= p.n(); ++y) s += t.prob(y);
    ASSERT_NEAR(static_cast<double>(s), 1.0, 1e-12) << p.n() << " " << p.psi() << " " << p.omega();
  }
}

TEST(Property, BinomialReductionTermByTerm) {
  ParamGen g(102);
  for (int i = 0; i < kPropertyCases; ++i) {
    const int n = g.n(1, 60);
    const double psi = g.psi();
    const ModelParams p(n, psi, 1.0);
    const auto t = pmf(p);
    const auto ref = lmbd::testing::binomial_pmf_reference(n, psi);
    for (int y = 0; y <= n; ++y) {
      const double r = ref[static_cast<std::size_t>(y)];
      if (r > 1e-250) {
        ASSERT_NEAR(t.log_prob(y), std::log(r), 1e-12 * std::max(1.0, std::abs(std::log(r))));
      }
    }
    for (int r = 1; r <= n; ++r) ASSERT_EQ(tau(r, p), 1.0);
    const auto m = moments(p);
    ASSERT_NEAR(m.mean, n * psi, 1e-12 * n);
    ASSERT_NEAR(m.variance, n * psi * (1 - psi), 1e-12 * n);
  }
}

TEST(Property, OracleEquivalence) {
  ParamGen g(103);
  for (int i = 0; i < 60; ++i) {
    const auto p = g.params(1, 14, 0.1, 10.0);
    const auto a = pmf(p);
    const auto o = enumerate_pmf_oracle(p);
    for (int y = 0; y <= p.n(); ++y) ASSERT_NEAR(a.prob(y), o.prob(y), 1e-12);
  }
}

TEST(Property, MomentFormulaMatchesTable) {
  ParamGen g(104);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(1, 80, 0.3, 3.0);
    const auto m = moments(p);
    const auto t = pmf(p);
    ASSERT_NEAR(m.mean, t.mean(), 1e-10 * std::max(1.0, t.mean()));
    ASSERT_NEAR(m.variance, t.variance(), 1e-10 * std::max(1e-3, t.variance()))
        << p.n() << " " << p.psi() << " " << p.omega();
    ASSERT_GE(m.mean, 0.0);
    ASSERT_LE(m.mean, p.n());
    ASSERT_GE(m.variance, 0.0);
    ASSERT_GE(m.pi, 0.0);
    ASSERT_LE(m.pi, 1.0);
  }
}

TEST(Property, ReflectionSymmetry) {
  ParamGen g(105);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(1, 100, 0.1, 10.0);
    const auto a = pmf(p);
    const auto b = pmf(p.with_psi(1.0 - p.psi()));
    for (int y = 0; y <= p.n(); ++y) ASSERT_NEAR(a.prob(y), b.prob(p.n() - y), 1e-12);
  }
}

TEST(Property, CprIdentity) {
  ParamGen g(106);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(2, 10, 0.05, 20.0);
    const int rest = g.n(0, p.n() - 2);
    ASSERT_NEAR(1.0 / std::sqrt(conditional_cpr(p, rest)), p.omega(), 1e-10 * p.omega());
  }
}

TEST(Property, MarginalIdentity) {
  ParamGen g(107);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(1, 150, 0.2, 5.0);
    ASSERT_NEAR(marginal_pi(p), pmf(p).mean() / p.n(), 1e-12);
  }
}

TEST(Property, JointLawIsExchangeable) {
  ParamGen g(108);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(2, 20);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(p.n()));
    for (auto& b : bits) b = g.n(0, 1);
    const double lp = joint_log_prob(p, bits);
    std::shuffle(bits.begin(), bits.end(), g.engine());
    ASSERT_NEAR(joint_log_prob(p, bits), lp, 1e-12 * std::max(1.0, std::abs(lp)));
    int y = 0;
    for (auto b : bits) y += b;
    ASSERT_NEAR(lp + detail::log_binomial(p.n(), y), pmf(p).log_prob(y), 1e-10);
  }
}

TEST(Property, LimitLawMomentsMatchLimitMoments) {
  ParamGen g(109);
  for (int i = 0; i < kPropertyCases; ++i) {
    LimitRegime r;
    r.n = g.n(1, 40);
    r.omega_edge = g.n(0, 1) ? OmegaEdge::to_zero : OmegaEdge::to_infinity;
    r.psi_edge = static_cast<PsiEdge>(g.n(0, 2));
    const double psi = g.psi();
    const auto law = limit_distribution(r, psi);
    const auto m = limit_moments(r, psi);
    double mass = 0.0, mean = 0.0;
    for (const auto& s : law) {
      ASSERT_GE(s.mass, 0.0);
      mass += s.mass;
      mean += s.y * s.mass;
    }
    double var = 0.0;
    for (const auto& s : law) var += (s.y - mean) * (s.y - mean) * s.mass;
    const double scale = std::max(1.0, static_cast<double>(r.n) * r.n);
    ASSERT_NEAR(mass, 1.0, 1e-12);
    ASSERT_NEAR(mean, m.mean, 1e-12 * r.n);
    ASSERT_NEAR(var, m.variance, 1e-12 * scale);
    ASSERT_GE(m.variance, 0.0);
  }
}

TEST(Property, TauLimitsAgreeAtExtremeOmega) {
  for (int n = 1; n <= 15; ++n)
    for (double psi : {0.1, 0.5, 0.9}) {
      const ModelParams lo(n, psi, 1e-6), hi(n, psi, 1e6);
      for (int j = 1; j <= n; ++j) {
        const double lim = tau_limit_omega_zero(j, n, psi);
        ASSERT_NEAR(tau(j, lo), lim, 1e-3 * lim) << n << " " << psi << " " << j;
      }
      const int jmax = n % 2 == 0 ? n / 2 : (n - 1) / 2;
      for (int j = 1; j <= jmax; ++j) {
        const double lim = n % 2 == 0 ? tau_limit_omega_inf_even(j, n, psi) : tau_limit_omega_inf_odd(j, n, psi);
        ASSERT_NEAR(tau(j, hi), lim, 1e-3 * lim) << n << " " << psi << " " << j;
      }
    }
}

TEST(Property, KsDistanceIsBounded) {
  ParamGen g(110);
  for (int i = 0; i < 100; ++i) {
    const auto p = g.params(2, 200, 0.3, 3.0);
    const double ks = standardized_ks_distance(p);
    ASSERT_GE(ks, 0.0);
    ASSERT_LE(ks, 1.0);
  }
}

TEST(Property, KsShrinksAlongNNearIndependence) {
  // The shrinking-KS property survives only in a thin band around omega = 1;
  // see GaussApprox.DependentRegimesDoNotApproachNormal for what happens outside it.
  ParamGen g(111);
  for (int i = 0; i < 40; ++i) {
    const double psi = g.uniform(0.2, 0.8);
    const double omega = g.uniform(0.99, 1.02);
    const std::vector<int> ns{10, 40, 160};
    const auto rows = clt_scan(ns, psi, omega);
    ASSERT_LT(rows[1].ks_distance, rows[0].ks_distance) << psi << " " << omega;
    ASSERT_LT(rows[2].ks_distance, rows[1].ks_distance) << psi << " " << omega;
    ASSERT_LT(rows[2].ks_distance, 0.1) << psi << " " << omega;
  }
}

TEST(Property, IndependentKsMatchesReference) {
  ParamGen g(112);
  for (int i = 0; i < 60; ++i) {
    const int n = g.n(2, 400);
    const double psi = g.uniform(0.05, 0.95);
    ASSERT_NEAR(standardized_ks_distance(ModelParams(n, psi, 1.0)),
                lmbd::testing::binomial_normal_ks_reference(n, psi), 1e-12);
  }
}

TEST(Property, FactorisationReconstructsDn) {
  ParamGen g(113);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(2, 12, 0.05, 2.0);
    const auto d = delta(p);
    if (!d) continue;
    const double dn = d_n(p);
    ASSERT_NEAR(*d * factor_product(p), dn, 1e-10 * std::abs(dn));
    ASSERT_GT(*d, 0.0);
  }
}

TEST(Property, Tau1RegionEqualsDnSign) {
  ParamGen g(114);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(2, 15, 0.05, 2.0);
    const double t = tau(1, p);
    ASSERT_EQ(tau1_at_most_one(t), d_n_nonpositive(p)) << p.n() << " " << p.psi() << " " << p.omega();
    ASSERT_EQ(tau1_at_most_one(t), in_tau1_region(p.psi(), p.omega()));
  }
}

TEST(Property, PsiExceedsPiExactlyWhereTau1BelowOne) {
  ParamGen g(115);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto p = g.params(2, 20, 0.05, 2.0);
    const auto rep = psi_pi_ordering(p);
    if (std::abs(rep.tau1 - 1.0) <= tolerance::kTie) {
      ASSERT_EQ(rep.psi_vs_pi, Ordering::equal);
    } else {
      ASSERT_EQ(rep.psi_vs_pi == Ordering::greater, rep.tau1 < 1.0);
    }
    ASSERT_TRUE(rep.holds);
  }
}

TEST(Property, AccuracyReducesToBinomial) {
  for (int n = 1; n <= 50; ++n) {
    ParamGen g(static_cast<std::uint64_t>(200 + n));
    for (int i = 0; i < 5; ++i) {
      const double psi = g.uniform(0.0, 1.0);
      ASSERT_NEAR(ensemble_accuracy(ModelParams(n, psi, 1.0)), binomial_accuracy(n, psi), 1e-12);
    }
  }
}

TEST(Property, AccuracyIsProbabilityAndTendsToPsiForOddN) {
  ParamGen g(116);
  for (int i = 0; i < 50; ++i) {
    const int n = 2 * g.n(0, 10) + 1;
    const double psi = g.uniform(0.51, 0.99);
    const double a = ensemble_accuracy(ModelParams(n, psi, g.omega(0.1, 10.0)));
    ASSERT_TRUE(std::isfinite(a));
    ASSERT_GE(a, 0.0);
    ASSERT_LE(a, 1.0);
    ASSERT_NEAR(ensemble_accuracy(ModelParams(n, psi, 1e8)), psi, 1e-6);
  }
}
