#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lmbd/lmbd.hpp"

using namespace lmbd;

TEST(Dn, Examples) {
  EXPECT_EQ(d_n(ModelParams(6, 0.3, 1.0)), 0.0);
  for (int n : {2, 5, 8}) EXPECT_NEAR(d_n(ModelParams(n, 0.5, 1.7)), 0.0, 1e-12);
  EXPECT_NEAR(d_n(ModelParams(2, 0.3, 1.5)), 0.14, 1e-15);
}

TEST(Dn, SmallOmegaOffsetKeepsRelativeAccuracy) {
  // D_2 = (psi - 1)(2 psi - 1)(omega - 1) exactly.
  const double eps = 1e-5;
  const double dn = d_n(ModelParams(2, 0.3, 1.0 + eps));
  EXPECT_NEAR(dn, 0.28 * eps, 1e-10 * 0.28 * eps);
}

TEST(Delta, TwoTrialIsIdenticallyOne) {
  for (double psi : {0.1, 0.3, 0.7, 0.9})
    for (double omega : {0.2, 0.6, 1.4, 1.8}) EXPECT_NEAR(*delta(ModelParams(2, psi, omega)), 1.0, 1e-10);
}

TEST(Delta, SingularSetIsMarked) {
  EXPECT_FALSE(delta(ModelParams(4, 0.5, 1.3)));
  EXPECT_FALSE(delta(ModelParams(4, 1.0, 1.3)));
  EXPECT_FALSE(delta(ModelParams(4, 0.3, 1.0)));
  EXPECT_FALSE(delta(ModelParams(4, 0.3, 1.0 + 1e-7)));
  EXPECT_TRUE(delta(ModelParams(4, 0.3, 1.0 + 1e-5)));
}

TEST(Delta, PositiveOnTableGrids) {
  for (int n : {4, 5, 9, 12})
    for (double psi : {0.1, 0.3, 0.7, 0.9})
      for (double omega : {0.2, 0.6, 1.4, 1.8}) {
        const auto d = delta(ModelParams(n, psi, omega));
        ASSERT_TRUE(d);
        EXPECT_GT(*d, 0.0) << n << " " << psi << " " << omega;
      }
}

TEST(DeltaPolynomial, ExactDivisionAndSmallCases) {
  for (int n = 2; n <= 15; ++n) {
    const auto poly = DeltaPolynomial::factor(n);
    ASSERT_TRUE(poly) << "n=" << n;
    EXPECT_EQ(poly->n(), n);
    EXPECT_LE(poly->psi_degree(), n - 2);
  }
  // Delta is the constant 1 for two and three trials.
  for (int n : {2, 3}) {
    const auto poly = DeltaPolynomial::factor(n);
    EXPECT_EQ(poly->psi_degree(), 0);
    EXPECT_EQ(poly->omega_degree(), 0);
    EXPECT_EQ(poly->coeff(0, 0), 1);
  }
  EXPECT_THROW(DeltaPolynomial::factor(1), std::domain_error);
}

TEST(DeltaPolynomial, AgreesWithLogDomainDelta) {
  for (int n = 2; n <= 12; ++n) {
    const auto poly = DeltaPolynomial::factor(n);
    for (double psi : {0.05, 0.35, 0.65, 0.95})
      for (double omega : {0.1, 0.8, 1.3, 2.0}) {
        const double a = *delta(ModelParams(n, psi, omega));
        EXPECT_NEAR(poly->evaluate(psi, omega), a, 1e-9 * a) << n << " " << psi << " " << omega;
      }
  }
}

TEST(GridSpec, UniformAndValidation) {
  const auto g = GridSpec::default_grid(4);
  EXPECT_EQ(g.psi_values.size(), 101u);
  EXPECT_EQ(g.psi_values.front(), 0.01);
  EXPECT_EQ(g.psi_values.back(), 0.99);
  EXPECT_EQ(g.omega_values.front(), 0.05);
  EXPECT_EQ(g.omega_values.back(), 2.0);
  EXPECT_THROW(GridSpec::uniform(4, 0.5, 0.4, 3, 0.1, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(GridSpec::uniform(4, 0.1, 1.2, 3, 0.1, 1.0, 3), std::domain_error);
  EXPECT_THROW(GridSpec::uniform(4, 0.1, 0.9, 3, 0.0, 1.0, 3), std::domain_error);
  EXPECT_THROW(GridSpec::uniform(4, 0.1, 0.9, 0, 0.1, 1.0, 3), std::invalid_argument);
  GridSpec bad{{}, {1.0}, 3};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(DeltaGrid, TwoTrialGridIsOne) {
  const auto g = delta_grid(GridSpec::default_grid(2));
  for (const auto& c : g.cells)
    if (c.flag) {
      EXPECT_NEAR(c.value, 1.0, 1e-10);
    }
}

TEST(DeltaGrid, FullRangeGridPositiveWithSingularColumn) {
  const auto g = delta_grid(GridSpec::uniform(4, 0.0, 1.0, 101, 0.02, 2.0, 100));
  double lo = std::numeric_limits<double>::infinity();
  std::size_t singular = 0;
  for (const auto& c : g.cells) {
    if (c.flag) {
      lo = std::min(lo, c.value);
    } else {
      ++singular;
      EXPECT_TRUE(std::isnan(c.value));
    }
  }
  EXPECT_GT(lo, 0.0);
  // omega = 1 column and psi in {0.5, 1} rows
  for (std::size_t i = 0; i < g.spec.psi_values.size(); ++i) EXPECT_FALSE(g.at(i, 49).flag);
  EXPECT_GE(singular, 101u + 2 * 100u - 2);
}

TEST(DeltaGrid, RowMajorLayout) {
  const auto g = delta_grid(GridSpec::uniform(3, 0.1, 0.9, 3, 0.5, 1.5, 4));
  ASSERT_EQ(g.cells.size(), 12u);
  EXPECT_EQ(g.cells[1].psi, 0.1);
  EXPECT_EQ(g.cells[1].omega, g.spec.omega_values[1]);
  EXPECT_EQ(g.at(2, 3).psi, 0.9);
  EXPECT_EQ(g.at(2, 3).omega, 1.5);
}

TEST(Tau1Grid, Examples) {
  const auto g = tau1_region_grid(GridSpec::uniform(5, 0.1, 0.9, 9, 0.5, 1.5, 3));
  for (std::size_t i = 0; i < g.spec.psi_values.size(); ++i) {
    EXPECT_EQ(g.at(i, 1).value, 1.0);
    EXPECT_TRUE(g.at(i, 1).flag);
  }
  for (int n : {4, 5, 9, 12}) EXPECT_TRUE(tau1_at_most_one(tau(1, ModelParams(n, 0.8, 1.6))));
  EXPECT_FALSE(tau1_at_most_one(tau(1, ModelParams(6, 0.8, 0.4))));
}

TEST(Tau1Grid, FlagMatchesStoredValue) {
  const auto g = tau1_region_grid(GridSpec::default_grid(7));
  for (const auto& c : g.cells) ASSERT_EQ(c.flag, tau1_at_most_one(c.value));
}

TEST(Ordering, Examples) {
  const auto a = psi_pi_ordering(ModelParams(7, 0.6, 1.4));
  EXPECT_TRUE(a.strict_order_expected);
  EXPECT_EQ(a.psi_vs_pi, Ordering::greater);
  EXPECT_TRUE(a.holds);

  for (double psi : {0.2, 0.5, 0.9}) {
    const auto b = psi_pi_ordering(ModelParams(5, psi, 1.0));
    EXPECT_EQ(b.pi, psi);
    EXPECT_EQ(b.psi_vs_pi, Ordering::equal);
  }

  const auto c = psi_pi_ordering(ModelParams(6, 0.3, 0.5));
  EXPECT_FALSE(c.strict_order_expected);
  EXPECT_EQ(c.psi_vs_pi, Ordering::greater);

  const auto d = psi_pi_ordering(ModelParams(6, 0.5, 1.7));
  EXPECT_FALSE(d.strict_order_expected);
  EXPECT_EQ(d.psi_vs_pi, Ordering::equal);
}
