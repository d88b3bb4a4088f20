#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scalerobust/symmetrize.hpp"

using namespace scalerobust;

namespace {

const MarkupMixture kOptimal = MarkupMixture::two_point(0.80564048, 2.4469452);

/// Closed-form X_L for reserve-1 SPA at v1 < v2: the high bidder wins iff k v2 >= 1.
double reserve_alloc_high(double v2, double l) {
  const double t0 = -std::log(v2);
  return std::clamp((l - t0) / (2.0 * l), 0.0, 1.0);
}

}  // namespace

TEST(ScaledAverage, Validation) {
  EXPECT_THROW(ScaledAverage(ReserveSecondPrice{1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(ScaledAverage(ReserveSecondPrice{1.0}, 1.0, 32), std::invalid_argument);
}

TEST(ScaledAverage, InvariantBaseIsUnchanged) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double l : {0.1, 1.0, 5.0, 50.0}) {
    const ScaledAverage avg(kOptimal, l);
    for (int i = 0; i < 30; ++i) {
      const double v1 = 3.0 * u(rng), v2 = 3.0 * u(rng);
      const Outcome a = averaged_outcome(avg, v1, v2), b = kOptimal(v1, v2);
      for (int j = 0; j < 2; ++j) {
        EXPECT_NEAR(a.alloc[j], b.alloc[j], 1e-12);
        EXPECT_NEAR(a.pay[j], b.pay[j], 1e-12);
      }
      const InvarianceDefect d = invariance_defect(avg, v1, v2, 0.125 + 7.875 * u(rng));
      EXPECT_LE(d.allocation, 1e-12);
      EXPECT_LE(d.payment, 1e-12);
    }
  }
}

TEST(ScaledAverage, ReserveAllocationMatchesClosedForm) {
  const ScaledAverage avg(ReserveSecondPrice{1.0}, 5.0);
  const Outcome o = averaged_outcome(avg, 0.5, 0.8);
  EXPECT_NEAR(o.alloc[1], reserve_alloc_high(0.8, 5.0), 1e-8);
  EXPECT_EQ(o.alloc[0], 0.0);
  // Strictly between the unscaled rule (no sale) and the scale-free limit 1/2.
  EXPECT_GT(o.alloc[1], 0.0);
  EXPECT_LT(o.alloc[1], 0.5);
  EXPECT_GE(o.pay[1], 0.0);
  EXPECT_LE(o.pay[1], 0.8);
}

TEST(ScaledAverage, PaymentMatchesClosedForm) {
  // High bidder at 0.8, low at 0.5: pays max(1/k, 0.5) once k >= 1/0.8.
  const double l = 5.0;
  const ScaledAverage avg(ReserveSecondPrice{1.0}, l);
  const Outcome o = averaged_outcome(avg, 0.5, 0.8);
  const double t_sale = -std::log(0.8), t_mid = -std::log(0.5);
  const double expected =
      ((std::exp(-t_sale) - std::exp(-t_mid)) + 0.5 * (l - t_mid)) / (2.0 * l);
  EXPECT_NEAR(o.pay[1], expected, 1e-10);
}

TEST(InvarianceDefect, SpecimenWithinBound) {
  const ScaledAverage avg(ReserveSecondPrice{1.0}, 10.0);
  const InvarianceDefect d = invariance_defect(avg, 0.5, 0.8, 2.0);
  EXPECT_NEAR(d.allocation_bound, std::log(2.0) / 10.0, 1e-15);
  EXPECT_LE(d.allocation, std::log(2.0) / 10.0 + 1e-8);
  EXPECT_GT(d.allocation, 0.0);
  EXPECT_TRUE(d.within(1e-8));
  const InvarianceDefect one = invariance_defect(avg, 0.5, 0.8, 1.0);
  EXPECT_EQ(one.allocation, 0.0);
  EXPECT_EQ(one.payment, 0.0);
}

TEST(InvarianceDefect, BoundsHoldOnFuzzGridAndShrinkWithL) {
  double prev_alloc = 1e9, prev_pay = 1e9;
  for (double l : {1.0, 5.0, 10.0, 50.0}) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_alloc = 0.0, worst_pay = 0.0;
    for (int i = 0; i < 40; ++i) {
      const double v1 = 0.05 + 3.0 * u(rng), v2 = 0.05 + 3.0 * u(rng);
      const double s = std::exp(std::log(8.0) * (2.0 * u(rng) - 1.0));
      const InvarianceDefect d = invariance_defect(ScaledAverage(ReserveSecondPrice{1.0}, l), v1, v2, s);
      EXPECT_TRUE(d.within(1e-8)) << v1 << " " << v2 << " " << s << " " << l;
      worst_alloc = std::max(worst_alloc, d.allocation);
      worst_pay = std::max(worst_pay, d.payment);
    }
    EXPECT_LE(worst_alloc, prev_alloc + 1e-12) << l;
    EXPECT_LE(worst_pay, prev_pay + 1e-12) << l;
    prev_alloc = worst_alloc;
    prev_pay = worst_pay;
  }
}

TEST(ScaledAverage, FeasibleIrAndTruthful) {
  const ScaledAverage avg(ReserveSecondPrice{1.0}, 3.0, 256);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double v1 = 3.0 * u(rng), v2 = 3.0 * u(rng);
    EXPECT_TRUE(feasible_and_ir(avg(v1, v2), v1, v2, 1e-10));
  }
  const std::vector<double> grid{0.0, 0.1, 0.3, 0.6, 1.0, 1.4, 2.0, 3.5};
  EXPECT_TRUE(check_dsic(avg, grid, 1e-9).empty());
}

TEST(RevenuePreservation, InvariantBaseOnTriangles) {
  for (double q : {0.05, oracle::kQStar, 0.3, 0.7, 1.0}) {
    const ScaledAverage avg(kOptimal, 4.0);
    const RevenueCurve c = curve_from_triangle(TriangleParams(q));
    const PreservationVerdict v = revenue_preservation(avg, c, 1.9068943);
    EXPECT_TRUE(v.holds) << q;
    EXPECT_NEAR(v.averaged_revenue, mixture_revenue(kOptimal, c), 1e-9) << q;
  }
}

TEST(RevenuePreservation, ReserveBaseOnScaledTriangles) {
  const ReserveSecondPrice base{0.01};
  const double l = 2.0;
  for (double q : {0.1, 0.4, 0.8}) {
    const RevenueCurve c = curve_from_triangle(TriangleParams(q));
    // The family must cover every scale k e^t reached below.
    const double beta = scaled_family_ratio(base, c, l + std::log(3.0));
    ASSERT_TRUE(std::isfinite(beta));
    const ScaledAverage avg(base, l);
    for (double k : {0.5, 1.0, 3.0}) {
      EXPECT_TRUE(revenue_preservation(avg, c.scaled(k), beta).holds) << q << " " << k;
    }
  }
  // Midpoint rule over t as a cross-check of the adaptive quadrature.
  const RevenueCurve c = curve_from_triangle(TriangleParams(0.4));
  const ScaledAverage avg(base, 1.0);
  double direct = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double t = -1.0 + 2.0 * (i + 0.5) / n;
    direct += base.expected_revenue(c.scaled(std::exp(t))) * std::exp(-t);
  }
  direct /= n;
  EXPECT_NEAR(averaged_revenue(avg, c), direct, 1e-6);
}

TEST(RevenuePreservation, SmallLIsNearBase) {
  const RevenueCurve c = curve_from_triangle(TriangleParams(0.4));
  const ReserveSecondPrice base{1.0};
  EXPECT_NEAR(averaged_revenue(ScaledAverage(base, 1e-6), c), base.expected_revenue(c), 1e-5);
}
