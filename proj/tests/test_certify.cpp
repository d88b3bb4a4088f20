#include <gtest/gtest.h>

#include <random>

#include "scalerobust/certify.hpp"

using namespace scalerobust;

namespace {

const std::vector<CertRegion> kAll{CertRegion::a, CertRegion::b, CertRegion::c};

}  // namespace

TEST(Certify, AllRegionsAtDeskScale) {
  const CertificateReport rep = certify(kAll);
  ASSERT_EQ(rep.regions.size(), 3u);
  EXPECT_TRUE(rep.all_certified());
  for (const RegionReport& r : rep.regions) {
    EXPECT_TRUE(r.certified) << r.name << ": " << r.note;
    EXPECT_GT(r.tightest_margin, 0.0) << r.name;
    EXPECT_GT(r.tightest_margin, r.tightest_slack) << r.name;
    EXPECT_GE(r.cells_examined, r.base_cells);
  }
  EXPECT_GT(rep.regions[0].grid_extreme, 1.0);
  EXPECT_LT(rep.regions[1].grid_extreme, 1.0);
  EXPECT_LT(rep.regions[1].boundary_extreme, 1.0);
  EXPECT_LE(rep.regions[2].grid_extreme, 1.9068943 + 2e-8);
  EXPECT_NEAR(rep.regions[2].boundary_extreme, 1.5 / 0.80564048, 1e-12);
}

TEST(Certify, CoarserEpsilonAlsoCloses) {
  CertifyOptions opt;
  opt.epsilon = 1e-5;
  EXPECT_TRUE(certify(kAll, opt).all_certified());
}

TEST(Certify, DeterministicAcrossThreads) {
  CertifyOptions one, many;
  one.threads = 1;
  many.threads = 6;
  for (CertRegion reg : kAll) {
    const RegionReport a = certify({reg}, one).regions[0];
    const RegionReport b = certify({reg}, many).regions[0];
    EXPECT_EQ(a.cells_examined, b.cells_examined);
    EXPECT_EQ(a.cells_refined, b.cells_refined);
    EXPECT_EQ(a.grid_extreme, b.grid_extreme);
    EXPECT_EQ(a.grid_extreme_q, b.grid_extreme_q);
    EXPECT_EQ(a.tightest_margin, b.tightest_margin);
  }
}

TEST(Certify, FalseStatementIsReportedUncertified) {
  CertifyOptions opt;
  opt.q_left = 0.0935;  // M_r(T_q) drops below 1 before this quantile
  const RegionReport a = certify({CertRegion::a}, opt).regions[0];
  EXPECT_FALSE(a.certified);
  EXPECT_NE(a.note.find("UNCERTIFIED"), std::string::npos);

  opt = {};
  opt.beta = 1.90;
  EXPECT_FALSE(certify({CertRegion::c}, opt).regions[0].certified);
}

TEST(Certify, RejectsEpsilonOutsideRange) {
  CertifyOptions opt;
  opt.epsilon = 1e-3;
  EXPECT_THROW(certify(kAll, opt), std::domain_error);
  opt.epsilon = 1e-10;
  EXPECT_THROW(certify(kAll, opt), std::domain_error);
}

TEST(Certify, CertifiedStatementsHoldAtRandomPoints) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    ASSERT_GT(markup_revenue_triangle(2.446946, 0.09310569 * u(rng)), 1.0);
    const double q = 0.09310571 + (1.0 - 0.09310571) * u(rng);
    const double r = 1.0 + 10.0 * (1.0 - u(rng));
    ASSERT_LT(markup_revenue_triangle_any(r, q), 1.0);
    ASSERT_LE(apx_mixture_triangle(0.80564048, 2.4469452, u(rng)), 1.9068943 + 2e-8);
  }
}
