#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "scalerobust/io.hpp"

using namespace scalerobust;

TEST(Io, CurveRoundTrips) {
  const RevenueCurve c = curve_from_quad(QuadParams(0.2, 0.4, 2.0));
  EXPECT_EQ(curve_from_json(curve_to_json(c)), c);
  EXPECT_EQ(curve_from_json(json::parse(curve_to_json(c).dump())), c);
  EXPECT_EQ(curve_from_csv(curve_to_csv(c)), c);
  const RevenueCurve odd({{0.0, 0.0}, {0.1, 1.0 / 3.0}, {1.0, 0.1}});
  EXPECT_EQ(curve_from_csv(curve_to_csv(odd)), odd);
}

TEST(Io, CurveErrors) {
  EXPECT_THROW(curve_from_json(json::parse("{\"v\": []}")), std::invalid_argument);
  EXPECT_THROW(curve_from_json(json::parse("{\"vertices\": [[0, 0], [1]]}")), std::invalid_argument);
  EXPECT_THROW(curve_from_csv("x,y\n0,0\n"), std::invalid_argument);
  EXPECT_THROW(curve_from_csv("q,R\n0 0\n"), std::invalid_argument);
}

TEST(Io, MixtureSpecs) {
  const MarkupMixture m = parse_mixture("0.80564048:1,0.19435952:2.4469452");
  ASSERT_EQ(m.atoms().size(), 2u);
  EXPECT_EQ(m.atoms()[1].ratio, 2.4469452);
  EXPECT_EQ(parse_mixture(mixture_spec(m)), m);
  EXPECT_EQ(mixture_from_json(mixture_to_json(m)), m);
  EXPECT_EQ(parse_mixture("2.5"), MarkupMixture::single(2.5));
  EXPECT_EQ(parse_mixture("1:1"), MarkupMixture::second_price());
  EXPECT_THROW(parse_mixture(""), std::invalid_argument);
  EXPECT_THROW(parse_mixture("0.5:1,abc"), std::invalid_argument);
  EXPECT_THROW(parse_mixture("0.5:1,0.4:2"), std::invalid_argument);
  EXPECT_THROW(parse_mixture("x:2"), std::invalid_argument);
}

TEST(Io, DistributionSpecs) {
  EXPECT_EQ(parse_distribution("triangle:0.3").curve(), curve_from_triangle(TriangleParams(0.3)));
  EXPECT_EQ(parse_distribution("quad:0.2,0.4,2").curve(), curve_from_quad(QuadParams(0.2, 0.4, 2.0)));
  EXPECT_EQ(parse_distribution("pointmass:2").curve(), curve_from_point_mass(2.0));
  EXPECT_THROW(parse_distribution("triangle"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("normal:1"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("triangle:1.5"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("quad:0.2,0.4"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("curve:file.json"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("curve:@/nonexistent/file.json"), std::invalid_argument);
}

TEST(Io, CurveFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const RevenueCurve c = curve_from_triangle(TriangleParams(0.25));
  const auto jpath = dir / "scalerobust_test_curve.json";
  const auto cpath = dir / "scalerobust_test_curve.csv";
  std::ofstream(jpath) << curve_to_json(c).dump();
  std::ofstream(cpath) << curve_to_csv(c);
  EXPECT_EQ(parse_distribution("curve:@" + jpath.string()).curve(), c);
  EXPECT_EQ(parse_distribution("curve:@" + cpath.string()).curve(), c);
  std::ofstream(jpath) << "{not json";
  EXPECT_THROW(load_curve_file(jpath.string()), std::invalid_argument);
  std::filesystem::remove(jpath);
  std::filesystem::remove(cpath);
}

TEST(Io, ReportShapes) {
  EXPECT_EQ(to_json(ExtendedReal::infinity()), json("inf"));
  EXPECT_EQ(to_json(ExtendedReal::finite(2.0)), json(2.0));
  const json row = to_json(closed_form_row(PricingRule::regret_optimal, 10.0));
  EXPECT_EQ(row["max_approximation"], "inf");
  const json o = to_json(run_markup(2.0, 3.0, 7.0, 0.0));
  EXPECT_EQ(o["revenue"], 6.0);
  McEstimate e;
  e.mean = 1.0;
  e.n = 1000;
  EXPECT_EQ(to_json(e)["n"], 1000);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
