#pragma once

// Compact invariant suite behind `scalerobust check`. Each check compares two
// independent evaluation paths or a stated inequality on a seeded random domain.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "scalerobust/io.hpp"
#include "scalerobust/scalerobust.hpp"

namespace scalerobust::cli {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

inline std::vector<CheckResult> run_property_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto record = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double r = 1.0 + 15.0 * unit(rng) + 1e-9;
      const double q = 0.01 + 0.98 * unit(rng);
      const double closed = markup_revenue_triangle(r, q);
      const double quad = markup_revenue_curve(r, curve_from_triangle(TriangleParams(q)));
      worst = std::max(worst, std::abs(closed - quad));
    }
    record("closed form vs quadrature on triangles", worst <= 1e-6, "max |diff| = " + format_double(worst));
  }
  {
    const auto s = solve_equilibrium();
    record("equilibrium conditions", s.validated,
           "equalizer gap " + format_double(s.checks.equalizer_gap) + ", fixed point gap " +
               format_double(s.checks.fixed_point_gap));
  }
  {
    int bad = 0;
    for (int i = 0; i < 2000; ++i) {
      const double q = 0.001 + 0.99 * unit(rng);
      const double r2 = 1.0 + 10.0 * unit(rng) + 1e-6;
      const double r1 = 1.0 + (r2 - 1.0) * unit(rng) + 1e-9;
      if (markup_revenue_triangle(r1, q) < bound_ratio_shift(r1, r2, markup_revenue_triangle(r2, q)) - 1e-12) ++bad;
      const double q2 = q + (0.999 - q) * unit(rng);
      const auto b = bound_quantile_shift(q, q2, markup_revenue_triangle(r2, q2));
      const double m = markup_revenue_triangle(r2, q);
      if (m < b.lower - 1e-12 || m < markup_revenue_triangle(r2, q2) - 1e-12) ++bad;
    }
    record("ratio shift, quantile-shift lower side, decrease in q", bad == 0, std::to_string(bad) + " violations");
  }
  {
    double worst = 1e9;
    for (int i = 0; i <= 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        for (int k = 0; k <= 10; ++k) {
          worst = std::min(worst, second_derivative_inv_apx(0.8 + 0.001 * i, 2.445 + 0.0004 * j, 0.093 + 0.0001 * k));
        }
      }
    }
    record("second derivative of 1/APX on the claim box", worst > 0.7, "min = " + format_double(worst));
  }
  {
    std::vector<double> grid;
    for (int i = 0; i < 30; ++i) grid.push_back(0.1 * std::exp(0.17 * i));
    grid.push_back(0.0);
    const auto v = check_dsic(MarkupMixture::two_point(0.80564048, 2.4469452), grid);
    record("DSIC of the optimal mixture", v.empty(), std::to_string(v.size()) + " violations");
  }
  {
    int bad = 0;
    const MarkupMixture m = MarkupMixture::two_point(0.80564048, 2.4469452);
    for (int i = 0; i < 20000; ++i) {
      const double v1 = 10.0 * unit(rng), v2 = 10.0 * unit(rng), k = std::exp(8.0 * unit(rng) - 4.0);
      const Outcome o = m(v1, v2);
      if (!feasible_and_ir(o, v1, v2)) ++bad;
      if (!check_scale_invariance(m, v1, v2, k).invariant(1e-12)) ++bad;
      const Outcome s = m(v2, v1).swapped();
      if (s.alloc != o.alloc || s.pay != o.pay) ++bad;
    }
    record("feasibility, IR, symmetry, homogeneity", bad == 0, std::to_string(bad) + " failures");
  }
  {
    bool ok = true;
    for (double h : {std::numbers::e, 10.0, 100.0}) {
      const auto table = paradigm_table(h);
      for (const ParadigmRow& row : table) {
        const ParadigmRow ref = closed_form_row(row.kind, h);
        ok = ok && std::abs(row.min_revenue - ref.min_revenue) <= 1e-6 &&
             std::abs(row.max_regret - ref.max_regret) <= 1e-6 &&
             row.max_approximation.infinite == ref.max_approximation.infinite &&
             (ref.max_approximation.infinite ||
              std::abs(row.max_approximation.value - ref.max_approximation.value) <= 1e-6);
      }
    }
    record("robust pricing table", ok, "H in {e, 10, 100}");
  }
  {
    bool ok = true;
    for (double l : {1.0, 5.0, 10.0}) {
      const ScaledAverage avg(ReserveSecondPrice{1.0}, l);
      for (int i = 0; i < 20; ++i) {
        const double v1 = 2.0 * unit(rng), v2 = 2.0 * unit(rng), s = std::exp(std::log(8.0) * (2.0 * unit(rng) - 1.0));
        ok = ok && invariance_defect(avg, v1, v2, s).within(1e-8);
      }
    }
    record("scale-averaging defect bounds", ok, "L in {1, 5, 10}");
  }
  {
    const RevenueCurve c = curve_from_quad(QuadParams(0.2, 0.4, 2.0));
    const MarkupMixture m = MarkupMixture::two_point(0.80564048, 2.4469452);
    const McEstimate e = mc_revenue(m, c, 1000000, seed);
    const double exact = mixture_revenue(m, c);
    record("Monte Carlo vs quadrature", std::abs(e.mean - exact) <= 4.0 * e.std_err,
           "z = " + format_double((e.mean - exact) / e.std_err));
  }
  return out;
}

}  // namespace scalerobust::cli
