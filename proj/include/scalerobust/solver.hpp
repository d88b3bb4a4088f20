#pragma once

// Equilibrium of the zero-sum game between the designer (choosing M_{alpha,r})
// and the adversary (choosing a triangle T_q): the crossing q* of APX_1 and
// APX_*, the adversary's best response q_r(alpha), and the mixing weight that
// makes q* a best response.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "scalerobust/analytic.hpp"

namespace scalerobust {

struct SolveTolerances {
  double validation = 1e-6;       // equilibrium conditions must hold to this
  double crossing_width = 1e-9;   // bisection bracket for q*
  double alpha_width = 1e-10;     // bisection bracket for alpha*
  double quantile_width = 1e-12;  // best-response polishing bracket
  double r_cap = 64.0;
  std::size_t sweep_points = 10000;
};

struct EquilibriumChecks {
  double equalizer_gap = 0.0;    // |M_1(T_q*) - M_r*(T_q*)|
  double fixed_point_gap = 0.0;  // |q_r*(alpha*) - q*|
  double sweep_max = 0.0;        // max_q APX(alpha*, r*, q) on the sweep grid
  double sweep_argmax = 0.0;
  double point_mass_apx = 0.0;   // APX at q = 1, i.e. 1 / alpha*
};

struct EquilibriumSolution {
  Quantile q_star = 0.0;
  double r_star = 0.0;
  double alpha_star = 0.0;
  double beta = 0.0;
  SolveTolerances tolerances;
  EquilibriumChecks checks;
  bool validated = false;
};

/// Bisection on [lo, hi] for a sign change of g; stops on bracket width.
inline double bisect(const std::function<double(double)>& g, double lo, double hi, double width,
                     const char* what) {
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) {
    throw std::runtime_error(std::string(what) + ": no sign change on the bracket");
  }
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// APX_1(q) - APX_*(q).
inline double crossing_gap(Quantile q, double r_cap = 64.0) {
  return opt_revenue_truncated(q) - apx_star(q, r_cap).ratio;
}

/// q* where the second-price and best-markup ratios cross, bracketed in [1e-4, 0.5].
inline Quantile find_crossing(double tol = 1e-9, double r_cap = 64.0) {
  if (!(tol >= 1e-9)) throw std::domain_error("find_crossing: tol must be at least 1e-9");
  return bisect([r_cap](double q) { return crossing_gap(q, r_cap); }, 1e-4, 0.5, tol, "find_crossing");
}

/// Adversary best response: argmax_q APX(alpha, r, q) over [0, 1). A 4096-point
/// scan, Brent refinement around the best point, then bisection on the sign
/// of d(1/APX)/dq. Returns 0 when the supremum sits at the boundary.
inline Quantile best_response_quantile(double alpha, double r, double tol = 1e-12) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("best_response_quantile: alpha outside (0,1]");
  if (!(r > 1.0)) throw std::domain_error("best_response_quantile: r must exceed 1");
  if (alpha == 1.0) return 0.0;
  constexpr int kGrid = 4096;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double v = apx_mixture_triangle(alpha, r, static_cast<double>(i) / kGrid);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0) return 0.0;
  double lo = static_cast<double>(best - 1) / kGrid;
  double hi = static_cast<double>(best + 1) / kGrid;
  auto neg = [&](double q) { return -apx_mixture_triangle(alpha, r, q); };
  std::uintmax_t iters = 200;
  const double q_brent = boost::math::tools::brent_find_minima(neg, lo, hi, 40, iters).first;
  const auto slope = [&](double q) { return inv_apx_dq(alpha, r, q); };
  if (!(slope(lo) < 0.0 && slope(hi) > 0.0)) return q_brent;
  return bisect(slope, lo, hi, tol, "best_response_quantile");
}

/// alpha in [0.8, 0.81] with q_{r*}(alpha) = q*.
inline double find_alpha(double r_star, Quantile q_star, double tol = 1e-10, double quantile_tol = 1e-12) {
  return bisect([&](double a) { return best_response_quantile(a, r_star, quantile_tol) - q_star; }, 0.8, 0.81,
                tol, "find_alpha");
}

/// Worst grid triangle for M_{alpha,r}: (argmax q, max APX) over q = i/n.
inline std::pair<Quantile, double> worst_case_sweep(double alpha, double r, std::size_t n) {
  Quantile arg = 0.0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = static_cast<double>(i) / static_cast<double>(n);
    const double v = apx_mixture_triangle(alpha, r, q);
    if (v > best) {
      best = v;
      arg = q;
    }
  }
  return {arg, best};
}

inline EquilibriumSolution solve_equilibrium(const SolveTolerances& tol = {}) {
  if (!(tol.validation > 0.0)) throw std::domain_error("solve: validation tolerance must be positive");
  EquilibriumSolution s;
  s.tolerances = tol;
  s.q_star = find_crossing(tol.crossing_width, tol.r_cap);
  s.r_star = apx_star(s.q_star, tol.r_cap).best_r;
  s.alpha_star = find_alpha(s.r_star, s.q_star, tol.alpha_width, tol.quantile_width);
  s.beta = apx_mixture_triangle(s.alpha_star, s.r_star, s.q_star);

  EquilibriumChecks& c = s.checks;
  c.equalizer_gap = std::abs(spa_revenue_triangle(s.q_star) - markup_revenue_triangle(s.r_star, s.q_star));
  c.fixed_point_gap = std::abs(best_response_quantile(s.alpha_star, s.r_star, tol.quantile_width) - s.q_star);
  std::tie(c.sweep_argmax, c.sweep_max) = worst_case_sweep(s.alpha_star, s.r_star, tol.sweep_points);
  c.point_mass_apx = apx_mixture_triangle(s.alpha_star, s.r_star, 1.0);
  s.validated = c.equalizer_gap <= tol.validation && c.fixed_point_gap <= tol.validation &&
                std::abs(c.sweep_max - s.beta) <= tol.validation && c.point_mass_apx < s.beta;
  return s;
}

}  // namespace scalerobust
