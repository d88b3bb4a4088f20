#pragma once

// Closed-form revenues and approximation ratios on the triangle family, the
// quadrature evaluator for arbitrary revenue curves, and the continuity
// bounds used by the certificates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "scalerobust/mechanisms.hpp"
#include "scalerobust/quadrature.hpp"
#include "scalerobust/revcurve.hpp"

namespace scalerobust {

/// Two-agent optimal revenue on a truncated triangle: 2 - q_bar.
inline double opt_revenue_truncated(Quantile q_bar) {
  if (!(q_bar >= 0.0 && q_bar <= 1.0)) throw std::domain_error("opt_revenue_truncated: q outside [0,1]");
  return 2.0 - q_bar;
}

/// Two-agent optimal revenue: twice the area under the monotone concave hull.
inline double opt_revenue(const RevenueCurve& c) { return 2.0 * area_under(concave_monotone_hull(c)); }

/// Second-price revenue on any normalized triangle.
inline double spa_revenue_triangle(Quantile q_bar) {
  if (!(q_bar >= 0.0 && q_bar <= 1.0)) throw std::domain_error("spa_revenue_triangle: q outside [0,1]");
  return 1.0;
}

namespace detail {

// 1 - log1p(x)/x, accurate for small x.
inline double one_minus_log1p_ratio(double x) {
  if (std::abs(x) < 1e-4) return x * (0.5 - x * (1.0 / 3.0 - x * (0.25 - x * 0.2)));
  return 1.0 - std::log1p(x) / x;
}

}  // namespace detail

/// Revenue of the r-markup mechanism (r > 1) on T_{q_bar}.
inline double markup_revenue_triangle(double r, Quantile q_bar) {
  if (!(r > 1.0)) throw std::domain_error("markup_revenue_triangle: r must exceed 1 (use spa_revenue_triangle)");
  if (!(q_bar >= 0.0 && q_bar <= 1.0)) throw std::domain_error("markup_revenue_triangle: q outside [0,1]");
  if (q_bar == 1.0) return 0.0;
  const double d = 1.0 - q_bar + q_bar * r;
  const double x = (r - 1.0) * (1.0 - q_bar) / d;
  return 2.0 * r / ((r - 1.0) * d) * detail::one_minus_log1p_ratio(x);
}

/// d M_r(T_q) / dq.
inline double markup_revenue_triangle_dq(double r, Quantile q) {
  const double d = 1.0 - q + q * r;
  const double l = std::log(r / d);
  return 2.0 * r / (r - 1.0) *
         (-(r - 1.0) / (d * d) + 1.0 / (d * (1.0 - q)) - l / ((r - 1.0) * (1.0 - q) * (1.0 - q)));
}

/// Markup revenue for any ratio r >= 1 on T_{q_bar}; r = 1 dispatches to the SPA.
inline double markup_revenue_triangle_any(double r, Quantile q_bar) {
  return r == 1.0 ? spa_revenue_triangle(q_bar) : markup_revenue_triangle(r, q_bar);
}

inline double spa_revenue_quad(const QuadParams& p) {
  return p.q_bar_prime + (1.0 - p.q_bar) * p.q_bar_prime / (p.ratio * p.q_bar);
}

/// Markup revenue on an arbitrary revenue curve, 2 * int_0^1 P(r V(q)) dq.
inline double markup_revenue_curve(double r, const RevenueCurve& c) {
  if (!(r >= 1.0)) throw std::domain_error("markup_revenue_curve: r must be at least 1");
  if (r == 1.0) return 2.0 * area_under(c);
  // Below the top atom the offered price r * top is never accepted.
  const double start = c.top_mass();
  if (start >= 1.0) return 0.0;
  std::vector<double> cuts;
  for (const Vertex& v : c.vertices()) cuts.push_back(v.q);
  for (std::size_t j = 1; j < c.size(); ++j) cuts.push_back(c.quantile(c.vertex_value(j) / r));
  auto integrand = [&](double q) { return c.posting_revenue(r * c.price(q)); };
  return 2.0 * detail::integrate_piecewise(integrand, start, 1.0, std::move(cuts));
}

inline double mixture_revenue(const MarkupMixture& m, const RevenueCurve& c) {
  double total = 0.0;
  for (const MarkupAtom& a : m.atoms()) total += a.weight * markup_revenue_curve(a.ratio, c);
  return total;
}

inline double mixture_revenue_triangle(const MarkupMixture& m, Quantile q_bar) {
  double total = 0.0;
  for (const MarkupAtom& a : m.atoms()) total += a.weight * markup_revenue_triangle_any(a.ratio, q_bar);
  return total;
}

/// Approximation ratio of M_{alpha,r} against T_{q_bar}.
inline double apx_mixture_triangle(double alpha, double r, Quantile q_bar) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("apx_mixture_triangle: alpha outside [0,1]");
  const double rev = alpha == 1.0 ? 1.0 : alpha + (1.0 - alpha) * markup_revenue_triangle(r, q_bar);
  if (!(rev > 0.0)) throw std::domain_error("apx_mixture_triangle: zero revenue");
  return opt_revenue_truncated(q_bar) / rev;
}

/// d/dq of 1/APX(alpha, r, q).
inline double inv_apx_dq(double alpha, double r, Quantile q) {
  const double m = markup_revenue_triangle(r, q);
  const double dm = markup_revenue_triangle_dq(r, q);
  return ((1.0 - alpha) * dm * (2.0 - q) + alpha + (1.0 - alpha) * m) / ((2.0 - q) * (2.0 - q));
}

/// d^2/dq^2 of 1/APX(alpha, r, q).
inline double second_derivative_inv_apx(double alpha, double r, Quantile q) {
  const double d = 1.0 - q + q * r;
  const double l = std::log(r / d);
  const double rm = r - 1.0, qm = 1.0 - q, b = 2.0 - q, a = 1.0 - alpha;
  const double t1 = 4.0 * a * r * (-rm / (d * d) + 1.0 / (qm * d) - l / (rm * qm * qm)) / (rm * b * b);
  const double t2 = 2.0 * a * r *
                    (2.0 * rm * rm / (d * d * d) - rm / (qm * d * d) + 2.0 / (qm * qm * d) -
                     2.0 * l / (rm * qm * qm * qm)) /
                    (rm * b);
  const double t3 = (4.0 * a * r * (1.0 / d - l / (rm * qm)) + 2.0 * alpha * rm) / (rm * b * b * b);
  return t1 + t2 + t3;
}

struct ApxStar {
  double ratio;    // (2 - q) / max_r M_r(T_q)
  double best_r;   // maximizing markup ratio
  double revenue;  // max_r M_r(T_q)
};

/// sup over r in (1, r_cap] of M_r(T_q): log-spaced scan, then Brent refinement
/// around the best grid point.
inline ApxStar apx_star(Quantile q_bar, double r_cap = 64.0) {
  if (!(q_bar > 0.0 && q_bar < 1.0)) throw std::domain_error("apx_star: q must lie in (0,1)");
  if (!(r_cap >= 2.0)) throw std::domain_error("apx_star: r_cap must be at least 2");
  constexpr int kGrid = 256;
  const double lo = std::log(1e-6), hi = std::log(r_cap - 1.0);
  std::vector<double> rs(kGrid);
  int best = 0;
  double best_rev = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    rs[i] = i == kGrid - 1 ? r_cap : 1.0 + std::exp(lo + (hi - lo) * i / (kGrid - 1));
    const double rev = markup_revenue_triangle(rs[i], q_bar);
    if (rev > best_rev) {
      best_rev = rev;
      best = i;
    }
  }
  const double a = rs[std::max(best - 1, 0)];
  const double b = rs[std::min(best + 1, kGrid - 1)];
  auto neg = [q_bar](double r) { return -markup_revenue_triangle(r, q_bar); };
  std::uintmax_t iters = 200;
  auto [r, v] = boost::math::tools::brent_find_minima(neg, a, b, 40, iters);
  if (-v < best_rev) {
    r = rs[best];
    v = -best_rev;
  }
  return {opt_revenue_truncated(q_bar) / -v, r, -v};
}

/// Claim: M_{r1} >= (r1/r2) M_{r2} for 1 <= r1 <= r2.
inline double bound_ratio_shift(double r1, double r2, double rev_at_r2) {
  if (!(r1 >= 1.0 && r1 <= r2)) throw std::domain_error("bound_ratio_shift: need 1 <= r1 <= r2");
  return r1 / r2 * rev_at_r2;
}

struct RevenueBracket {
  double lower;
  double upper;
};

/// For q1 <= q2, ((1-q2)/(1-q1)) M(T_q2) <= M(T_q1). The upper value 2(q2-q1) + M(T_q2)
/// is returned as published but is not a valid bound in general; certificates use only the lower side.
inline RevenueBracket bound_quantile_shift(Quantile q1, Quantile q2, double rev_at_q2) {
  if (!(q1 >= 0.0 && q1 <= q2 && q2 <= 1.0)) throw std::domain_error("bound_quantile_shift: need 0 <= q1 <= q2 <= 1");
  if (q1 == q2) return {rev_at_q2, rev_at_q2};
  return {(1.0 - q2) / (1.0 - q1) * rev_at_q2, 2.0 * (q2 - q1) + rev_at_q2};
}

}  // namespace scalerobust
