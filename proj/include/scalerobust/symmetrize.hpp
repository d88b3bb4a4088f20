#pragma once

// Log-uniform scale averaging: M_L runs the base mechanism on k*v with
// ln k uniform on [-L, L] and charges p(kv)/k. The result is exactly scale
// invariant in the limit L -> infinity; for finite L the defect is bounded by
// |ln s| / L.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scalerobust/analytic.hpp"
#include "scalerobust/mechanisms.hpp"
#include "scalerobust/quadrature.hpp"
#include "scalerobust/revcurve.hpp"

namespace scalerobust {

/// A rule that also reports the scales k where its outcome on (k v1, k v2) kinks.
template <class Rule>
concept ScalableRule = ExPostRule<Rule> && requires(const Rule& rule, Value a, Value b) {
  { rule.scale_kinks(a, b) } -> std::convertible_to<std::vector<double>>;
};

/// A rule with a two-agent expected revenue on any revenue curve.
template <class Rule>
concept RevenueRule = requires(const Rule& rule, const RevenueCurve& c) {
  { expected_revenue(rule, c) } -> std::convertible_to<double>;
};

inline double expected_revenue(const MarkupMixture& m, const RevenueCurve& c) { return mixture_revenue(m, c); }
inline double expected_revenue(const ReserveSecondPrice& m, const RevenueCurve& c) {
  return m.expected_revenue(c);
}

template <ScalableRule Rule>
class ScaledAverage {
 public:
  ScaledAverage(Rule base, double half_width, int nodes = 1024)
      : base_(std::move(base)), half_width_(half_width), nodes_(nodes) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
      throw std::invalid_argument("scaled average: L must be positive");
    }
    if (nodes < 64) throw std::invalid_argument("scaled average: need at least 64 quadrature nodes");
  }

  const Rule& base() const { return base_; }
  double half_width() const { return half_width_; }
  int nodes() const { return nodes_; }

  /// X_L(v) = E_k[x(kv)], P_L(v) = E_k[p(kv)/k].
  Outcome operator()(Value v1, Value v2) const {
    require_values(v1, v2);
    const double l = half_width_;
    std::vector<double> cuts;
    for (double k : base_.scale_kinks(v1, v2)) {
      if (k > 0.0) cuts.push_back(std::log(k));
    }
    const int panels = std::max(4, nodes_ / 16);
    const double w = 1.0 / (2.0 * l);
    Outcome out;
    for (int c = 0; c < 4; ++c) {
      auto f = [&](double t) {
        const double k = std::exp(t);
        const Outcome o = base_(k * v1, k * v2);
        return c < 2 ? o.alloc[c] : o.pay[c - 2] / k;
      };
      const double v = w * detail::integrate_composite(f, -l, l, panels, cuts);
      if (c < 2) {
        out.alloc[c] = v;
      } else {
        out.pay[c - 2] = v;
      }
    }
    return out;
  }

  /// Kinks of M_L itself in the scale of its input.
  std::vector<double> scale_kinks(Value v1, Value v2) const {
    std::vector<double> out;
    for (double k : base_.scale_kinks(v1, v2)) {
      out.push_back(k * std::exp(-half_width_));
      out.push_back(k * std::exp(half_width_));
    }
    return out;
  }

 private:
  Rule base_;
  double half_width_;
  int nodes_;
};

template <ScalableRule Rule>
Outcome averaged_outcome(const ScaledAverage<Rule>& s, Value v1, Value v2) {
  return s(v1, v2);
}

struct InvarianceDefect {
  double allocation = 0.0;   // max_i |X_L,i(sv) - X_L,i(v)|
  double payment = 0.0;      // max_i |P_L,i(sv) - s P_L,i(v)|
  double allocation_bound = 0.0;  // |ln s| / L
  double payment_bound = 0.0;     // s V_max |ln s| / L

  bool within(double tol) const {
    return allocation <= allocation_bound + tol && payment <= payment_bound + tol;
  }
};

template <ScalableRule Rule>
InvarianceDefect invariance_defect(const ScaledAverage<Rule>& s, Value v1, Value v2, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("invariance_defect: scale must be positive");
  const Outcome base = s(v1, v2);
  const Outcome scaled = s(scale * v1, scale * v2);
  InvarianceDefect d;
  for (int i = 0; i < 2; ++i) {
    d.allocation = std::max(d.allocation, std::abs(scaled.alloc[i] - base.alloc[i]));
    d.payment = std::max(d.payment, std::abs(scaled.pay[i] - scale * base.pay[i]));
  }
  const double log_s = std::abs(std::log(scale));
  d.allocation_bound = log_s / s.half_width();
  d.payment_bound = scale * std::max(v1, v2) * log_s / s.half_width();
  return d;
}

/// REV(M_L, F) = (1/2L) int_{-L}^{L} REV(M, F scaled by e^t) e^{-t} dt.
template <class Rule>
  requires ScalableRule<Rule> && RevenueRule<Rule>
double averaged_revenue(const ScaledAverage<Rule>& s, const RevenueCurve& c) {
  const double l = s.half_width();
  std::vector<double> cuts;
  // The scaled revenue kinks where a base kink crosses a curve vertex value.
  for (std::size_t j = 1; j < c.size(); ++j) {
    const double vj = c.vertex_value(j);
    if (vj <= 0.0) continue;
    for (double k : s.base().scale_kinks(vj, vj)) {
      if (k > 0.0) cuts.push_back(std::log(k));
    }
  }
  auto f = [&](double t) {
    const double k = std::exp(t);
    return expected_revenue(s.base(), c.scaled(k)) / k;
  };
  return detail::integrate_piecewise(f, -l, l, std::move(cuts), 1e-12) / (2.0 * l);
}

struct PreservationVerdict {
  double averaged_revenue = 0.0;
  double optimal_revenue = 0.0;
  double beta_base = 0.0;
  double required = 0.0;  // OPT / beta_base
  bool holds = false;
};

/// Checks REV(M_L, F) >= OPT(F) / beta_base - tol. An infinite beta_base holds trivially.
template <class Rule>
  requires ScalableRule<Rule> && RevenueRule<Rule>
PreservationVerdict revenue_preservation(const ScaledAverage<Rule>& s, const RevenueCurve& c, double beta_base,
                                         double tol = 1e-6) {
  PreservationVerdict v;
  v.averaged_revenue = averaged_revenue(s, c);
  v.optimal_revenue = opt_revenue(c);
  v.beta_base = beta_base;
  v.required = std::isinf(beta_base) ? 0.0 : v.optimal_revenue / beta_base;
  v.holds = v.averaged_revenue >= v.required - tol;
  return v;
}

/// sup over k in [e^-L, e^L] of OPT(kF)/REV(M, kF) for the base rule on c, by a
/// dense scan in t = ln k. Returns +inf if the base earns nothing at some scale.
template <class Rule>
  requires RevenueRule<Rule>
double scaled_family_ratio(const Rule& base, const RevenueCurve& c, double half_width, int points = 20001) {
  double worst = 1.0;
  for (int i = 0; i < points; ++i) {
    const double t = -half_width + 2.0 * half_width * i / (points - 1);
    const RevenueCurve ck = c.scaled(std::exp(t));
    const double rev = expected_revenue(base, ck);
    if (!(rev > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, opt_revenue(ck) / rev);
  }
  return worst;
}

}  // namespace scalerobust
