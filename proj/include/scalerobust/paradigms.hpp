#pragma once

// Single-buyer randomized pricing on values in [1, H] under three robustness
// objectives: max-min revenue, worst-case ratio, and worst-case regret.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace scalerobust {

/// A real number or +infinity, kept apart from any large float.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal finite(double v) { return {v, false}; }
  static ExtendedReal infinity() { return {0.0, true}; }

  bool operator<(const ExtendedReal& o) const {
    if (infinite) return false;
    return o.infinite || value < o.value;
  }
  std::string str() const;
};

inline std::string ExtendedReal::str() const {
  if (infinite) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

enum class PricingRule { max_min, ratio_optimal, regret_optimal };

inline std::string to_string(PricingRule k) {
  switch (k) {
    case PricingRule::max_min: return "max-min optimal";
    case PricingRule::ratio_optimal: return "ratio optimal";
    case PricingRule::regret_optimal: return "regret optimal";
  }
  return "?";
}

/// Posted-price distribution G on [1, H]: point masses plus a density.
class PriceDistribution {
 public:
  PriceDistribution(PricingRule kind, double h) : kind_(kind), h_(h) {
    if (!(h > 1.0) || !std::isfinite(h)) throw std::invalid_argument("paradigms: H must exceed 1");
    if (kind == PricingRule::regret_optimal && h < std::numbers::e) {
      throw std::invalid_argument("paradigms: the regret-optimal price law needs H >= e");
    }
  }

  PricingRule kind() const { return kind_; }
  double H() const { return h_; }

  double cdf(double p) const {
    if (p < 1.0) return 0.0;
    if (p >= h_) return 1.0;
    switch (kind_) {
      case PricingRule::max_min: return 1.0;
      case PricingRule::ratio_optimal: return (1.0 + std::log(p)) / (1.0 + std::log(h_));
      case PricingRule::regret_optimal: return p < h_ / std::numbers::e ? 0.0 : 1.0 + std::log(p / h_);
    }
    return 0.0;
  }

  struct Atom {
    double price, mass;
  };

  std::vector<Atom> atoms() const {
    switch (kind_) {
      case PricingRule::max_min: return {{1.0, 1.0}};
      case PricingRule::ratio_optimal: return {{1.0, 1.0 / (1.0 + std::log(h_))}};
      case PricingRule::regret_optimal: return {};
    }
    return {};
  }

  /// Continuous part of G on [lo, hi].
  double density(double p) const {
    if (p < density_lo() || p > h_) return 0.0;
    switch (kind_) {
      case PricingRule::max_min: return 0.0;
      case PricingRule::ratio_optimal: return 1.0 / (p * (1.0 + std::log(h_)));
      case PricingRule::regret_optimal: return 1.0 / p;
    }
    return 0.0;
  }

  double density_lo() const { return kind_ == PricingRule::regret_optimal ? h_ / std::numbers::e : 1.0; }

  /// Expected revenue from a buyer with value v: int p 1{p <= v} dG(p).
  double revenue(double v) const {
    double total = 0.0;
    for (const Atom& a : atoms()) {
      if (a.price <= v) total += a.price * a.mass;
    }
    const double lo = density_lo();
    const double hi = std::min(v, h_);
    if (kind_ != PricingRule::max_min && hi > lo) {
      auto f = [this](double p) { return p * density(p); };
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-14);
    }
    return total;
  }

 private:
  PricingRule kind_;
  double h_;
};

struct ParadigmRow {
  PricingRule kind{};
  double min_revenue = 0.0;
  ExtendedReal max_approximation;
  double max_regret = 0.0;
};

/// Table entries as closed forms.
inline ParadigmRow closed_form_row(PricingRule kind, double h) {
  const double ln = std::log(h);
  switch (kind) {
    case PricingRule::max_min: return {kind, 1.0, ExtendedReal::finite(h), h - 1.0};
    case PricingRule::ratio_optimal:
      return {kind, 1.0 / (1.0 + ln), ExtendedReal::finite(1.0 + ln), h - h / (1.0 + ln)};
    case PricingRule::regret_optimal: return {kind, 0.0, ExtendedReal::infinity(), h / std::numbers::e};
  }
  return {};
}

/// Buyer values at which worst cases are searched: a dense log grid on [1, H]
/// plus the endpoints and the lower edge of the price support.
inline std::vector<double> value_grid(const PriceDistribution& g, std::size_t n = 20001) {
  std::vector<double> v;
  v.reserve(n + 3);
  const double lh = std::log(g.H());
  for (std::size_t i = 0; i < n; ++i) v.push_back(std::exp(lh * static_cast<double>(i) / static_cast<double>(n - 1)));
  v.push_back(g.density_lo());
  v.push_back(1.0);
  v.push_back(g.H());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// Worst cases over point-mass buyers on the value grid.
inline ParadigmRow evaluate_row(const PriceDistribution& g, std::span<const double> values) {
  ParadigmRow row;
  row.kind = g.kind();
  row.min_revenue = std::numeric_limits<double>::infinity();
  row.max_approximation = ExtendedReal::finite(1.0);
  for (double v : values) {
    const double rev = g.revenue(v);
    row.min_revenue = std::min(row.min_revenue, rev);
    row.max_regret = std::max(row.max_regret, v - rev);
    const ExtendedReal apx = rev > 0.0 ? ExtendedReal::finite(v / rev) : ExtendedReal::infinity();
    if (row.max_approximation < apx) row.max_approximation = apx;
  }
  return row;
}

inline ParadigmRow evaluate_row(PricingRule kind, double h) {
  const PriceDistribution g(kind, h);
  const std::vector<double> grid = value_grid(g);
  return evaluate_row(g, grid);
}

inline std::array<ParadigmRow, 3> paradigm_table(double h) {
  if (!(h >= std::numbers::e)) throw std::invalid_argument("paradigm_table: H must be at least e");
  return {evaluate_row(PricingRule::max_min, h), evaluate_row(PricingRule::ratio_optimal, h),
          evaluate_row(PricingRule::regret_optimal, h)};
}

}  // namespace scalerobust
