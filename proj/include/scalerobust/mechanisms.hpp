#pragma once

// Ex-post mechanisms for two agents: markup auctions, their mixtures, and a
// couple of non-invariant / non-truthful rules kept around as negative
// controls for the checkers.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scalerobust/revcurve.hpp"

namespace scalerobust {

struct Outcome {
  std::array<double, 2> alloc{0.0, 0.0};
  std::array<double, 2> pay{0.0, 0.0};

  double revenue() const { return pay[0] + pay[1]; }
  Outcome swapped() const { return {{alloc[1], alloc[0]}, {pay[1], pay[0]}}; }

  Outcome& operator+=(const Outcome& o) {
    for (int i = 0; i < 2; ++i) {
      alloc[i] += o.alloc[i];
      pay[i] += o.pay[i];
    }
    return *this;
  }
  Outcome operator*(double w) const {
    return {{alloc[0] * w, alloc[1] * w}, {pay[0] * w, pay[1] * w}};
  }
};

/// Anything that maps a reported value profile to an (expected) outcome.
template <class Rule>
concept ExPostRule = requires(const Rule& rule, Value a, Value b) {
  { rule(a, b) } -> std::convertible_to<Outcome>;
};

inline void require_values(Value v1, Value v2) {
  if (!(v1 >= 0.0 && v2 >= 0.0) || !std::isfinite(v1) || !std::isfinite(v2)) {
    throw std::domain_error("mechanism: values must be finite and non-negative");
  }
}

/// r-markup auction for one realisation of the tie coin.
inline Outcome run_markup(double r, Value v1, Value v2, double tie_coin) {
  if (!(r >= 1.0)) throw std::domain_error("run_markup: ratio must be at least 1");
  require_values(v1, v2);
  int winner;
  if (v1 != v2) {
    winner = v1 > v2 ? 0 : 1;
  } else {
    winner = tie_coin < 0.5 ? 0 : 1;
  }
  const double high = winner == 0 ? v1 : v2;
  const double low = winner == 0 ? v2 : v1;
  const double price = r * low;
  Outcome out;
  if (high >= price) {
    out.alloc[winner] = 1.0;
    out.pay[winner] = price;
  }
  return out;
}

/// Markup auction with ties resolved in expectation.
inline Outcome run_markup_expected(double r, Value v1, Value v2) {
  if (v1 != v2) return run_markup(r, v1, v2, 0.0);
  Outcome out = run_markup(r, v1, v2, 0.0) * 0.5;
  out += run_markup(r, v1, v2, 1.0) * 0.5;
  return out;
}

struct MarkupAtom {
  double weight;
  double ratio;

  friend bool operator==(const MarkupAtom&, const MarkupAtom&) = default;
};

/// Distribution over markup ratios; M_{alpha,r} is the two-atom case {(alpha,1),(1-alpha,r)}.
class MarkupMixture {
 public:
  explicit MarkupMixture(std::vector<MarkupAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("mixture: needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const MarkupAtom& a = atoms_[i];
      if (!(a.weight > 0.0 && a.weight <= 1.0)) {
        throw std::invalid_argument("mixture: weights must lie in (0,1]");
      }
      if (!(a.ratio >= 1.0) || !std::isfinite(a.ratio)) {
        throw std::invalid_argument("mixture: ratios must be finite and >= 1");
      }
      if (i > 0 && !(a.ratio > atoms_[i - 1].ratio)) {
        throw std::invalid_argument("mixture: ratios must be strictly increasing");
      }
      total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("mixture: weights must sum to 1 (got " + std::to_string(total) + ")");
    }
  }

  static MarkupMixture second_price() { return MarkupMixture({{1.0, 1.0}}); }
  static MarkupMixture single(double r) { return MarkupMixture({{1.0, r}}); }
  /// M_{alpha,r}: second price with probability alpha, r-markup otherwise.
  static MarkupMixture two_point(double alpha, double r) {
    if (alpha >= 1.0) return second_price();
    if (alpha <= 0.0) return single(r);
    return MarkupMixture({{alpha, 1.0}, {1.0 - alpha, r}});
  }

  std::span<const MarkupAtom> atoms() const { return atoms_; }

  Outcome operator()(Value v1, Value v2) const {
    Outcome out;
    for (const MarkupAtom& a : atoms_) out += run_markup_expected(a.ratio, v1, v2) * a.weight;
    return out;
  }

  /// Markup mechanisms depend on values only through their ratio.
  std::vector<double> scale_kinks(Value, Value) const { return {}; }

  friend bool operator==(const MarkupMixture&, const MarkupMixture&) = default;

 private:
  std::vector<MarkupAtom> atoms_;
};

inline Outcome run_mixture(const MarkupMixture& m, Value v1, Value v2) { return m(v1, v2); }

/// Second-price auction with a fixed reserve. Not scale invariant.
struct ReserveSecondPrice {
  double reserve = 1.0;

  Outcome operator()(Value v1, Value v2) const {
    require_values(v1, v2);
    const double high = std::max(v1, v2);
    const double low = std::min(v1, v2);
    Outcome out;
    if (high < reserve) return out;
    const double price = std::max(low, reserve);
    if (v1 == v2) {
      out.alloc = {0.5, 0.5};
      out.pay = {0.5 * price, 0.5 * price};
    } else {
      const int w = v1 > v2 ? 0 : 1;
      out.alloc[w] = 1.0;
      out.pay[w] = price;
    }
    return out;
  }

  /// Scales k at which the outcome on (k v1, k v2) changes form.
  std::vector<double> scale_kinks(Value v1, Value v2) const {
    std::vector<double> k;
    if (v1 > 0.0) k.push_back(reserve / v1);
    if (v2 > 0.0) k.push_back(reserve / v2);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
  }

  /// Two-agent expected revenue on i.i.d. values from c:
  /// reserve * Pr[exactly one value >= reserve] + E[v_(2); v_(2) >= reserve].
  double expected_revenue(const RevenueCurve& c) const {
    const double q = c.quantile(reserve);
    // E[v_(2) 1{v_(2) >= reserve}] = 2 * int_0^q R(m) dm (lower quantile has density 2m).
    double integral = 0.0;
    const auto v = c.vertices();
    for (std::size_t i = 1; i < v.size() && v[i - 1].q < q; ++i) {
      const double b = std::min(v[i].q, q);
      integral += 0.5 * (v[i - 1].revenue + c.value(b)) * (b - v[i - 1].q);
    }
    return reserve * 2.0 * q * (1.0 - q) + 2.0 * integral;
  }
};

/// First-price auction: winner pays their own bid. Not truthful.
struct FirstPrice {
  Outcome operator()(Value v1, Value v2) const {
    require_values(v1, v2);
    Outcome out;
    if (v1 == v2) {
      out.alloc = {0.5, 0.5};
      out.pay = {0.5 * v1, 0.5 * v2};
    } else {
      const int w = v1 > v2 ? 0 : 1;
      out.alloc[w] = 1.0;
      out.pay[w] = std::max(v1, v2);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

struct DsicViolation {
  int agent;
  Value v1;
  Value v2;
  Value report;
  double gain;
};

/// Exhaustive misreport search on grid^2 x grid. Empty result iff DSIC on the grid.
template <ExPostRule Rule>
std::vector<DsicViolation> check_dsic(const Rule& rule, std::span<const Value> grid,
                                      double tol = 1e-9) {
  std::vector<DsicViolation> out;
  for (Value v1 : grid) {
    for (Value v2 : grid) {
      const Outcome truth = rule(v1, v2);
      const double u1 = v1 * truth.alloc[0] - truth.pay[0];
      const double u2 = v2 * truth.alloc[1] - truth.pay[1];
      for (Value z : grid) {
        const Outcome d1 = rule(z, v2);
        const double g1 = v1 * d1.alloc[0] - d1.pay[0] - u1;
        if (g1 > tol) out.push_back({0, v1, v2, z, g1});
        const Outcome d2 = rule(v1, z);
        const double g2 = v2 * d2.alloc[1] - d2.pay[1] - u2;
        if (g2 > tol) out.push_back({1, v1, v2, z, g2});
      }
    }
  }
  return out;
}

/// Feasibility and ex-post IR of a single outcome.
inline bool feasible_and_ir(const Outcome& o, Value v1, Value v2, double tol = 1e-12) {
  const std::array<double, 2> v{v1, v2};
  if (o.alloc[0] + o.alloc[1] > 1.0 + tol) return false;
  for (int i = 0; i < 2; ++i) {
    if (o.alloc[i] < -tol || o.alloc[i] > 1.0 + tol) return false;
    if (o.pay[i] < -tol) return false;
    if (o.pay[i] > v[i] * o.alloc[i] + tol * std::max(1.0, v[i])) return false;
    if (o.alloc[i] == 0.0 && o.pay[i] != 0.0) return false;
  }
  return true;
}

struct ScaleDefect {
  double allocation = 0.0;        // max_i |x_i(kv) - x_i(v)|
  double revenue_relative = 0.0;  // |rev(kv) - k rev(v)| / max(1, k rev(v))

  bool invariant(double tol = 1e-12) const { return allocation <= tol && revenue_relative <= tol; }
};

template <ExPostRule Rule>
ScaleDefect check_scale_invariance(const Rule& rule, Value v1, Value v2, double k) {
  if (!(k > 0.0)) throw std::domain_error("check_scale_invariance: k must be positive");
  const Outcome base = rule(v1, v2);
  const Outcome scaled = rule(k * v1, k * v2);
  ScaleDefect d;
  for (int i = 0; i < 2; ++i) {
    d.allocation = std::max(d.allocation, std::abs(scaled.alloc[i] - base.alloc[i]));
  }
  const double expected = k * base.revenue();
  d.revenue_relative = std::abs(scaled.revenue() - expected) / std::max(1.0, std::abs(expected));
  return d;
}

}  // namespace scalerobust
