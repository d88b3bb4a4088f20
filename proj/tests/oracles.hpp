#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the RevenueCurve vertex list, so agreement between the
// two is meaningful.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "scalerobust/revcurve.hpp"

namespace oracle {

// High-precision equilibrium, computed offline with 30-digit arithmetic.
inline constexpr double kQStar = 0.09310569563591734;
inline constexpr double kRStar = 2.446945382066;
inline constexpr double kAlphaStar = 0.80564049819906;
inline constexpr double kBeta = 1.906894304364;

/// Markup revenue on a triangle, transcribed term by term.
inline double markup_triangle_printed(double r, double q) {
  const double d = 1.0 - q + q * r;
  return (2.0 * r / ((1.0 - q) * (r - 1.0))) * ((1.0 - q) / d + std::log(r / d) / (1.0 - r));
}

inline double apx_printed(double alpha, double r, double q) {
  return (2.0 - q) / (alpha + (1.0 - alpha) * markup_triangle_printed(r, q));
}

/// Piecewise-linear evaluation straight from the vertex list.
inline double revenue_at(const std::vector<std::pair<double, double>>& v, double q) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (q <= v[i].first) {
      const double t = (q - v[i - 1].first) / (v[i].first - v[i - 1].first);
      return v[i - 1].second + t * (v[i].second - v[i - 1].second);
    }
  }
  return v.back().second;
}

inline std::vector<std::pair<double, double>> vertices_of(const scalerobust::RevenueCurve& c) {
  std::vector<std::pair<double, double>> v;
  for (const auto& p : c.vertices()) v.emplace_back(p.q, p.revenue);
  return v;
}

/// V(q) = R(q)/q. On the first segment R is linear through the origin, so V is
/// the constant top value; computing it directly avoids rounding wobble there.
inline double value_at(const std::vector<std::pair<double, double>>& v, double q) {
  if (q <= v[1].first) return v[1].second / v[1].first;
  return revenue_at(v, q) / q;
}

/// Pr[value >= x] by bisection on the non-increasing value function.
inline double quantile_at(const std::vector<std::pair<double, double>>& v, double x) {
  if (x <= value_at(v, 1.0)) return 1.0;
  if (x > v[1].second / v[1].first) return 0.0;
  double lo = 1e-300, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(v, mid) >= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Composite 3-point Gauss-Legendre. Only interior points are evaluated, so a
/// jump at a panel end never leaks into the sum.
inline double gauss3(const std::function<double(double)>& f, double a, double b, int panels) {
  const double x = std::sqrt(0.6);
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h;
    s += (5.0 * f(mid - 0.5 * h * x) + 8.0 * f(mid) + 5.0 * f(mid + 0.5 * h * x)) / 18.0;
  }
  return s * h;
}

/// 2 * int_0^1 r V(m) * Pr[other >= r V(m)] dm, with the pieces located by
/// bisection and integrated panel by panel.
inline double markup_revenue_reference(double r, const scalerobust::RevenueCurve& c, int per_piece = 400) {
  const auto v = vertices_of(c);
  if (r == 1.0) {
    double area = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      area += 0.5 * (v[i].second + v[i - 1].second) * (v[i].first - v[i - 1].first);
    }
    return 2.0 * area;
  }
  std::vector<double> cuts{v[1].first, 1.0};
  for (const auto& p : v) cuts.push_back(p.first);
  for (std::size_t j = 1; j < v.size(); ++j) {
    const double target = v[j].second / v[j].first / r;
    double lo = v[1].first, hi = 1.0;
    if (value_at(v, hi) >= target || value_at(v, lo) < target) continue;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (value_at(v, mid) >= target ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto f = [&](double m) {
    const double price = r * value_at(v, m);
    return price * quantile_at(v, price);
  };
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i - 1] < v[1].first) continue;
    total += gauss3(f, cuts[i - 1], cuts[i], per_piece);
  }
  return 2.0 * total;
}

/// Random regular curve: n interior vertices with decreasing slopes, R >= 0.
inline scalerobust::RevenueCurve random_curve(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> qs{0.0, 1.0};
  for (int i = 0; i < n; ++i) qs.push_back(0.02 + 0.96 * u(rng));
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  std::vector<double> slopes;
  for (std::size_t i = 1; i < qs.size(); ++i) slopes.push_back(6.0 * u(rng) - 3.0);
  std::sort(slopes.rbegin(), slopes.rend());
  std::vector<scalerobust::Vertex> v{{0.0, 0.0}};
  double r = 0.0;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    r += slopes[i - 1] * (qs[i] - qs[i - 1]);
    v.push_back({qs[i], r});
  }
  // Lift the slopes uniformly until R(1) >= 0; concavity is unaffected.
  const double lift = std::max(0.0, -v.back().revenue) + 0.05 * u(rng);
  for (auto& p : v) p.revenue += lift * p.q;
  if (v[1].revenue <= 0.0) {
    const double extra = -v[1].revenue / v[1].q + 0.1;
    for (auto& p : v) p.revenue += extra * p.q;
  }
  return scalerobust::RevenueCurve(std::move(v));
}

}  // namespace oracle
