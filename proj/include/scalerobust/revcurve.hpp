#pragma once

// Revenue curves: the quantile-space representation of a regular value
// distribution, plus the parametric triangle / quadrilateral families and the
// geometric operations (truncation, ironing, hull) used by the worst-case
// reductions.
//
// A RevenueCurve is piecewise linear and concave with R(0) = 0. The value at
// quantile q is V(q) = R(q) / q, so the first segment (a ray through the
// origin) encodes the point mass at the top of the support.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scalerobust {

using Quantile = double;
using Value = double;

inline constexpr double kConcavityTolerance = 1e-9;

struct Vertex {
  Quantile q = 0.0;
  double revenue = 0.0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Monopoly quantile of a normalized triangle distribution. q_bar = 1 is the
/// point mass at value 1; q_bar = 0 is admitted for formula evaluation only.
struct TriangleParams {
  Quantile q_bar = 1.0;

  explicit TriangleParams(Quantile q) : q_bar(q) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw std::invalid_argument("triangle: monopoly quantile must lie in [0,1]");
    }
  }
};

/// Normalized quadrilateral distribution Q_{q_bar, q_bar', r}.
struct QuadParams {
  Quantile q_bar;
  Quantile q_bar_prime;
  double ratio;

  QuadParams(Quantile q, Quantile q_prime, double r)
      : q_bar(q), q_bar_prime(q_prime), ratio(r) {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::invalid_argument("quad: q_bar must lie in (0,1)");
    }
    if (!(r > 1.0) || !std::isfinite(r)) {
      throw std::invalid_argument("quad: markup ratio must exceed 1");
    }
    const double lo = min_q_bar_prime(q, r);
    const double hi = std::min(r * q, 1.0);
    const double slack = 1e-12;
    if (!(q_prime >= lo - slack && q_prime <= hi + slack)) {
      throw std::invalid_argument("quad: q_bar' = " + std::to_string(q_prime) +
                                  " outside admissible window [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
    }
  }

  /// Smallest admissible q_bar': the quadrilateral degenerates to T_{q_bar}.
  static double min_q_bar_prime(Quantile q, double r) { return q * r / (q * r + (1.0 - q)); }
};

class RevenueCurve {
 public:
  explicit RevenueCurve(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
    validate();
  }

  std::span<const Vertex> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  /// R(q) by linear interpolation.
  double value(Quantile q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("curve: quantile outside [0,1]");
    const std::size_t i = segment_index(q);
    const Vertex& a = vertices_[i];
    const Vertex& b = vertices_[i + 1];
    const double t = (q - a.q) / (b.q - a.q);
    return a.revenue + t * (b.revenue - a.revenue);
  }

  /// V(q) = R(q) / q.
  Value price(Quantile q) const {
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("curve: price needs q in (0,1]");
    const std::size_t i = segment_index(q);
    const Vertex& a = vertices_[i];
    const Vertex& b = vertices_[i + 1];
    const double slope = (b.revenue - a.revenue) / (b.q - a.q);
    const double intercept = a.revenue - slope * a.q;
    return std::max(0.0, intercept / q + slope);
  }

  /// Q(v) = Pr[value >= v]: the largest quantile whose value is at least v.
  Quantile quantile(Value v) const {
    if (v <= bottom_value()) return 1.0;
    if (v > support_top()) return 0.0;
    // V is non-increasing in the vertex index; find the last vertex with V >= v.
    std::size_t lo = 1, hi = vertices_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (vertex_value(mid) >= v) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    const Vertex& a = vertices_[lo];
    const Vertex& b = vertices_[lo + 1];
    const double slope = (b.revenue - a.revenue) / (b.q - a.q);
    const double intercept = a.revenue - slope * a.q;
    const double q = intercept / (v - slope);
    return std::clamp(q, a.q, b.q);
  }

  /// Price-posting revenue P(v) = v * Q(v).
  double posting_revenue(Value v) const { return v <= 0.0 ? 0.0 : v * quantile(v); }

  /// Highest value in the support: the slope of the first segment.
  Value support_top() const { return vertices_[1].revenue / vertices_[1].q; }
  /// Lowest value in the support, V(1) = R(1).
  Value bottom_value() const { return vertices_.back().revenue; }
  /// Probability mass of the atom at the support top.
  Quantile top_mass() const { return vertices_[1].q; }

  /// Value at vertex i (i >= 1).
  Value vertex_value(std::size_t i) const { return vertices_[i].revenue / vertices_[i].q; }

  double max_revenue() const {
    double m = 0.0;
    for (const Vertex& v : vertices_) m = std::max(m, v.revenue);
    return m;
  }

  /// Smallest quantile attaining the maximum revenue.
  Quantile monopoly_quantile() const { return vertices_[monopoly_index()].q; }

  std::size_t monopoly_index() const {
    const double m = max_revenue();
    const double tol = 1e-12 * std::max(1.0, m);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (vertices_[i].revenue >= m - tol) return i;
    }
    return vertices_.size() - 1;
  }

  /// Distribution of k * value: revenue scales by k, quantiles unchanged.
  RevenueCurve scaled(double k) const {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("curve: scale must be positive");
    std::vector<Vertex> out = vertices_;
    for (Vertex& v : out) v.revenue *= k;
    return RevenueCurve(std::move(out));
  }

  /// Rescaled so that max R = 1.
  RevenueCurve normalized() const {
    const double m = max_revenue();
    if (!(m > 0.0)) throw std::domain_error("curve: cannot normalize a zero curve");
    return scaled(1.0 / m);
  }

  /// Drops interior vertices whose neighbouring slopes agree within tol.
  RevenueCurve simplified(double tol = 1e-12) const {
    std::vector<Vertex> out{vertices_.front()};
    for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
      const Vertex& a = out.back();
      const Vertex& b = vertices_[i];
      const Vertex& c = vertices_[i + 1];
      const double left = (b.revenue - a.revenue) / (b.q - a.q);
      const double right = (c.revenue - b.revenue) / (c.q - b.q);
      if (std::abs(left - right) > tol * std::max({1.0, std::abs(left), std::abs(right)})) {
        out.push_back(b);
      }
    }
    out.push_back(vertices_.back());
    return RevenueCurve(std::move(out));
  }

  friend bool operator==(const RevenueCurve&, const RevenueCurve&) = default;

 private:
  std::size_t segment_index(Quantile q) const {
    auto it = std::upper_bound(vertices_.begin() + 1, vertices_.end() - 1, q,
                               [](double x, const Vertex& v) { return x < v.q; });
    return static_cast<std::size_t>(it - vertices_.begin()) - 1;
  }

  void validate() const {
    if (vertices_.size() < 2) throw std::invalid_argument("curve: need at least two vertices");
    if (vertices_.front().q != 0.0 || vertices_.front().revenue != 0.0) {
      throw std::invalid_argument("curve: first vertex must be (0,0)");
    }
    if (vertices_.back().q != 1.0) throw std::invalid_argument("curve: last vertex must have q = 1");
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
      const Vertex& a = vertices_[i - 1];
      const Vertex& b = vertices_[i];
      if (!std::isfinite(b.q) || !std::isfinite(b.revenue)) {
        throw std::invalid_argument("curve: non-finite vertex");
      }
      if (!(b.q > a.q)) throw std::invalid_argument("curve: quantiles must strictly increase");
      if (b.revenue < 0.0) throw std::invalid_argument("curve: revenue must be non-negative");
      const double slope = (b.revenue - a.revenue) / (b.q - a.q);
      if (std::isfinite(prev_slope) &&
          slope > prev_slope + kConcavityTolerance * std::max({1.0, std::abs(slope), std::abs(prev_slope)})) {
        throw std::invalid_argument("curve: not concave (irregular distribution)");
      }
      prev_slope = slope;
    }
  }

  std::vector<Vertex> vertices_;
};

// ---------------------------------------------------------------------------
// Parametric families
// ---------------------------------------------------------------------------

inline Quantile triangle_quantile(Value v, TriangleParams p) {
  if (v < 0.0) throw std::domain_error("triangle_quantile: negative value");
  if (p.q_bar == 1.0) return v <= 1.0 ? 1.0 : 0.0;
  if (p.q_bar > 0.0 && v > 1.0 / p.q_bar) return 0.0;
  return 1.0 / (1.0 + v * (1.0 - p.q_bar));
}

inline Value triangle_value(Quantile q, TriangleParams p) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("triangle_value: quantile outside [0,1]");
  if (p.q_bar == 1.0) return 1.0;
  if (q < p.q_bar) return 1.0 / p.q_bar;
  if (q == 0.0) throw std::domain_error("triangle_value: unbounded value at q = q_bar = 0");
  return (1.0 - q) / (q * (1.0 - p.q_bar));
}

inline Quantile quad_quantile(Value v, const QuadParams& p) {
  if (v < 0.0) throw std::domain_error("quad_quantile: negative value");
  const double q = p.q_bar, qp = p.q_bar_prime, r = p.ratio;
  if (v < 1.0 / (r * q)) return qp / (qp + v * r * q * (1.0 - qp));
  if (v <= 1.0 / q) return qp * q * (r - 1.0) / (v * r * q * (qp - q) + (r * q - qp));
  return 0.0;
}

/// Quantile at which the price r * V(q) is accepted on T_{q_bar}; 0 when that
/// price is above the support.
inline Quantile q_hat(Quantile q, double r, TriangleParams p) {
  if (!(r > 1.0)) throw std::domain_error("q_hat: r must exceed 1");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("q_hat: quantile outside [0,1]");
  if (q == 0.0) return 0.0;
  const double price = r * triangle_value(q, p);
  if (p.q_bar > 0.0 && price > 1.0 / p.q_bar) return 0.0;
  return q / (r - q * r + q);
}

inline RevenueCurve curve_from_triangle(TriangleParams p) {
  if (p.q_bar == 0.0) {
    throw std::domain_error("curve_from_triangle: q_bar = 0 has unbounded support");
  }
  if (p.q_bar == 1.0) return RevenueCurve({{0.0, 0.0}, {1.0, 1.0}});
  return RevenueCurve({{0.0, 0.0}, {p.q_bar, 1.0}, {1.0, 0.0}});
}

inline RevenueCurve curve_from_quad(const QuadParams& p) {
  const double corner = p.q_bar_prime / (p.ratio * p.q_bar);
  if (p.q_bar_prime >= 1.0) {
    return RevenueCurve({{0.0, 0.0}, {p.q_bar, 1.0}, {1.0, corner}});
  }
  return RevenueCurve({{0.0, 0.0}, {p.q_bar, 1.0}, {p.q_bar_prime, corner}, {1.0, 0.0}});
}

/// A point mass at value v (a single linear segment).
inline RevenueCurve curve_from_point_mass(Value v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("point mass value must be positive");
  return RevenueCurve({{0.0, 0.0}, {1.0, v}});
}

inline double curve_value(const RevenueCurve& c, Quantile q) { return c.value(q); }
inline Value curve_price(const RevenueCurve& c, Quantile q) { return c.price(q); }

// ---------------------------------------------------------------------------
// Geometric operations
// ---------------------------------------------------------------------------

inline double area_under(const RevenueCurve& c) {
  double area = 0.0;
  const auto v = c.vertices();
  for (std::size_t i = 1; i < v.size(); ++i) {
    area += 0.5 * (v[i].revenue + v[i - 1].revenue) * (v[i].q - v[i - 1].q);
  }
  return area;
}

/// Replaces every value above the monopoly price by the monopoly price: the
/// curve on [0, q_bar] becomes the chord from the origin.
inline RevenueCurve truncate(const RevenueCurve& c) {
  const std::size_t m = c.monopoly_index();
  const auto v = c.vertices();
  if (m == 0) return c;
  std::vector<Vertex> out{{0.0, 0.0}};
  for (std::size_t i = m; i < v.size(); ++i) out.push_back(v[i]);
  return RevenueCurve(std::move(out));
}

inline TriangleParams triangulate(const RevenueCurve& c) {
  if (std::abs(c.max_revenue() - 1.0) > 1e-9) {
    throw std::invalid_argument("triangulate: curve is not normalized (max R != 1)");
  }
  return TriangleParams(c.monopoly_quantile());
}

/// Replaces the curve on [a, b] by its chord.
inline RevenueCurve iron(const RevenueCurve& c, Quantile a, Quantile b) {
  if (!(a >= 0.0 && a < b && b <= 1.0)) throw std::invalid_argument("iron: need 0 <= a < b <= 1");
  std::vector<Vertex> out;
  for (const Vertex& v : c.vertices()) {
    if (v.q < a) out.push_back(v);
  }
  out.push_back({a, c.value(a)});
  out.push_back({b, c.value(b)});
  for (const Vertex& v : c.vertices()) {
    if (v.q > b) out.push_back(v);
  }
  return RevenueCurve(std::move(out));
}

/// Smallest non-decreasing concave upper bound: the curve up to its peak, then
/// flat at the peak height. Twice its area is the two-agent optimal revenue.
inline RevenueCurve concave_monotone_hull(const RevenueCurve& c) {
  const std::size_t m = c.monopoly_index();
  const auto v = c.vertices();
  std::vector<Vertex> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m) + 1);
  if (out.back().q < 1.0) out.push_back({1.0, v[m].revenue});
  return RevenueCurve(std::move(out));
}

}  // namespace scalerobust
