#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace scalerobust::detail {

/// Sorted, de-duplicated breakpoints strictly inside (a, b), with a and b as ends.
inline std::vector<double> partition(double a, double b, std::vector<double> cuts) {
  std::vector<double> pts{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > pts.back() && c < b && std::isfinite(c)) pts.push_back(c);
  }
  pts.push_back(b);
  return pts;
}

/// Adaptive Gauss-Kronrod over [a, b], restarted at every breakpoint so that
/// kinks and jumps of a piecewise-smooth integrand sit on panel edges.
template <class F>
double integrate_piecewise(F&& f, double a, double b, std::vector<double> cuts, double tol = 1e-13) {
  using boost::math::quadrature::gauss_kronrod;
  const std::vector<double> pts = partition(a, b, std::move(cuts));
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i] <= pts[i - 1]) continue;
    total += gauss_kronrod<double, 31>::integrate(f, pts[i - 1], pts[i], 12, tol);
  }
  return total;
}

/// Composite 16-point Gauss-Legendre with a fixed panel count over [a, b],
/// panels additionally split at the breakpoints.
template <class F>
double integrate_composite(F&& f, double a, double b, int panels, std::vector<double> cuts) {
  using boost::math::quadrature::gauss;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) grid.push_back(a + (b - a) * i / panels);
  grid.insert(grid.end(), cuts.begin(), cuts.end());
  const std::vector<double> pts = partition(a, b, std::move(grid));
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += gauss<double, 16>::integrate(f, pts[i - 1], pts[i]);
  }
  return total;
}

}  // namespace scalerobust::detail
