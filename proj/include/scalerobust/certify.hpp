#pragma once

// Grid certificates for the three equilibrium inequalities:
//   (a) M_{r_fixed}(T_q) > 1 for q in [0, q_left];
//   (b) M_r(T_q) < 1 for q in [q_right, 1], r in (1, r_max];
//   (c) APX(alpha, r, q) <= beta + tol for all q.
// Every cell is closed by evaluating the exact closed form at one corner and
// extending it to the whole cell with the ratio-shift / quantile-shift
// bounds. Cells whose bound does not close are bisected until they close or
// reach the width floor, in which case the region is UNCERTIFIED.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalerobust/analytic.hpp"
#include "scalerobust/parallel.hpp"

namespace scalerobust {

enum class CertRegion { a, b, c };

inline std::string to_string(CertRegion r) {
  switch (r) {
    case CertRegion::a: return "a";
    case CertRegion::b: return "b";
    case CertRegion::c: return "c";
  }
  return "?";
}

struct CertifyOptions {
  double epsilon = 1e-6;
  double r_fixed = 2.446946;
  Quantile q_left = 0.09310569;
  Quantile q_right = 0.09310571;
  double r_max = 11.0;
  double alpha = 0.80564048;
  double r_mix = 2.4469452;
  double beta = 1.9068943;
  double beta_tolerance = 2e-8;
  double min_width = 1e-15;
  unsigned threads = default_threads();
};

struct RegionReport {
  std::string name;
  std::string statement;
  std::string bound;
  double epsilon = 0.0;
  std::size_t base_cells = 0;
  std::size_t cells_examined = 0;
  std::size_t cells_refined = 0;
  double min_cell_width = std::numeric_limits<double>::infinity();
  double grid_extreme = 0.0;  // min (a) or max (b, c) of the evaluated grid values
  double grid_extreme_q = 0.0;
  double grid_extreme_r = 0.0;
  double tightest_margin = std::numeric_limits<double>::infinity();  // margin of the tightest closed cell
  double tightest_slack = 0.0;                                       // its Lipschitz slack
  double boundary_extreme = std::numeric_limits<double>::quiet_NaN();
  std::string note;
  bool certified = false;
};

struct CertificateReport {
  double epsilon = 0.0;
  std::vector<RegionReport> regions;

  bool all_certified() const {
    return std::all_of(regions.begin(), regions.end(), [](const RegionReport& r) { return r.certified; });
  }
};

namespace detail {

struct CellEval {
  double grid_value;
  double margin;  // distance of the grid value from the target
  double slack;   // worst-case drift of the bound across the cell
  bool split_q;   // 2-D only: which side to bisect
  double at_q, at_r;  // where grid_value was evaluated
};

struct Cell {
  double q_lo, q_hi, r_lo, r_hi;
};

struct Tally {
  std::size_t examined = 0, refined = 0;
  double min_width = std::numeric_limits<double>::infinity();
  bool have_extreme = false;
  double extreme = 0.0, extreme_q = 0.0, extreme_r = 0.0;
  double margin = std::numeric_limits<double>::infinity(), slack = 0.0;
  bool failed = false;
  Cell failed_cell{};

  void merge(const Tally& o, bool maximize) {
    examined += o.examined;
    refined += o.refined;
    min_width = std::min(min_width, o.min_width);
    if (o.have_extreme && (!have_extreme || (maximize ? o.extreme > extreme : o.extreme < extreme))) {
      have_extreme = true;
      extreme = o.extreme;
      extreme_q = o.extreme_q;
      extreme_r = o.extreme_r;
    }
    if (o.margin - o.slack < margin - slack) {
      margin = o.margin;
      slack = o.slack;
    }
    if (o.failed && !failed) {
      failed = true;
      failed_cell = o.failed_cell;
    }
  }
};

/// Closes one base cell by depth-first bisection.
template <class Eval>
Tally close_cell(const Cell& base, const Eval& eval, bool two_d, bool maximize, double min_width) {
  Tally t;
  std::vector<Cell> stack{base};
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    ++t.examined;
    const CellEval e = eval(c);
    if (!t.have_extreme || (maximize ? e.grid_value > t.extreme : e.grid_value < t.extreme)) {
      t.have_extreme = true;
      t.extreme = e.grid_value;
      t.extreme_q = e.at_q;
      t.extreme_r = e.at_r;
    }
    if (e.margin > e.slack) {
      t.min_width = std::min({t.min_width, c.q_hi - c.q_lo, two_d ? c.r_hi - c.r_lo : t.min_width});
      if (e.margin - e.slack < t.margin - t.slack) {
        t.margin = e.margin;
        t.slack = e.slack;
      }
      continue;
    }
    const bool split_q = !two_d || e.split_q;
    const double width = split_q ? c.q_hi - c.q_lo : c.r_hi - c.r_lo;
    if (width <= min_width) {
      t.failed = true;
      t.failed_cell = c;
      return t;
    }
    ++t.refined;
    if (split_q) {
      const double mid = 0.5 * (c.q_lo + c.q_hi);
      stack.push_back({c.q_lo, mid, c.r_lo, c.r_hi});
      stack.push_back({mid, c.q_hi, c.r_lo, c.r_hi});
    } else {
      const double mid = 0.5 * (c.r_lo + c.r_hi);
      stack.push_back({c.q_lo, c.q_hi, c.r_lo, mid});
      stack.push_back({c.q_lo, c.q_hi, mid, c.r_hi});
    }
  }
  return t;
}

inline std::vector<double> axis(double lo, double hi, double spacing) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing - 1e-9));
  std::vector<double> pts(std::max<std::size_t>(n, 1) + 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pts.size() - 1);
  }
  pts.back() = hi;
  return pts;
}

template <class Eval>
void run_grid(RegionReport& rep, const std::vector<double>& qs, const std::vector<double>& rs, const Eval& eval,
              bool maximize, const CertifyOptions& opt) {
  const bool two_d = rs.size() > 1;
  const std::size_t nq = qs.size() - 1;
  const std::size_t nr = two_d ? rs.size() - 1 : 1;
  rep.base_cells = nq * nr;
  // One work item per block of q-columns keeps the merge order fixed.
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (nq + kBlock - 1) / kBlock;
  std::vector<Tally> tallies(blocks);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        Tally t;
        for (std::size_t i = b * kBlock; i < std::min(nq, (b + 1) * kBlock) && !t.failed; ++i) {
          for (std::size_t j = 0; j < nr && !t.failed; ++j) {
            const Cell c{qs[i], qs[i + 1], two_d ? rs[j] : 0.0, two_d ? rs[j + 1] : 0.0};
            t.merge(close_cell(c, eval, two_d, maximize, opt.min_width), maximize);
          }
        }
        tallies[b] = t;
      },
      opt.threads);
  Tally total;
  for (const Tally& t : tallies) total.merge(t, maximize);
  rep.cells_examined = total.examined;
  rep.cells_refined = total.refined;
  rep.min_cell_width = total.min_width;
  rep.grid_extreme = total.extreme;
  rep.grid_extreme_q = total.extreme_q;
  rep.grid_extreme_r = total.extreme_r;
  rep.tightest_margin = total.margin;
  rep.tightest_slack = total.slack;
  rep.certified = !total.failed;
  if (total.failed) {
    const Cell& c = total.failed_cell;
    rep.note = "UNCERTIFIED: cell q in [" + std::to_string(c.q_lo) + ", " + std::to_string(c.q_hi) + "]" +
               (two_d ? ", r in [" + std::to_string(c.r_lo) + ", " + std::to_string(c.r_hi) + "]" : "") +
               " did not close at the width floor";
  }
}

}  // namespace detail

inline RegionReport certify_region_a(const CertifyOptions& opt) {
  RegionReport rep;
  rep.name = "a";
  rep.statement = "M_r(T_q) > 1 for r = " + std::to_string(opt.r_fixed) + ", q in [0, " +
                  std::to_string(opt.q_left) + "]";
  rep.bound = "quantile shift: M(T_q) >= (1-q_hi)/(1-q_lo) * M(T_q_hi)";
  rep.epsilon = opt.epsilon;
  const double r = opt.r_fixed;
  auto eval = [r](const detail::Cell& c) {
    const double g = markup_revenue_triangle(r, c.q_hi);
    const double lower = bound_quantile_shift(c.q_lo, c.q_hi, g).lower;
    return detail::CellEval{g, g - 1.0, g - lower, true, c.q_hi, r};
  };
  detail::run_grid(rep, detail::axis(0.0, opt.q_left, opt.epsilon), {}, eval, false, opt);
  return rep;
}

inline RegionReport certify_region_b(const CertifyOptions& opt) {
  RegionReport rep;
  rep.name = "b";
  rep.statement = "M_r(T_q) < 1 for q in [" + std::to_string(opt.q_right) + ", 1], r in (1, " +
                  std::to_string(opt.r_max) + "]";
  rep.bound = "ratio shift M_r <= (r_hi/r_lo) M_r_lo, quantile shift M(T_q) <= (1-q_lo)/(1-q) M(T_q_lo); "
              "M_r(T_q) <= r(1-q) from the ratio shift against r = 1";
  rep.epsilon = opt.epsilon;
  auto eval = [](const detail::Cell& c) {
    // r -> 1+ limit of the closed form is 1 - q.
    const double g = c.r_lo == 1.0 ? 1.0 - c.q_lo : markup_revenue_triangle(c.r_lo, c.q_lo);
    const double ratio = c.r_hi / c.r_lo;
    const double qf = c.q_hi < 1.0 ? (1.0 - c.q_lo) / (1.0 - c.q_hi) : std::numeric_limits<double>::infinity();
    const double upper = std::min(ratio * qf * g, c.r_hi * (1.0 - c.q_lo));
    return detail::CellEval{g, 1.0 - g, upper - g, qf - 1.0 >= ratio - 1.0, c.q_lo, c.r_lo};
  };
  const double q_span = 1.0 - opt.q_right;
  const double r_span = opt.r_max - 1.0;
  detail::run_grid(rep, detail::axis(opt.q_right, 1.0, std::max(opt.epsilon, q_span / 1024.0)),
                   detail::axis(1.0, opt.r_max, std::max(opt.epsilon, r_span / 1024.0)), eval, true, opt);
  rep.boundary_extreme = apx_star(opt.q_right, opt.r_max).revenue;
  return rep;
}

inline RegionReport certify_region_c(const CertifyOptions& opt) {
  RegionReport rep;
  rep.name = "c";
  rep.statement = "APX(alpha=" + std::to_string(opt.alpha) + ", r=" + std::to_string(opt.r_mix) +
                  ", q) <= beta + tol for q in [0, 1]";
  rep.bound = "quantile shift lower bound on M(T_q) over [0, 1/2]; APX <= 1.5/alpha on [1/2, 1]";
  rep.epsilon = opt.epsilon;
  const double a = opt.alpha, r = opt.r_mix, target = opt.beta + opt.beta_tolerance;
  auto eval = [a, r, target](const detail::Cell& c) {
    const double m = markup_revenue_triangle(r, c.q_hi);
    const double g = (2.0 - c.q_hi) / (a + (1.0 - a) * m);
    const double lower = bound_quantile_shift(c.q_lo, c.q_hi, m).lower;
    const double upper = (2.0 - c.q_lo) / (a + (1.0 - a) * lower);
    return detail::CellEval{g, target - g, upper - g, true, c.q_hi, r};
  };
  detail::run_grid(rep, detail::axis(0.0, 0.5, opt.epsilon), {}, eval, true, opt);
  const double tail = 1.5 / a;
  rep.boundary_extreme = tail;
  if (!(tail < target)) {
    rep.certified = false;
    rep.note = "UNCERTIFIED: tail bound 1.5/alpha does not close on [1/2, 1]";
  }
  return rep;
}

inline CertificateReport certify(const std::vector<CertRegion>& regions, const CertifyOptions& opt = {}) {
  if (!(opt.epsilon >= 1e-9 && opt.epsilon <= 1e-4)) {
    throw std::domain_error("certify: epsilon must lie in [1e-9, 1e-4]");
  }
  CertificateReport rep;
  rep.epsilon = opt.epsilon;
  for (CertRegion r : regions) {
    switch (r) {
      case CertRegion::a: rep.regions.push_back(certify_region_a(opt)); break;
      case CertRegion::b: rep.regions.push_back(certify_region_b(opt)); break;
      case CertRegion::c: rep.regions.push_back(certify_region_c(opt)); break;
    }
  }
  return rep;
}

}  // namespace scalerobust
