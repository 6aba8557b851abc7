#pragma once

#include <vector>

#include "quadperc/chain.hpp"

namespace quadperc {

// Certified bracket on the percolation threshold from the capacity-K chain:
// p_lower carries a direct evaluation alpha_ub(p_lower) < 0, p_upper a direct
// evaluation alpha_lb(p_upper) > 0.
struct BoundsResult {
  long capacity = 0;
  double p_lower = 0;
  double p_upper = 1;
  double tolerance = 0;
  double grid_step = 0;
  double alpha_ub_at_lower = 0;  // certificate, < 0
  double alpha_lb_at_upper = 0;  // certificate, > 0
  // all sign-change intervals seen on the grid, [left, right]
  std::vector<std::pair<double, double>> sign_changes_lb;
  std::vector<std::pair<double, double>> sign_changes_ub;
};

inline constexpr double kDefaultTolerance = 1e-7;
inline constexpr double kDefaultGridStep = 1e-3;

// Grid scan of [0,1] followed by bisection.  The root of alpha_lb taken at
// its first upward crossing gives p_upper; the last point with alpha_ub < 0
// gives p_lower.  Throws if either function has no sign change on the grid.
BoundsResult pc_bracket(long capacity, double tolerance, double grid_step,
                        const WeightTable& table);

// The two degree-4 polynomials whose unit-interval roots are the K=2 bracket
// endpoints: lower 189p^4+378p^3-596p^2-575p+396, upper
// 81p^4+162p^3-251p^2-232p+176.
double lower_quartic(double p);
double upper_quartic(double p);

struct QuarticReport {
  double p_lower = 0, p_upper = 0;
  double lower_value = 0;  // lower quartic at p_lower
  double upper_value = 0;  // upper quartic at p_upper
  bool ok = false;         // both below 1e-4 in absolute value
};

// Evaluates both quartics at freshly computed K=2 bracket endpoints.
QuarticReport verify_quartic();

struct BracketSeries {
  std::vector<BoundsResult> rows;  // one per capacity 1..k_max
  bool lower_monotone = true;      // weakly increasing
  bool upper_monotone = true;      // weakly decreasing
};

BracketSeries bracket_series(long k_max, double tolerance = kDefaultTolerance,
                             double grid_step = kDefaultGridStep);

}  // namespace quadperc
