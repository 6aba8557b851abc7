#include "quadperc/bounds.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace quadperc {

namespace {

struct GridScan {
  std::vector<double> p;
  std::vector<double> lb;
  std::vector<double> ub;
};

// Grid evaluations are independent (K,p) solves; run them on all cores,
// each worker with its own solver scratch.
GridScan scan(const ChainContext& ctx, double grid_step) {
  GridScan g;
  long steps = static_cast<long>(std::ceil(1.0 / grid_step));
  g.p.resize(steps + 1);
  g.lb.resize(steps + 1);
  g.ub.resize(steps + 1);
  for (long i = 0; i <= steps; ++i)
    g.p[i] = std::min(1.0, static_cast<double>(i) * grid_step);

  unsigned workers = std::min<unsigned>(
      std::max(1u, std::thread::hardware_concurrency()),
      static_cast<unsigned>(steps + 1));
  std::atomic<long> next{0};
  auto work = [&] {
    auto scratch = ctx.make_scratch();
    for (long i = next.fetch_add(1); i <= steps; i = next.fetch_add(1)) {
      AlphaBounds ab = ctx.alpha_bounds(g.p[i], *scratch);
      g.lb[i] = ab.lb;
      g.ub[i] = ab.ub;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return g;
}

std::vector<std::pair<double, double>> sign_changes(
    const std::vector<double>& p, const std::vector<double>& f) {
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i + 1 < f.size(); ++i)
    if ((f[i] < 0) != (f[i + 1] < 0)) out.emplace_back(p[i], p[i + 1]);
  return out;
}

}  // namespace

double lower_quartic(double p) {
  return ((189 * p + 378) * p - 596) * p * p - 575 * p + 396;
}

double upper_quartic(double p) {
  return ((81 * p + 162) * p - 251) * p * p - 232 * p + 176;
}

BoundsResult pc_bracket(long capacity, double tolerance, double grid_step,
                        const WeightTable& table) {
  if (tolerance < 1e-9)
    throw std::domain_error("pc_bracket: tolerance must be >= 1e-9");
  if (grid_step > 1e-3)
    throw std::domain_error("pc_bracket: grid step must be <= 1e-3");

  ChainContext ctx(capacity, table);
  GridScan g = scan(ctx, grid_step);

  BoundsResult res;
  res.capacity = capacity;
  res.tolerance = tolerance;
  res.grid_step = grid_step;
  res.sign_changes_lb = sign_changes(g.p, g.lb);
  res.sign_changes_ub = sign_changes(g.p, g.ub);
  if (res.sign_changes_lb.empty() || res.sign_changes_ub.empty())
    throw std::runtime_error("pc_bracket: no sign change on [0,1]");

  auto scratch = ctx.make_scratch();

  // p_upper = inf{p : alpha_lb(p) > 0}: first upward crossing, keep the
  // certified positive endpoint.
  {
    size_t i = 0;
    while (!(g.lb[i] <= 0 && g.lb[i + 1] > 0)) {
      ++i;
      if (i + 1 >= g.lb.size())
        throw std::runtime_error("pc_bracket: no upward crossing of alpha_lb");
    }
    double lo = g.p[i], hi = g.p[i + 1], f_hi = g.lb[i + 1];
    while (hi - lo > tolerance) {
      double mid = 0.5 * (lo + hi);
      double f = ctx.alpha_bounds(mid, *scratch).lb;
      if (f > 0) {
        hi = mid;
        f_hi = f;
      } else {
        lo = mid;
      }
    }
    res.p_upper = hi;
    res.alpha_lb_at_upper = f_hi;
  }

  // p_lower = sup{p : alpha_ub(p) < 0}: last point still negative.
  {
    size_t i = g.ub.size() - 1;
    while (!(g.ub[i - 1] < 0 && g.ub[i] >= 0)) {
      --i;
      if (i == 0)
        throw std::runtime_error("pc_bracket: no downward exit of alpha_ub");
    }
    double lo = g.p[i - 1], hi = g.p[i], f_lo = g.ub[i - 1];
    while (hi - lo > tolerance) {
      double mid = 0.5 * (lo + hi);
      double f = ctx.alpha_bounds(mid, *scratch).ub;
      if (f < 0) {
        lo = mid;
        f_lo = f;
      } else {
        hi = mid;
      }
    }
    res.p_lower = lo;
    res.alpha_ub_at_lower = f_lo;
  }

  return res;
}

QuarticReport verify_quartic() {
  WeightTable table = chain_weight_table(2);
  BoundsResult b = pc_bracket(2, 1e-9, kDefaultGridStep, table);
  QuarticReport rep;
  rep.p_lower = b.p_lower;
  rep.p_upper = b.p_upper;
  rep.lower_value = lower_quartic(b.p_lower);
  rep.upper_value = upper_quartic(b.p_upper);
  rep.ok = std::abs(rep.lower_value) <= 1e-4 && std::abs(rep.upper_value) <= 1e-4;
  return rep;
}

BracketSeries bracket_series(long k_max, double tolerance, double grid_step) {
  if (k_max < 1 || k_max > 20)
    throw std::domain_error("bracket_series: k_max out of range (1..20)");
  BracketSeries series;
  for (long k = 1; k <= k_max; ++k) {
    WeightTable table = chain_weight_table(k);
    series.rows.push_back(pc_bracket(k, tolerance, grid_step, table));
    if (k >= 2) {
      const auto& prev = series.rows[k - 2];
      const auto& cur = series.rows[k - 1];
      if (cur.p_lower < prev.p_lower - 1e-12) series.lower_monotone = false;
      if (cur.p_upper > prev.p_upper + 1e-12) series.upper_monotone = false;
    }
  }
  return series;
}

}  // namespace quadperc
