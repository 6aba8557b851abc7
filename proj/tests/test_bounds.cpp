#include <doctest.h>

#include <cmath>

#include "quadperc/bounds.hpp"

using namespace quadperc;

TEST_CASE("quartic values at zero") {
  CHECK(lower_quartic(0.0) == 396.0);
  CHECK(upper_quartic(0.0) == 176.0);
}

// At capacity 2 the drift brackets have closed forms: with
// D(p) = -27p^2 - p + 44,
//   alpha_lb(p) = -upper_quartic(p) / (8 D(p))
//   alpha_ub(p) = -lower_quartic(p) / (18 D(p))
// so the bracket endpoints are exactly the quartic roots.
TEST_CASE("capacity-2 drift brackets equal their quartic closed forms") {
  WeightTable table = chain_weight_table(2);
  ChainContext ctx(2, table);
  for (int i = 0; i <= 50; ++i) {
    double p = i / 50.0;
    AlphaBounds ab = ctx.alpha_bounds(p);
    double d = -27.0 * p * p - p + 44.0;
    CHECK(std::abs(ab.lb + upper_quartic(p) / (8.0 * d)) <= 1e-13);
    CHECK(std::abs(ab.ub + lower_quartic(p) / (18.0 * d)) <= 1e-13);
  }
}

TEST_CASE("capacity-1 bracket matches the algebraic endpoints") {
  WeightTable table = chain_weight_table(1);
  BoundsResult b = pc_bracket(1, 1e-9, kDefaultGridStep, table);
  double lower = (std::sqrt(493.0) - 13.0) / 18.0;
  double upper = (std::sqrt(73.0) - 5.0) / 6.0;
  CHECK(std::abs(b.p_lower - lower) <= 1e-6);
  CHECK(std::abs(b.p_upper - upper) <= 1e-6);
  CHECK(b.alpha_ub_at_lower < 0);
  CHECK(b.alpha_lb_at_upper > 0);
}

TEST_CASE("capacity-2 bracket matches the quartic roots") {
  WeightTable table = chain_weight_table(2);
  BoundsResult b = pc_bracket(2, 1e-9, kDefaultGridStep, table);
  CHECK(std::abs(b.p_lower - 0.523599) <= 1e-6);
  CHECK(std::abs(b.p_upper - 0.572542) <= 1e-6);

  QuarticReport qr = verify_quartic();
  CHECK(qr.ok);
  CHECK(std::abs(qr.lower_value) <= 1e-4);
  CHECK(std::abs(qr.upper_value) <= 1e-4);
}

TEST_CASE("certificates are re-evaluated sign conditions") {
  WeightTable table = chain_weight_table(3);
  BoundsResult b = pc_bracket(3, 1e-7, kDefaultGridStep, table);
  ChainContext ctx(3, table);
  CHECK(ctx.alpha_bounds(b.p_lower).ub < 0);
  CHECK(ctx.alpha_bounds(b.p_upper).lb > 0);
  CHECK(b.p_lower < b.p_upper);
}

TEST_CASE("brackets contain the known threshold") {
  const double pc = 5.0 / 9.0;
  for (long k = 1; k <= 6; ++k) {
    WeightTable table = chain_weight_table(k);
    BoundsResult b = pc_bracket(k, 1e-7, kDefaultGridStep, table);
    CHECK(b.p_lower < pc);
    CHECK(b.p_upper > pc);
  }
}

TEST_CASE("series is monotone and deterministic") {
  BracketSeries s1 = bracket_series(5);
  BracketSeries s2 = bracket_series(5);
  CHECK(s1.lower_monotone);
  CHECK(s1.upper_monotone);
  REQUIRE(s1.rows.size() == 5);
  for (size_t i = 0; i < s1.rows.size(); ++i) {
    CHECK(s1.rows[i].p_lower == s2.rows[i].p_lower);  // bitwise identical
    CHECK(s1.rows[i].p_upper == s2.rows[i].p_upper);
  }
}

TEST_CASE("precondition violations are rejected") {
  WeightTable table = chain_weight_table(2);
  CHECK_THROWS_AS(pc_bracket(2, 1e-10, 1e-3, table), std::domain_error);
  CHECK_THROWS_AS(pc_bracket(2, 1e-7, 1e-2, table), std::domain_error);
}
