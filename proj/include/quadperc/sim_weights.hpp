#pragma once

#include <vector>

#include "quadperc/weights.hpp"

namespace quadperc {

// Double-precision weight table for Monte Carlo sampling.  Built by the same
// ratio recurrence as the exact table, with compensated summation for the
// cumulative masses so the tiny tail residual 1/8 - sum is still meaningful.
// Only the odd-index weights are stored: q_{2k} = q_{2k+1}, and every event
// class samples its swallow sizes from the odd distribution (even swallows
// are either a shifted odd draw or a sum of two odd draws).
class FloatWeightTable {
 public:
  explicit FloatWeightTable(long cutoff);

  long cutoff() const { return cutoff_; }
  long max_odd() const { return 2 * static_cast<long>(odd_q_.size()) - 1; }

  double q(long k) const;  // k in [-1, cutoff]

  // Sum of stored odd weights and the residual 1/8 - sum.
  double odd_partial() const { return odd_partial_; }
  double residual_odd() const { return residual_odd_; }
  // Residual of the conditioned k >= 3 block, 1/72 - (partial - q_1).
  double residual_odd_min3() const { return residual_min3_; }

  // Total probability that one sampled peeling step involves a swallow
  // beyond the cutoff (the far-swallow lump, summed over event classes).
  double residual_sampler_total() const;

  // Maps a uniform u in [0,1) to an odd swallow size, or -1 for the far
  // lump.  The _min3 variant conditions on k >= 3.
  long sample_odd(double u) const;
  long sample_odd_min3(double u) const;

 private:
  long cutoff_;
  std::vector<double> odd_q_;    // odd_q_[j] = q_{2j+1}
  std::vector<double> odd_cum_;  // compensated prefix sums
  double odd_partial_ = 0;
  double residual_odd_ = 0;
  double residual_min3_ = 0;
};

}  // namespace quadperc
