#include "quadperc/sim_weights.hpp"

#include <algorithm>
#include <stdexcept>

namespace quadperc {

FloatWeightTable::FloatWeightTable(long cutoff) : cutoff_(cutoff) {
  if (cutoff < 4) throw std::domain_error("FloatWeightTable: cutoff too small");
  long count = (cutoff + 1) / 2;  // odd indices 1, 3, ..., <= cutoff
  odd_q_.resize(count);
  odd_cum_.resize(count);

  // q_{2j+1} = q_{2j-1} * z_ratio(j) / 54, starting from q_1 = 1/9.
  double q = 1.0 / 9.0;
  double sum = 0.0, comp = 0.0;  // Kahan
  for (long j = 0; j < count; ++j) {
    if (j >= 1) {
      double num, den;
      if (j == 1) {
        num = 4.0;
        den = 1.0;
      } else {
        num = 8.0 * (3.0 * j - 1) * (3.0 * j - 2) * (3.0 * j - 3);
        den = static_cast<double>(j - 1) * (2 * j + 1) * (2 * j + 2);
      }
      q *= num / (den * 54.0);
    }
    odd_q_[j] = q;
    double y = q - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    odd_cum_[j] = sum;
  }
  odd_partial_ = sum;
  residual_odd_ = 0.125 - sum;
  residual_min3_ = (0.125 - odd_q_[0]) - (sum - odd_q_[0]);
  if (residual_odd_ < 0)
    throw std::logic_error("FloatWeightTable: odd mass exceeds 1/8");
}

double FloatWeightTable::q(long k) const {
  if (k == -1) return 0.375;
  if (k < -1 || k > cutoff_)
    throw std::domain_error("FloatWeightTable::q: index out of range");
  return odd_q_[k / 2];
}

double FloatWeightTable::residual_sampler_total() const {
  // Per-draw far probability within each class, weighted by class mass:
  //   one-fresh sides:  2 * (1/8) * r/(1/8)          = 2 r
  //   even singles:     2 * (1/72) * r3/(1/72)       = 2 r3
  //   pocket pairs:     3 * (1/24) * (1 - (1-8r)^2)  ~ 2 r
  double r = residual_odd_;
  double r3 = residual_min3_;
  double keep = odd_partial_ * 8.0;  // P(draw below cutoff)
  double pair_far = 1.0 - keep * keep;
  return 2.0 * r + 2.0 * r3 + 3.0 * (1.0 / 24.0) * pair_far;
}

long FloatWeightTable::sample_odd(double u) const {
  double target = u * 0.125;
  if (target >= odd_partial_) return -1;
  auto it = std::upper_bound(odd_cum_.begin(), odd_cum_.end(), target);
  return 2 * static_cast<long>(it - odd_cum_.begin()) + 1;
}

long FloatWeightTable::sample_odd_min3(double u) const {
  double target = odd_q_[0] + u * (0.125 - odd_q_[0]);
  if (target >= odd_partial_) return -1;
  auto it = std::upper_bound(odd_cum_.begin(), odd_cum_.end(), target);
  long j = static_cast<long>(it - odd_cum_.begin());
  return 2 * std::max<long>(j, 1) + 1;
}

}  // namespace quadperc
