#pragma once

#include <vector>

#include "quadperc/rational.hpp"

namespace quadperc {

// Combinatorial weights of the half-plane quadrangulation peeling step.
// All values are exact rationals; the constants (rho, a_const^2) = (12, 54)
// are fixed for this map class.
inline constexpr long kRho = 12;
inline constexpr long kAConstSquared = 54;

// Z(1) is the limiting value 4/3; for m >= 2 this is the closed form
// 8^m (3m-4)! / ((m-2)! (2m)!).  Argument m counts half the perimeter,
// i.e. partition_z(m) is the weight of a 2m-gon.
Rational partition_z(long m);

// partition_z(m+1) / partition_z(m); equals 4 at m=1 and
// 8(3m-1)(3m-2)(3m-3) / ((m-1)(2m+1)(2m+2)) for m >= 2.
Rational z_ratio(long m);

// q_{-1} = 3/8; q_{2k} = q_{2k+1} = Z(2k+2) / (12 * 54^k) for k >= 0.
Rational q_value(long k);

// Pair weight (8/3) q_{k1} q_{k2}, both k odd and >= 1.
Rational qq_value(long k1, long k2);

// q'_k = q_k + sum over ordered odd pairs (k1,k2), k1+k2=k, of qq(k1,k2).
// k even, >= 2.
Rational qprime_value(long k);

// Precomputed weights up to a cutoff, with exact tail masses.
//
// q entries run over k in [-1, cutoff].  The q' entries are quadratic to
// materialize (each one is a pair convolution), so they get their own,
// typically much smaller, cutoff; every consumer that needs q' beyond a
// small index range works through the closed-form tail identities instead.
class WeightTable {
 public:
  explicit WeightTable(long cutoff, long qprime_cutoff = -1);

  long cutoff() const { return cutoff_; }
  long qprime_cutoff() const { return qprime_cutoff_; }

  const Rational& q(long k) const;          // k in [-1, cutoff]
  const Rational& qprime(long k) const;     // even k in [2, qprime_cutoff]
  Rational qq(long k1, long k2) const { return qq_value(k1, k2); }

  // 1/8 - sum_{odd k < m} q_k  ==  sum_{odd k >= m} q_k;   1 <= m <= cutoff+2
  Rational tail_odd(long m) const;
  // 1/18 - sum_{even 2 <= k < m} q'_k;   even m <= qprime_cutoff+2
  Rational tail_qprime(long m) const;

  const Rational& selfparallel_mass() const { return selfparallel_mass_; }

  // Exact cumulative sums used by the tail identities and moment checks.
  Rational cum_odd(long m) const;          // sum_{odd k <= m} q_k
  Rational cum_even(long m) const;         // sum_{even 0 <= k <= m} q_k
  Rational cum_odd_weighted(long m) const; // sum_{odd k <= m} k q_k
  Rational cum_even_weighted(long m) const;

 private:
  long cutoff_;
  long qprime_cutoff_;
  Rational selfparallel_mass_;
  std::vector<Rational> q_;        // q_[k+1] = q(k), k from -1
  std::vector<Rational> qprime_;   // qprime_[k/2 - 1] = q'(k)
  // cumulative arrays indexed like q_ (entry at k+1 covers indices <= k)
  std::vector<Rational> cum_odd_;
  std::vector<Rational> cum_even_;
  std::vector<Rational> cum_odd_w_;
  std::vector<Rational> cum_even_w_;
  std::vector<Rational> cum_qprime_;  // sum_{even 2 <= j <= k} q'_j
};

// Exact moment identities of one peeling step.
struct MomentReport {
  Rational exposed_mean;            // closed form, must equal 2
  Rational total_mass;              // closed form, must equal 1
  Rational right_swallow_partial;   // exact partial sum of E(R+), < 1/2
  double right_tail_bound;          // advisory numeric bound on 1/2 - partial
  long cutoff;
  bool exposed_ok;
  bool mass_ok;
  bool right_ok;                    // partial < 1/2 and within tail bound
  bool ok() const { return exposed_ok && mass_ok && right_ok; }
};

// Requires table.cutoff() >= 10^4 for a meaningful right-swallow partial.
MomentReport moment_checks(const WeightTable& table);

}  // namespace quadperc
