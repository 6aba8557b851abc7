#include "quadperc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace quadperc {

namespace {

Rational rat(long n, long d = 1) { return make_rational(n, d); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

Rational partition_z(long m) {
  require(m >= 1, "partition_z: m must be >= 1");
  if (m == 1) return rat(4, 3);
  // 8^m (3m-4)! / ((m-2)! (2m)!) evaluated exactly; the factorial quotient
  // (3m-4)!/(2m)! is accumulated as a falling product to keep operands small.
  Integer num = 1;
  mpz_ui_pow_ui(num.get_mpz_t(), 8, static_cast<unsigned long>(m));
  if (3 * m - 4 >= 2 * m + 1) {
    for (long i = 2 * m + 1; i <= 3 * m - 4; ++i) num *= i;
  }
  Integer den;
  mpz_fac_ui(den.get_mpz_t(), static_cast<unsigned long>(m - 2));
  if (3 * m - 4 < 2 * m) {
    // only m=2,3: (2m)!/(3m-4)! remains in the denominator
    for (long i = 3 * m - 3; i <= 2 * m; ++i) den *= i;
  }
  Rational z(num, den);
  z.canonicalize();
  return z;
}

Rational z_ratio(long m) {
  require(m >= 1, "z_ratio: m must be >= 1");
  if (m == 1) return rat(4);
  Rational r(8 * (3 * m - 1) * (3 * m - 2) * (3 * m - 3),
             (m - 1) * (2 * m + 1) * (2 * m + 2));
  r.canonicalize();
  return r;
}

Rational q_value(long k) {
  require(k >= -1, "q_value: k must be >= -1");
  if (k == -1) return rat(3, 8);
  long m = k / 2;
  Integer pow54;
  mpz_ui_pow_ui(pow54.get_mpz_t(), kAConstSquared,
                static_cast<unsigned long>(m));
  return partition_z(m + 1) / rat(kRho) / Rational(pow54);
}

Rational qq_value(long k1, long k2) {
  require(k1 >= 1 && k1 % 2 == 1, "qq_value: k1 must be odd and >= 1");
  require(k2 >= 1 && k2 % 2 == 1, "qq_value: k2 must be odd and >= 1");
  return rat(8, 3) * q_value(k1) * q_value(k2);
}

Rational qprime_value(long k) {
  require(k >= 2 && k % 2 == 0, "qprime_value: k must be even and >= 2");
  Rational sum = q_value(k);
  for (long k1 = 1; k1 < k; k1 += 2) sum += qq_value(k1, k - k1);
  return sum;
}

WeightTable::WeightTable(long cutoff, long qprime_cutoff)
    : cutoff_(cutoff),
      qprime_cutoff_(qprime_cutoff < 0 ? std::min<long>(cutoff, 128)
                                       : qprime_cutoff),
      selfparallel_mass_(rat(2, 9)) {
  require(cutoff >= 2, "WeightTable: cutoff must be >= 2");
  require(qprime_cutoff_ <= cutoff_, "WeightTable: qprime cutoff > cutoff");

  q_.reserve(cutoff_ + 2);
  q_.push_back(rat(3, 8));  // q(-1)
  Rational q_even = partition_z(1) / rat(kRho);  // q_0 = 1/9
  for (long k = 0; k <= cutoff_; ++k) {
    long m = k / 2;
    if (k >= 2 && k % 2 == 0) {
      // q_{2m} = q_{2m-2} * z_ratio(m) / 54
      q_even *= z_ratio(m);
      q_even /= kAConstSquared;
    }
    q_.push_back(q_even);
  }

  const Rational odd_total = rat(1, 8);
  const Rational even_total = rat(1, 8);
  cum_odd_.resize(q_.size());
  cum_even_.resize(q_.size());
  cum_odd_w_.resize(q_.size());
  cum_even_w_.resize(q_.size());
  Rational co = 0, ce = 0, cow = 0, cew = 0;
  cum_odd_[0] = 0;
  cum_even_[0] = 0;
  cum_odd_w_[0] = 0;
  cum_even_w_[0] = 0;
  for (long k = 0; k <= cutoff_; ++k) {
    if (k % 2 == 1) {
      co += q(k);
      cow += k * q(k);
      if (co >= odd_total)
        throw std::logic_error("WeightTable: odd partial sum reached 1/8");
    } else {
      ce += q(k);
      cew += k * q(k);
      if (ce >= even_total)
        throw std::logic_error("WeightTable: even partial sum reached 1/8");
    }
    cum_odd_[k + 1] = co;
    cum_even_[k + 1] = ce;
    cum_odd_w_[k + 1] = cow;
    cum_even_w_[k + 1] = cew;
  }

  // q'_k by pair convolution, quadratic in qprime_cutoff.
  const Rational qprime_total = rat(1, 18);
  Rational cq = 0;
  for (long k = 2; k <= qprime_cutoff_; k += 2) {
    Rational conv = 0;
    for (long k1 = 1; k1 < k; k1 += 2) conv += q(k1) * q(k - k1);
    Rational qp = q(k) + rat(8, 3) * conv;
    cq += qp;
    if (cq >= qprime_total)
      throw std::logic_error("WeightTable: q' partial sum reached 1/18");
    qprime_.push_back(qp);
    cum_qprime_.push_back(cq);
  }
}

const Rational& WeightTable::q(long k) const {
  require(k >= -1 && k <= cutoff_, "WeightTable::q: index out of range");
  return q_[k + 1];
}

const Rational& WeightTable::qprime(long k) const {
  require(k >= 2 && k % 2 == 0 && k <= qprime_cutoff_,
          "WeightTable::qprime: index out of range");
  return qprime_[k / 2 - 1];
}

Rational WeightTable::tail_odd(long m) const {
  require(m >= 1 && m <= cutoff_ + 2, "WeightTable::tail_odd: out of range");
  return rat(1, 8) - cum_odd(m - 1);
}

Rational WeightTable::tail_qprime(long m) const {
  require(m >= 2 && m % 2 == 0 && m <= qprime_cutoff_ + 2,
          "WeightTable::tail_qprime: out of range");
  if (m == 2) return rat(1, 18);
  return rat(1, 18) - cum_qprime_[(m - 2) / 2 - 1];
}

Rational WeightTable::cum_odd(long m) const {
  if (m < 1) return 0;
  require(m <= cutoff_, "WeightTable::cum_odd: out of range");
  return cum_odd_[m + 1];
}

Rational WeightTable::cum_even(long m) const {
  if (m < 0) return 0;
  require(m <= cutoff_, "WeightTable::cum_even: out of range");
  return cum_even_[m + 1];
}

Rational WeightTable::cum_odd_weighted(long m) const {
  if (m < 1) return 0;
  require(m <= cutoff_, "WeightTable::cum_odd_weighted: out of range");
  return cum_odd_w_[m + 1];
}

Rational WeightTable::cum_even_weighted(long m) const {
  if (m < 0) return 0;
  require(m <= cutoff_, "WeightTable::cum_even_weighted: out of range");
  return cum_even_w_[m + 1];
}

MomentReport moment_checks(const WeightTable& table) {
  MomentReport rep;
  rep.cutoff = table.cutoff();

  // Closed forms via the tail identities:
  //   total: 3/8 + 2/9 + 2*(1/8) + 2*(1/18) + 1/24
  //   E(E):  3*(3/8) + 1*(2/9) + 2*(2/8) + 1*(2/18) + 1*(1/24)
  Rational three = rat(3, 8), self = table.selfparallel_mass();
  Rational one_fresh_side = rat(1, 8), no_fresh_side = rat(1, 18);
  Rational pair_opposite = rat(1, 24);
  rep.total_mass =
      three + self + 2 * one_fresh_side + 2 * no_fresh_side + pair_opposite;
  rep.exposed_mean = 3 * three + self + 2 * (2 * one_fresh_side) +
                     2 * no_fresh_side + pair_opposite;
  rep.mass_ok = rep.total_mass == 1;
  rep.exposed_ok = rep.exposed_mean == 2;

  // E(R+) restricted to swallow indices <= N.  The same-side and
  // opposite-side pocket pairs contribute through products of cumulative
  // sums, so no q' materialization is needed:
  //   one fresh:        sum_{odd k<=N} k q_k
  //   even single:      sum_{even k<=N} k q_k
  //   pairs (RR + RL):  (16/3 + 8/3) * S1(N) * C(N)
  long n = table.cutoff();
  Rational s1 = table.cum_odd_weighted(n);
  Rational c = table.cum_odd(n);
  rep.right_swallow_partial =
      s1 + table.cum_even_weighted(n) + rat(8) * s1 * c;

  Rational gap = rat(1, 2) - rep.right_swallow_partial;
  // Advisory bound from the empirical q_k k^{5/2} window; not a proof.
  double bound = 2.0 * 0.25 * 2.0 / std::sqrt(static_cast<double>(n));
  rep.right_tail_bound = bound;
  rep.right_ok = gap > 0 && to_double(gap) <= bound;
  return rep;
}

}  // namespace quadperc
