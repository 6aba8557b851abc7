#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <utility>
#include <vector>

#include "quadperc/word.hpp"

namespace quadperc {

// Mass of one transition as a polynomial a + b p + c p^2.  Aggregating the
// peeling events per source word gives masses at most quadratic in p, with
// exact rational coefficients independent of p.
struct TransitionPoly {
  Rational a, b, c;
  Rational eval(const Rational& p) const { return a + p * (b + p * c); }
  double eval(double p) const {
    return to_double(a) + p * (to_double(b) + p * to_double(c));
  }
};

// Exact transition matrix at a rational parameter p.  Row sums are checked
// to be exactly 1 on construction.
struct RationalTransitionMatrix {
  Rational p;
  long n = 0;
  std::vector<std::vector<std::pair<long, Rational>>> rows;
};

struct StationaryDist {
  std::vector<double> pi;
  double residual = 0;  // max |piP - pi|
};

// m[j]: stationary probability that position j is defined and white;
// u[j]: probability that the word is shorter than j.  Index 0 and 1 unused.
struct MarginalReport {
  std::vector<double> m;
  std::vector<double> u;
};

struct AlphaBounds {
  double lb = 0;
  double ub = 0;
};

// Truncated boundary chain at capacity K: state enumeration, transition
// polynomial, stationary solves and the drift brackets.  Construction does
// all p-independent work once, so sweeping p is cheap.  Solves reuse the
// p-independent sparsity analysis through a Scratch; independent Scratches
// make concurrent solves safe.
class ChainContext {
 public:
  ChainContext(long capacity, const WeightTable& table);

  long capacity() const { return capacity_; }
  const StateSpace& space() const { return space_; }
  const std::vector<std::vector<std::pair<long, TransitionPoly>>>& poly_rows()
      const {
    return rows_;
  }

  RationalTransitionMatrix rational_matrix(const Rational& p) const;

  struct Scratch;
  std::shared_ptr<Scratch> make_scratch() const;

  // Direct sparse solve of pi P = pi, normalized; falls back to averaged
  // power iteration if the residual target 1e-12 is missed.  The one-argument
  // form uses an internal scratch and is not safe to call concurrently.
  StationaryDist stationary(double p) const;
  StationaryDist stationary(double p, Scratch& scratch) const;

  // Exact stationary distribution by rational Gaussian elimination.
  // Intended as a small-K oracle (cost grows as n^3 bignum operations).
  std::vector<Rational> stationary_exact(const Rational& p) const;

  MarginalReport marginals(const StationaryDist& dist) const;

  AlphaBounds alpha_bounds(double p) const;
  AlphaBounds alpha_bounds(double p, Scratch& scratch) const;
  AlphaBounds alpha_bounds(double p, const MarginalReport& mr) const;

 private:
  void build_rows(const WeightTable& table);

  struct PolyDbl {
    long target;
    double a, b, c;
    double eval(double p) const { return a + p * (b + p * c); }
  };

  long capacity_;
  StateSpace space_;
  std::vector<std::vector<std::pair<long, TransitionPoly>>> rows_;
  std::vector<std::vector<PolyDbl>> rows_dbl_;  // same data, double coeffs
  std::vector<double> q_dbl_;        // q_k, k in [1, K]
  std::vector<double> qprime_dbl_;   // q'_k for even k in [2, K]
  double tail_odd_k_ = 0;            // sum_{odd k >= K} q_k
  double tail_qprime_k_ = 0;         // sum_{even k >= K} q'_k

  // Template triplet list for (P - I)^T with the normalization row; values
  // at value_slot positions are rewritten per p.
  std::vector<Eigen::Triplet<double>> base_triplets_;
  std::vector<long> value_slots_;
  mutable std::shared_ptr<Scratch> default_scratch_;
};

// Free-function conveniences over ChainContext.
inline StateSpace enumerate_states(long capacity) { return StateSpace(capacity); }

RationalTransitionMatrix build_transition_matrix(const StateSpace& space,
                                                 const Rational& p,
                                                 const WeightTable& table);

AlphaBounds alpha_bounds(double p, long capacity, const WeightTable& table);

// Weight table sized for a capacity-K chain (never reads past index K+1).
WeightTable chain_weight_table(long capacity);

}  // namespace quadperc
