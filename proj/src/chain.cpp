#include "quadperc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace quadperc {

namespace {

Rational rat(long n, long d = 1) { return make_rational(n, d); }

long even_ceil(long m) { return m % 2 == 0 ? m : m + 1; }

}  // namespace

struct ChainContext::Scratch {
  std::vector<Eigen::Triplet<double>> triplets;  // copy of the base template
  Eigen::SparseMatrix<double> matrix;            // (P - I)^T with ones row 0
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  // per-p flattened transition masses (CSR-like)
  std::vector<long> flat_target;
  std::vector<double> flat_mass;
  std::vector<long> flat_row_end;
};

std::shared_ptr<ChainContext::Scratch> ChainContext::make_scratch() const {
  auto s = std::make_shared<Scratch>();
  s->triplets = base_triplets_;
  s->matrix.resize(static_cast<int>(space_.size()),
                   static_cast<int>(space_.size()));
  return s;
}

ChainContext::ChainContext(long capacity, const WeightTable& table)
    : capacity_(capacity), space_(capacity) {
  if (table.cutoff() < capacity + 1 || table.qprime_cutoff() < capacity)
    throw std::domain_error("ChainContext: weight table cutoff too small");
  build_rows(table);

  q_dbl_.assign(capacity_ + 1, 0.0);
  qprime_dbl_.assign(capacity_ + 1, 0.0);
  for (long k = 1; k <= capacity_; ++k) {
    q_dbl_[k] = to_double(table.q(k));
    if (k >= 2 && k % 2 == 0) qprime_dbl_[k] = to_double(table.qprime(k));
  }
  tail_odd_k_ = to_double(table.tail_odd(capacity_));
  tail_qprime_k_ = to_double(table.tail_qprime(even_ceil(capacity_)));
}

void ChainContext::build_rows(const WeightTable& table) {
  const long n = space_.size();
  rows_.resize(n);
  const Rational zero = 0;

  for (long i = 0; i < n; ++i) {
    const BoundaryWord w = space_.word(i);
    const long width = w.length();
    std::map<long, TransitionPoly> acc;
    auto add = [&](const BoundaryWord& target, const Rational& a,
                   const Rational& b, const Rational& c) {
      TransitionPoly& t = acc[space_.index(target)];
      t.a += a;
      t.b += b;
      t.c += c;
    };
    auto trunc = [&](const BoundaryWord& v) { return v.truncated(capacity_); };

    // no swallow: stay p^2*(3/8) + 2/9 + p*(1/8) + 1/18, and the prepends
    add(w, rat(2, 9) + rat(1, 18), rat(1, 8), rat(3, 8));
    add(trunc(w.prepended(Letter::black)), rat(1, 8), rat(1, 4), rat(-3, 8));
    add(trunc(w.prepended(Letter::white).prepended(Letter::black)), zero,
        rat(3, 8), rat(-3, 8));
    add(trunc(w.prepended(Letter::black).prepended(Letter::black)), rat(3, 8),
        rat(-3, 4), rat(3, 8));

    // left swallows readable inside the word
    for (long k = 1; k <= width - 1; ++k) {
      bool white_next = w.at(k + 1) == Letter::white;
      BoundaryWord shift_target = w.dropped(white_next ? k + 1 : k);
      if (k % 2 == 1) {
        // one-fresh chi=1 (mass p q_k) plus the pair marginal (q_k/3)
        add(shift_target, table.q(k) / 3, table.q(k), zero);
        // one-fresh chi=0: buried letter resurfaces behind a fresh black
        add(trunc(w.dropped(k).prepended(Letter::black)), table.q(k),
            -table.q(k), zero);
      } else {
        add(shift_target, table.qprime(k), zero, zero);
      }
    }

    // left swallows beyond the stored word: reset
    add(BoundaryWord::single_black(),
        rat(4, 3) * table.tail_odd(width) +
            table.tail_qprime(even_ceil(width)),
        zero, zero);

    rows_[i].assign(acc.begin(), acc.end());
  }

  rows_dbl_.resize(n);
  for (long i = 0; i < n; ++i)
    for (const auto& [j, poly] : rows_[i])
      rows_dbl_[i].push_back(
          {j, to_double(poly.a), to_double(poly.b), to_double(poly.c)});

  // Fixed sparsity pattern for the solver: columns indexed by source state,
  // equations by target state, row 0 replaced by the normalization.
  const long nn = n;
  for (long i = 0; i < nn; ++i)
    base_triplets_.emplace_back(0, static_cast<int>(i), 1.0);
  for (long i = 0; i < nn; ++i) {
    if (i != 0)
      base_triplets_.emplace_back(static_cast<int>(i), static_cast<int>(i),
                                  -1.0);
    for (const auto& [j, poly] : rows_[i]) {
      if (j == 0) continue;
      value_slots_.push_back(static_cast<long>(base_triplets_.size()));
      base_triplets_.emplace_back(static_cast<int>(j), static_cast<int>(i),
                                  0.0);
    }
  }
}

RationalTransitionMatrix ChainContext::rational_matrix(const Rational& p) const {
  RationalTransitionMatrix m;
  m.p = p;
  m.n = space_.size();
  m.rows.resize(m.n);
  for (long i = 0; i < m.n; ++i) {
    Rational row_sum = 0;
    for (const auto& [j, poly] : rows_[i]) {
      Rational mass = poly.eval(p);
      if (mass < 0)
        throw std::logic_error("transition matrix: negative mass");
      row_sum += mass;
      m.rows[i].emplace_back(j, std::move(mass));
    }
    if (row_sum != 1)
      throw std::logic_error("transition matrix: row sum is not exactly 1");
  }
  return m;
}

StationaryDist ChainContext::stationary(double p) const {
  if (!default_scratch_) default_scratch_ = make_scratch();
  return stationary(p, *default_scratch_);
}

namespace {

// Direct LU fill-in grows steeply with the state count here (the suffix
// drops couple everything), while plain power iteration converges in a few
// hundred steps; past this size iteration is the primary method and the
// direct solve the rescue path.
constexpr long kDirectSolveMaxStates = 1500;

}  // namespace

StationaryDist ChainContext::stationary(double p, Scratch& s) const {
  const long n = space_.size();

  // Flatten the masses at this p once; both methods reuse them.
  s.flat_target.clear();
  s.flat_mass.clear();
  s.flat_row_end.clear();
  for (long i = 0; i < n; ++i) {
    for (const auto& e : rows_dbl_[i]) {
      s.flat_target.push_back(e.target);
      s.flat_mass.push_back(e.eval(p));
    }
    s.flat_row_end.push_back(static_cast<long>(s.flat_target.size()));
  }

  auto clean = [&](std::vector<double>& pi) {
    double sum = 0;
    for (double& v : pi) {
      if (v < 0) v = 0;
      sum += v;
    }
    for (double& v : pi) v /= sum;
  };
  auto multiply = [&](const std::vector<double>& pi, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    long idx = 0;
    for (long i = 0; i < n; ++i) {
      double v = pi[i];
      long end = s.flat_row_end[i];
      for (; idx < end; ++idx) out[s.flat_target[idx]] += v * s.flat_mass[idx];
    }
  };
  auto residual = [&](const std::vector<double>& pi) {
    std::vector<double> out_pi(n);
    multiply(pi, out_pi);
    double r = 0;
    for (long j = 0; j < n; ++j) r = std::max(r, std::abs(out_pi[j] - pi[j]));
    return r;
  };

  auto direct_solve = [&](StationaryDist& out) {
    long slot = 0, idx = 0;
    for (long i = 0; i < n; ++i) {
      long begin = i == 0 ? 0 : s.flat_row_end[i - 1];
      for (idx = begin; idx < s.flat_row_end[i]; ++idx) {
        if (s.flat_target[idx] == 0) continue;
        auto& t = s.triplets[value_slots_[slot++]];
        t = Eigen::Triplet<double>(t.row(), t.col(), s.flat_mass[idx]);
      }
    }
    s.matrix.setFromTriplets(s.triplets.begin(), s.triplets.end());
    if (!s.analyzed) {
      s.lu.analyzePattern(s.matrix);
      s.analyzed = true;
    }
    s.lu.factorize(s.matrix);
    if (s.lu.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[0] = 1.0;
    Eigen::VectorXd x = s.lu.solve(rhs);
    if (s.lu.info() != Eigen::Success) return false;
    out.pi.assign(x.data(), x.data() + n);
    clean(out.pi);
    out.residual = residual(out.pi);
    return true;
  };

  auto iterate = [&](StationaryDist& out) {
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), nxt(n);
    double diff = 1.0;
    for (long iter = 1; iter <= 100000 && diff > 1e-13; ++iter) {
      multiply(pi, nxt);
      diff = 0;
      for (long j = 0; j < n; ++j)
        diff = std::max(diff, std::abs(nxt[j] - pi[j]));
      pi.swap(nxt);
      if (iter % 128 == 0) clean(pi);
    }
    clean(pi);
    out.pi = std::move(pi);
    out.residual = residual(out.pi);
    return out.residual <= 1e-12;
  };

  StationaryDist out;
  if (n <= kDirectSolveMaxStates) {
    if (direct_solve(out) && out.residual <= 1e-12) return out;
    if (iterate(out)) return out;
  } else {
    if (iterate(out)) return out;
    if (direct_solve(out) && out.residual <= 1e-12) return out;
  }
  throw std::runtime_error(
      "stationary: residual target 1e-12 not reached (residual " +
      std::to_string(out.residual) + " at n=" + std::to_string(n) + ")");
}

std::vector<Rational> ChainContext::stationary_exact(const Rational& p) const {
  RationalTransitionMatrix m = rational_matrix(p);
  const long n = m.n;
  // Equations: column j of (P - I) for j >= 1, plus normalization as row 0.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (long i = 0; i < n; ++i) a[0][i] = 1;
  a[0][n] = 1;
  for (long i = 0; i < n; ++i) {
    for (const auto& [j, mass] : m.rows[i]) {
      if (j != 0) a[j][i] += mass;
    }
    if (i != 0) a[i][i] -= 1;
  }
  // Gaussian elimination with first nonzero pivot.
  for (long col = 0; col < n; ++col) {
    long piv = -1;
    for (long r = col; r < n; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("stationary_exact: singular system");
    std::swap(a[col], a[piv]);
    for (long r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (long c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<Rational> pi(n);
  for (long i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

MarginalReport ChainContext::marginals(const StationaryDist& dist) const {
  MarginalReport mr;
  mr.m.assign(capacity_ + 1, 0.0);
  mr.u.assign(capacity_ + 1, 0.0);
  for (long i = 0; i < space_.size(); ++i) {
    const BoundaryWord& w = space_.word(i);
    for (long j = 2; j <= capacity_; ++j) {
      if (w.length() < j)
        mr.u[j] += dist.pi[i];
      else if (w.at(j) == Letter::white)
        mr.m[j] += dist.pi[i];
    }
  }
  return mr;
}

AlphaBounds ChainContext::alpha_bounds(double p, const MarginalReport& mr) const {
  double beta_lb = 0, beta_ub = 0;
  for (long k = 1; k <= capacity_ - 1; ++k) {
    double coef = (k % 2 == 1) ? (p + 1.0 / 3.0) * q_dbl_[k] : qprime_dbl_[k];
    beta_lb += mr.m[k + 1] * coef;
    beta_ub += (mr.m[k + 1] + p * mr.u[k + 1]) * coef;
  }
  beta_ub += p * ((p + 1.0 / 3.0) * tail_odd_k_ + tail_qprime_k_);
  double base = 0.375 * p * p + 0.625 * p - 0.5;
  return {base + beta_lb, base + beta_ub};
}

AlphaBounds ChainContext::alpha_bounds(double p) const {
  return alpha_bounds(p, marginals(stationary(p)));
}

AlphaBounds ChainContext::alpha_bounds(double p, Scratch& scratch) const {
  return alpha_bounds(p, marginals(stationary(p, scratch)));
}

RationalTransitionMatrix build_transition_matrix(const StateSpace& space,
                                                 const Rational& p,
                                                 const WeightTable& table) {
  ChainContext ctx(space.capacity(), table);
  return ctx.rational_matrix(p);
}

AlphaBounds alpha_bounds(double p, long capacity, const WeightTable& table) {
  return ChainContext(capacity, table).alpha_bounds(p);
}

WeightTable chain_weight_table(long capacity) {
  long cutoff = std::max<long>(2 * capacity, 4);
  return WeightTable(cutoff, cutoff);
}

}  // namespace quadperc
