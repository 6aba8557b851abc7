#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace quadperc {

// Exact fraction, always in lowest terms with positive denominator.
// mpq_class keeps arithmetic results canonical as long as the operands are.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Serialized form is always "numerator/denominator", including "/1".
inline std::string to_fraction_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rational fraction_from_string(const std::string& s) {
  Rational r(s);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace quadperc
