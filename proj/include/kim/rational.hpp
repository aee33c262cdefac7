#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>

#include "kim/error.hpp"

namespace kim {

// Exact rational scalar used everywhere; GMP keeps numerator/denominator
// canonical (lowest terms, positive denominator).
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// The (int, int) mpq constructor does not canonicalize negative denominators;
// always build from Integer parts.
inline Rational rat(long long n, long long d = 1) {
  require(d != 0, "InvalidData", "zero denominator");
  return Rational(Integer(n), Integer(d));
}

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

// Parses "a", "-a/b" or "a/b"; whitespace around tokens is ignored.
Rational parse_rational(const std::string& s);

std::string to_string(const Rational& r);

Rational pow_rational(const Rational& base, long exp);

Rational factorial(unsigned n);

Rational binomial(unsigned n, unsigned k);

}  // namespace kim
