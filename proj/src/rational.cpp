#include "kim/rational.hpp"

#include <algorithm>
#include <cctype>

namespace kim {

Rational parse_rational(const std::string& s) {
  std::string t;
  t.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  require(!t.empty(), "InvalidData", "empty rational literal");
  try {
    auto slash = t.find('/');
    if (slash == std::string::npos) return Rational(Integer(t));
    Integer num(t.substr(0, slash));
    Integer den(t.substr(slash + 1));
    require(den != 0, "InvalidData", "zero denominator in '" + s + "'");
    return Rational(num, den);
  } catch (const std::exception&) {
    fail("InvalidData", "malformed rational literal '" + s + "'");
  }
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational pow_rational(const Rational& base, long exp) {
  if (exp == 0) return 1;
  if (exp < 0) {
    require(base != 0, "InvalidData", "0 raised to a negative power");
    return 1 / pow_rational(base, -exp);
  }
  Rational acc = 1, b = base;
  long e = exp;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

Rational factorial(unsigned n) {
  Rational acc = 1;
  for (unsigned i = 2; i <= n; ++i) acc *= i;
  return acc;
}

Rational binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Rational acc = 1;
  for (unsigned i = 0; i < k; ++i) acc *= Rational(n - i, i + 1);
  return acc;
}

}  // namespace kim
