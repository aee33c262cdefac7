#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kim/rational.hpp"

namespace kim {

// Exponent vector; length equals the owning object's variable count.
using Exps = std::vector<uint32_t>;

inline uint32_t total_degree(const Exps& e) {
  uint32_t d = 0;
  for (auto x : e) d += x;
  return d;
}

// Graded lexicographic order on the declared variable order: higher total
// degree first, ties broken lexicographically with earlier variables larger.
struct GrlexGreater {
  bool operator()(const Exps& a, const Exps& b) const {
    uint32_t da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;  // lexicographic on exponents, earlier variable dominant
  }
};

using TermMap = std::map<Exps, Rational, GrlexGreater>;

class RationalFunction;

// Sparse multivariate polynomial with exact rational coefficients over an
// ordered variable list. Zero coefficients are never stored.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}
  Polynomial(std::vector<std::string> vars, const Rational& c);

  static Polynomial variable(const std::vector<std::string>& vars, size_t index);
  static Polynomial constant(const std::vector<std::string>& vars, const Rational& c);

  const std::vector<std::string>& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant()
  uint32_t degree() const;          // total degree; 0 for the zero polynomial

  void set_term(const Exps& e, const Rational& c);
  void add_term(const Exps& e, const Rational& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial& operator*=(const Rational& c);
  Polynomial operator*(const Rational& c) const;
  bool operator==(const Polynomial& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }

  Polynomial pow(unsigned e) const;
  Polynomial derivative(size_t var) const;
  Rational eval(const std::vector<Rational>& point) const;
  // Evaluation with rational-function arguments (all over a common list).
  RationalFunction eval_rational(const std::vector<RationalFunction>& args) const;

  // Exact division; nullopt-style via success flag. Used for normalization.
  bool divide_exact(const Polynomial& divisor, Polynomial& quotient) const;

  // Content = gcd of coefficients with the sign of the leading term.
  Rational content() const;

  // Renames/extends the variable list; `map[i]` is the index of vars()[i]
  // inside `new_vars`.
  Polynomial with_vars(const std::vector<std::string>& new_vars) const;

  std::string str() const;  // "c * v1^a1*v2^a2 + ..." in canonical order

private:
  std::vector<std::string> vars_;
  TermMap terms_;

  void check_same(const Polynomial& o) const;
};

Polynomial parse_polynomial(const std::vector<std::string>& vars, const std::string& text);

// Pair of polynomials num/den with den != 0. Normalization cancels monomial
// and content factors, attempts exact division, and runs Euclid's algorithm
// when both parts are univariate in the same variable. Equality is always
// decided by cross multiplication, so normalization is cosmetic.
class RationalFunction {
public:
  RationalFunction();
  RationalFunction(int c);  // constant over the empty variable list (Eigen scalar hook)
  explicit RationalFunction(Polynomial num);
  RationalFunction(Polynomial num, Polynomial den);

  static RationalFunction constant(const std::vector<std::string>& vars, const Rational& c);
  static RationalFunction variable(const std::vector<std::string>& vars, size_t index);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  const std::vector<std::string>& vars() const { return num_.vars(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const;

  RationalFunction operator-() const;
  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator*(const Rational& c) const;
  RationalFunction operator/(const RationalFunction& o) const;
  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

  bool operator==(const RationalFunction& o) const;  // cross-multiplied identity
  bool operator!=(const RationalFunction& o) const { return !(*this == o); }

  RationalFunction derivative(size_t var) const;
  Rational eval(const std::vector<Rational>& point) const;  // PoleAtBase on zero den
  RationalFunction with_vars(const std::vector<std::string>& new_vars) const;

  std::string str() const;

private:
  Polynomial num_, den_;
  void normalize();
  // Promotes empty-variable constants so mixed-arity arithmetic works; any
  // other variable mismatch is an error.
  static void align(RationalFunction& a, RationalFunction& b);
};

// Scalar field hooks so Eigen matrices and the elimination in linalg.hpp
// work over rational functions.
inline RationalFunction operator*(const Rational& c, const RationalFunction& f) {
  return RationalFunction::constant(f.vars(), c) * f;
}

std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

}  // namespace kim

namespace Eigen {
template <>
struct NumTraits<kim::RationalFunction> {
  using Real = kim::RationalFunction;
  using NonInteger = kim::RationalFunction;
  using Nested = kim::RationalFunction;
  using Literal = kim::RationalFunction;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 100,
    MulCost = 100
  };
  static int digits10() { return 0; }
};
}  // namespace Eigen
