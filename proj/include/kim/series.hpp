#pragma once

#include <string>
#include <vector>

#include "kim/polynomial.hpp"

namespace kim {

// Multivariate power series with exact rational coefficients, truncated at
// total degree < order(). Arithmetic closes at the weaker of the two orders.
class TruncSeries {
public:
  TruncSeries() = default;
  TruncSeries(std::vector<std::string> vars, unsigned order);
  TruncSeries(std::vector<std::string> vars, unsigned order, const Rational& c);

  static TruncSeries variable(const std::vector<std::string>& vars, size_t index, unsigned order);
  static TruncSeries from_polynomial(const Polynomial& p, unsigned order);

  const std::vector<std::string>& vars() const { return vars_; }
  unsigned order() const { return order_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coeff(const Exps& e) const;
  Rational constant_term() const;

  void set_coeff(const Exps& e, const Rational& c);

  TruncSeries operator-() const;
  TruncSeries operator+(const TruncSeries& o) const;
  TruncSeries operator-(const TruncSeries& o) const;
  TruncSeries operator*(const TruncSeries& o) const;
  TruncSeries& operator+=(const TruncSeries& o) { return *this = *this + o; }
  TruncSeries& operator-=(const TruncSeries& o) { return *this = *this - o; }
  TruncSeries& operator*=(const TruncSeries& o) { return *this = *this * o; }
  TruncSeries operator*(const Rational& c) const;
  bool operator==(const TruncSeries& o) const;

  TruncSeries truncate(unsigned new_order) const;
  TruncSeries inverse() const;  // requires nonzero constant term
  TruncSeries derivative(size_t var) const;
  // Extracts the homogeneous part of the given total degree.
  TruncSeries homogeneous_part(unsigned degree) const;
  // Substitutes args[i] for vars()[i]; all args share one variable list.
  TruncSeries substitute(const std::vector<TruncSeries>& args) const;

  std::string str() const;

private:
  std::vector<std::string> vars_;
  unsigned order_ = 0;
  TermMap terms_;

  void drop_high_terms();
};

TruncSeries parse_series(const std::vector<std::string>& vars, unsigned order,
                         const std::string& text);

// Taylor expansion at `base` in shifted variables t_i = z_i - base_i, exact
// to total degree < order. The shifted variable names replace the leading
// alphabetic run with "t" (z -> t, z2 -> t2). Raises PoleAtBase when a
// denominator vanishes at the base point.
TruncSeries jet_expand(const RationalFunction& f, const std::vector<Rational>& base,
                       unsigned order);
TruncSeries jet_expand(const Polynomial& p, const std::vector<Rational>& base, unsigned order);

std::vector<std::string> shifted_var_names(const std::vector<std::string>& vars);

// Univariate compositional inverse of a series t + O(t^2).
TruncSeries reversion(const TruncSeries& f);

}  // namespace kim
