#pragma once

#include "kim/series.hpp"

namespace kim::formalgroup {

struct WeierstrassCurve {
  Rational a1, a2, a3, a4, a6;

  Rational discriminant() const;
  void validate() const;  // SingularCurve when the discriminant vanishes
};

struct FormalLogPair {
  TruncSeries log;  // t + O(t^2)
  TruncSeries exp;  // compositional inverse at truncation
};

// w(t) = t^3 (1 + ...) solving the Weierstrass relation in the parameter
// t = -x/y, w = -1/y.
TruncSeries w_series(const WeierstrassCurve& c, unsigned order);

// Expansion of the invariant differential dx / (2y + a1 x + a3) in t.
TruncSeries invariant_differential(const WeierstrassCurve& c, unsigned order);

// Termwise integral of the invariant differential; leading term t.
TruncSeries formal_log(const WeierstrassCurve& c, unsigned order);

// Compositional inverse of a logarithm t + O(t^2). BadLeadingTerm otherwise.
TruncSeries formal_exp(const TruncSeries& log);

FormalLogPair formal_log_pair(const WeierstrassCurve& c, unsigned order);

// The formal group law F(t1, t2) derived from the chord construction on the
// curve, as a bivariate series to total degree < order.
TruncSeries formal_group_law(const WeierstrassCurve& c, unsigned order);

}  // namespace kim::formalgroup
