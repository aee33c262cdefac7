#include "kim/formalgroup.hpp"

#include "kim/error.hpp"

namespace kim::formalgroup {

Rational WeierstrassCurve::discriminant() const {
  Rational b2 = a1 * a1 + 4 * a2;
  Rational b4 = 2 * a4 + a1 * a3;
  Rational b6 = a3 * a3 + 4 * a6;
  Rational b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

void WeierstrassCurve::validate() const {
  require(discriminant() != 0, "SingularCurve", "the Weierstrass discriminant vanishes");
}

TruncSeries w_series(const WeierstrassCurve& c, unsigned order) {
  c.validate();
  std::vector<std::string> tv{"t"};
  TruncSeries t = TruncSeries::variable(tv, 0, order);
  TruncSeries t3 = t * t * t;
  TruncSeries w = t3;
  // w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3; each pass gains
  // at least one order of t-adic precision
  for (unsigned k = 0; k < order; ++k) {
    TruncSeries w2 = w * w;
    TruncSeries next = t3 + (t * w) * c.a1 + (t * t * w) * c.a2 + w2 * c.a3 +
                       (t * w2) * c.a4 + (w2 * w) * c.a6;
    if (next == w) break;
    w = next;
  }
  return w;
}

namespace {

// v = w / t^3, a unit series.
TruncSeries unit_part(const TruncSeries& w, unsigned order) {
  std::vector<std::string> tv{"t"};
  TruncSeries v(tv, order);
  for (auto& [e, c] : w.terms()) {
    require(e[0] >= 3, "InvalidData", "w series must vanish to order 3");
    Exps ne{e[0] - 3};
    v.set_coeff(ne, c);
  }
  return v;
}

}  // namespace

TruncSeries invariant_differential(const WeierstrassCurve& c, unsigned order) {
  // With x t^2 = 1/v and y t^3 = -1/v:
  //   t^3 x'           = -2/v - t v'/v^2
  //   t^3 (2y + a1 x + a3) = -2/v + a1 t / v + a3 t^3
  std::vector<std::string> tv{"t"};
  TruncSeries w = w_series(c, order + 4);
  TruncSeries v = unit_part(w, order + 1);
  TruncSeries vinv = v.inverse();
  TruncSeries t = TruncSeries::variable(tv, 0, order + 1);
  TruncSeries num = vinv * Rational(-2) - t * v.derivative(0) * vinv * vinv;
  TruncSeries den = vinv * Rational(-2) + (t * vinv) * c.a1 + (t * t * t) * c.a3;
  return (num * den.inverse()).truncate(order);
}

TruncSeries formal_log(const WeierstrassCurve& c, unsigned order) {
  require(order >= 2, "InvalidData", "log needs order at least 2");
  TruncSeries omega = invariant_differential(c, order - 1);
  TruncSeries log({"t"}, order);
  for (auto& [e, coeff] : omega.terms()) log.set_coeff({e[0] + 1}, coeff / Rational(e[0] + 1));
  return log;
}

TruncSeries formal_exp(const TruncSeries& log) {
  return reversion(log);  // raises BadLeadingTerm unless log = t + O(t^2)
}

FormalLogPair formal_log_pair(const WeierstrassCurve& c, unsigned order) {
  FormalLogPair out;
  out.log = formal_log(c, order);
  out.exp = formal_exp(out.log);
  return out;
}

TruncSeries formal_group_law(const WeierstrassCurve& c, unsigned order) {
  c.validate();
  std::vector<std::string> bv{"t1", "t2"};
  unsigned work = order + 4;
  TruncSeries w = w_series(c, work);
  TruncSeries t1 = TruncSeries::variable(bv, 0, work);
  TruncSeries t2 = TruncSeries::variable(bv, 1, work);

  // lambda = (w(t2) - w(t1)) / (t2 - t1) via divided differences of powers
  TruncSeries lambda(bv, work);
  for (auto& [e, coeff] : w.terms()) {
    // (t2^k - t1^k)/(t2 - t1) = sum_{i+j=k-1} t1^i t2^j
    uint32_t k = e[0];
    for (uint32_t i = 0; i + 1 <= k - 1 + 1 && i <= k - 1; ++i) {
      Exps ne{i, k - 1 - i};
      if (total_degree(ne) < work) {
        Rational cur = lambda.coeff(ne);
        lambda.set_coeff(ne, cur + coeff);
      }
    }
  }
  std::vector<TruncSeries> t1_args{t1};
  TruncSeries w1 = w.substitute(t1_args);
  TruncSeries nu = w1 - lambda * t1;

  // substitute w = lambda t + nu into the Weierstrass relation; the cubic in t
  // has roots t1, t2, t3 with sum -A2/A3
  TruncSeries one(bv, work, 1);
  TruncSeries a3num = one + lambda * c.a2 + lambda * lambda * c.a4 +
                      lambda * lambda * lambda * c.a6;
  TruncSeries a2num = lambda * c.a1 + nu * c.a2 + lambda * lambda * c.a3 +
                      (lambda * nu) * (2 * c.a4) + (lambda * lambda * nu) * (3 * c.a6);
  TruncSeries t3 = (a2num * a3num.inverse()) * Rational(-1) - t1 - t2;

  // inverse point in the t coordinate: i(t) = t / (-1 + a1 t + a3 t^3 v(t))
  unsigned uniorder = work;
  TruncSeries v = unit_part(w_series(c, uniorder + 4), uniorder);
  std::vector<std::string> tv{"t"};
  TruncSeries t = TruncSeries::variable(tv, 0, uniorder);
  TruncSeries den(tv, uniorder, -1);
  den += (t * c.a1 + (t * t * t) * v * c.a3);
  TruncSeries inv_map = t * den.inverse();

  std::vector<TruncSeries> args{t3};
  return inv_map.substitute(args).truncate(order);
}

}  // namespace kim::formalgroup
