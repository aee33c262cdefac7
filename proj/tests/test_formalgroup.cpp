#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kim/formalgroup.hpp"

using namespace kim;
using namespace kim::formalgroup;

namespace {

// Independent oracle: solve the Weierstrass relation for u with x = u/t^2,
// y = -u/t^3 by Newton iteration on
//   F(u) = u^3 + a2 t^2 u^2 + a4 t^4 u + a6 t^6 - u^2 + a1 t u^2 + a3 t^3 u.
TruncSeries oracle_log(const WeierstrassCurve& c, unsigned order) {
  std::vector<std::string> tv{"t"};
  unsigned work = order + 2;
  TruncSeries t = TruncSeries::variable(tv, 0, work);
  TruncSeries t2 = t * t, t3 = t2 * t, t4 = t3 * t, t6 = t3 * t3;
  TruncSeries u(tv, work, 1);
  for (unsigned k = 0; k < 8; ++k) {
    TruncSeries f = u * u * u + t2 * u * u * c.a2 + t4 * u * c.a4 + t6 * c.a6 - u * u +
                    (t * u * u) * c.a1 + (t3 * u) * c.a3;
    TruncSeries fp = u * u * Rational(3) + (t2 * u) * (2 * c.a2) + t4 * c.a4 -
                     u * Rational(2) + (t * u) * (2 * c.a1) + t3 * c.a3;
    u = u - f * fp.inverse();
  }
  // omega = (-2u + t u') / (-2u + a1 t u + a3 t^3)
  TruncSeries num = u * Rational(-2) + t * u.derivative(0);
  TruncSeries den = u * Rational(-2) + (t * u) * c.a1 + t3 * c.a3;
  TruncSeries omega = (num * den.inverse()).truncate(order - 1);
  TruncSeries log(tv, order);
  for (auto& [e, coeff] : omega.terms()) log.set_coeff({e[0] + 1}, coeff / Rational(e[0] + 1));
  return log;
}

WeierstrassCurve random_nonsingular(std::mt19937& rng) {
  std::uniform_int_distribution<int> coef(-3, 3);
  while (true) {
    WeierstrassCurve c{coef(rng), coef(rng), coef(rng), coef(rng), coef(rng)};
    if (c.discriminant() != 0) return c;
  }
}

}  // namespace

TEST_CASE("discriminant and the singular rejection") {
  WeierstrassCurve cusp{0, 0, 0, 0, 0};
  CHECK(cusp.discriminant() == 0);
  CHECK_THROWS_WITH_AS(formal_log(cusp, 8), doctest::Contains("SingularCurve"), Error);
  WeierstrassCurve e{0, 0, 0, 1, 0};  // y^2 = x^3 + x
  CHECK(e.discriminant() != 0);
}

TEST_CASE("logarithm normalization and parity") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    auto c = random_nonsingular(rng);
    TruncSeries log = formal_log(c, 9);
    CHECK(log.coeff({1}) == 1);
    CHECK(log.coeff({0}) == 0);
  }
  // short form y^2 = x^3 + a4 x + a6: only odd-degree terms
  for (auto curve : {WeierstrassCurve{0, 0, 0, 1, 0}, WeierstrassCurve{0, 0, 0, -2, 3}}) {
    TruncSeries log = formal_log(curve, 12);
    for (auto& [e, coeff] : log.terms()) CHECK(e[0] % 2 == 1);
  }
}

TEST_CASE("logarithm matches the independent expansion oracle") {
  WeierstrassCurve e{0, 0, 0, 1, 0};
  CHECK(formal_log(e, 9) == oracle_log(e, 9));
  std::mt19937 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    auto c = random_nonsingular(rng);
    CHECK(formal_log(c, 8) == oracle_log(c, 8));
  }
}

TEST_CASE("formal exponential inverts the logarithm") {
  // identity
  TruncSeries t = TruncSeries::variable({"t"}, 0, 8);
  CHECK(formal_exp(t) == t);

  // log = t + t^3/3: exp = t - t^3/3 + O(t^5)-consistent inverse
  TruncSeries log3 = t + (t * t * t) * Rational(1, 3);
  TruncSeries exp3 = formal_exp(log3);
  CHECK(exp3.coeff({3}) == Rational(-1, 3));
  CHECK(log3.substitute({exp3}) == t);

  CHECK_THROWS_WITH_AS(formal_exp(t * Rational(2)), doctest::Contains("BadLeadingTerm"), Error);

  // round trip at order 20
  std::mt19937 rng(23);
  for (int trial = 0; trial < 3; ++trial) {
    auto pair = formal_log_pair(random_nonsingular(rng), 20);
    TruncSeries t20 = TruncSeries::variable({"t"}, 0, 20);
    CHECK(pair.log.substitute({pair.exp}) == t20);
    CHECK(pair.exp.substitute({pair.log}) == t20);
  }
}

TEST_CASE("group law: unit section and the logarithm functional equation") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    auto c = random_nonsingular(rng);
    unsigned order = 10;
    TruncSeries f = formal_group_law(c, order);
    std::vector<std::string> bv{"t1", "t2"};
    // F(t, 0) = t
    TruncSeries t1 = TruncSeries::variable(bv, 0, order);
    TruncSeries zero(bv, order);
    std::vector<std::string> tv{"t"};
    TruncSeries back = f.substitute({TruncSeries::variable(tv, 0, order), TruncSeries(tv, order)});
    CHECK(back == TruncSeries::variable(tv, 0, order));

    // log(F(t1, t2)) = log t1 + log t2
    TruncSeries log = formal_log(c, order);
    TruncSeries lhs = log.substitute({f});
    TruncSeries rhs = log.substitute({t1}) + log.substitute({TruncSeries::variable(bv, 1, order)});
    CHECK(lhs == rhs);
  }
}
