#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kim/linalg.hpp"
#include "kim/polynomial.hpp"
#include "kim/series.hpp"

using namespace kim;

namespace {
const std::vector<std::string> Z1{"z"};
const std::vector<std::string> Z2{"z1", "z2"};

Polynomial P(const std::string& s, const std::vector<std::string>& vars = Z2) {
  return parse_polynomial(vars, s);
}
}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("-7/3") == Rational(-7, 3));
  CHECK(parse_rational(" 4 ") == Rational(4));
  CHECK(to_string(rat(6, -4)) == "-3/2");
  CHECK(pow_rational(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(factorial(5) == 120);
  CHECK(binomial(7, 3) == 35);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("polynomial arithmetic and canonical order") {
  Polynomial f = P("1 * z1 + -1 * z2");
  Polynomial g = P("1 * z1*z2");
  CHECK((f * f).str() == "1 * z1^2 + -2 * z1*z2 + 1 * z2^2");
  CHECK(g.derivative(0).str() == "1 * z2");
  CHECK(f.eval({Rational(3), Rational(1)}) == 2);
  // round trip is bit-identical
  for (auto s : {"1 * z1^2 + -2 * z1*z2 + 1 * z2^2", "-1/3 * z2 + 4", "0"})
    CHECK(P(s).str() == s);
}

TEST_CASE("exact division and content") {
  Polynomial f = P("1 * z1^2 + -1 * z2^2");
  Polynomial d = P("1 * z1 + 1 * z2");
  Polynomial q;
  REQUIRE(f.divide_exact(d, q));
  CHECK(q == P("1 * z1 + -1 * z2"));
  CHECK_FALSE(f.divide_exact(P("1 * z1 + 2"), q));
  CHECK(P("-4 * z1 + -6 * z2").content() == -2);
}

TEST_CASE("rational function equality is the cross-multiplied identity") {
  RationalFunction a(P("1 * z1^2 + -1 * z2^2"), P("1 * z1 + 1 * z2"));
  RationalFunction b(P("1 * z1 + -1 * z2"));
  CHECK(a == b);
  CHECK(a + (-b) == RationalFunction::constant(Z2, 0));
  // equivalence under random-evaluation spot checks
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(2, 40);
  for (int i = 0; i < 20; ++i) {
    std::vector<Rational> pt{Rational(d(rng)), Rational(d(rng), d(rng))};
    if (a.den().eval(pt) == 0 || b.den().eval(pt) == 0) continue;
    CHECK(a.eval(pt) == b.eval(pt));
  }
}

TEST_CASE("rational function calculus") {
  RationalFunction inv_z(P("1", Z1), P("1 * z", Z1));
  CHECK(inv_z.derivative(0) == RationalFunction(P("-1", Z1), P("1 * z^2", Z1)));
  RationalFunction one_minus(P("1", Z1), P("1 + -1 * z", Z1));
  CHECK(one_minus.derivative(0) ==
        RationalFunction(P("1", Z1), P("1 + -2 * z + 1 * z^2", Z1)));
}

TEST_CASE("jet_expand matches the geometric series oracle") {
  // oracle: 1/(1/2 + t) = 2 * sum (-2t)^k
  RationalFunction f(P("1", Z1), P("1 * z", Z1));
  TruncSeries s = jet_expand(f, {Rational(1, 2)}, 4);
  std::vector<Rational> expect{2, -4, 8, -16};
  for (uint32_t k = 0; k < 4; ++k) CHECK(s.coeff({k}) == expect[k]);

  // identity chart
  TruncSeries id = jet_expand(RationalFunction(P("1 * z", Z1)), {Rational(0)}, 3);
  CHECK(id.str() == "1 * t");

  CHECK_THROWS_WITH_AS(jet_expand(f, {Rational(0)}, 3) == TruncSeries({"t"}, 3),
                       doctest::Contains("PoleAtBase"), Error);
}

TEST_CASE("truncation consistency: order N cut to M equals order M") {
  RationalFunction f(P("1 * z1 + 3", Z2), P("2 * z1*z2 + 1 * z2 + 5", Z2));
  std::vector<Rational> base{Rational(1, 3), Rational(-2)};
  TruncSeries high = jet_expand(f, base, 7);
  TruncSeries low = jet_expand(f, base, 4);
  CHECK(high.truncate(4) == low);
}

TEST_CASE("series arithmetic, inverse, substitution") {
  auto t = TruncSeries::variable({"t"}, 0, 8);
  TruncSeries one({"t"}, 8, 1);
  TruncSeries geom = (one - t).inverse();
  for (uint32_t k = 0; k < 8; ++k) CHECK(geom.coeff({k}) == 1);

  // compose (1/(1-t)) with t = u + u^2
  auto u = TruncSeries::variable({"u"}, 0, 5);
  TruncSeries comp = geom.substitute({u + u * u});
  // oracle: 1/(1 - u - u^2) has Fibonacci coefficients
  std::vector<Rational> fib{1, 1, 2, 3, 5};
  for (uint32_t k = 0; k < 5; ++k) CHECK(comp.coeff({k}) == fib[k]);

  CHECK(reversion(t + t * t * t * Rational(1, 3)).coeff({3}) == Rational(-1, 3));
}

TEST_CASE("series round trip text") {
  TruncSeries s = parse_series({"t"}, 5, "2 * t + -2 * t^2 + 8/3 * t^3");
  CHECK(s.str() == "2 * t + -2 * t^2 + 8/3 * t^3");
}

TEST_CASE("exact linear algebra") {
  MatQ a(3, 4);
  a << 1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 1, 1;
  CHECK(linalg::rank(a) == 2);
  MatQ k = linalg::kernel_basis(a);
  CHECK(k.cols() == 2);
  for (int c = 0; c < k.cols(); ++c) CHECK((a * k.col(c)).isZero());

  MatQ b(2, 2);
  b << Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(1, 7);
  VecQ rhs(2);
  rhs << 1, 2;
  auto x = linalg::solve(b, rhs);
  REQUIRE(x.has_value());
  CHECK(b * *x == rhs);
}
