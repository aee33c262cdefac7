#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kim/transport.hpp"

using namespace kim;
using namespace kim::transport;
using conn::build_universal;
using forms::Chart;

namespace {

const Chart LINE = Chart::parse("p1(0,1,inf)");
const Chart SQUARE = Chart::parse("p1(0,1,inf)^2");

// log(1 + 2t) coefficients: (-1)^{k+1} 2^k / k
Rational log_2z_coeff(unsigned k) {
  Rational c = pow_rational(Rational(2), static_cast<long>(k)) / Rational(k);
  return (k % 2) ? c : -c;
}
// -log(1 - 2t) coefficients: 2^k / k
Rational log_2omz_coeff(unsigned k) {
  return pow_rational(Rational(2), static_cast<long>(k)) / Rational(k);
}

// Independent solver for the Lie-side equation dJ = (ad_J/(e^{ad_J}-1))(omega)
// on a one-variable chart, integrated degree by degree.
lie::LieElement<TruncSeries> solve_lie_ode_line(const conn::ReducedConnection& universal,
                                                const Rational& base, unsigned order) {
  auto ctx = universal.fiber;
  std::vector<std::string> tvars{"t"};
  lie::LieElement<TruncSeries> j = lie::LieElement<TruncSeries>::zero(ctx);
  lie::LieElement<TruncSeries> omega = lie::LieElement<TruncSeries>::zero(ctx);
  for (int g = 0; g < ctx->gens(); ++g) {
    forms::CoordOneForm c = universal.omega[static_cast<size_t>(g)].coords_one();
    omega.add(g, jet_expand(c.c[0], {base}, order));
  }
  for (unsigned s = 0; s + 1 < order; ++s) {
    auto rhs = lie::ad_series_apply(lie::AdSeriesKind::TOverExpm1, j, omega);
    TruncSeries t = TruncSeries::variable(tvars, 0, order);
    for (auto& [i, c] : rhs.coords) {
      TruncSeries part = c.homogeneous_part(s);
      if (part.is_zero()) continue;
      auto it = j.coords.find(i);
      TruncSeries add = (t * part) * Rational(Integer(1), Integer(s + 1));
      if (it == j.coords.end())
        j.coords.emplace(i, add);
      else
        it->second += add;
    }
  }
  return j;
}

}  // namespace

TEST_CASE("depth-1 J matches the closed-form logarithms at base 1/2") {
  auto e1 = build_universal(LINE, 1);
  auto h = solve_j(e1, {Rational(1, 2)}, 6);
  REQUIRE(h.j.coords.count(0) == 1);
  REQUIRE(h.j.coords.count(1) == 1);
  const TruncSeries& j1 = h.j.coords.at(0);
  const TruncSeries& j2 = h.j.coords.at(1);
  for (unsigned k = 1; k < 6; ++k) {
    CHECK(j1.coeff({k}) == log_2z_coeff(k));
    CHECK(j2.coeff({k}) == log_2omz_coeff(k));
  }
  // the spec's explicit prefix: 2t - 2t^2 + 8/3 t^3 and 2t + 2t^2 + 8/3 t^3
  CHECK(j1.coeff({1}) == 2);
  CHECK(j1.coeff({2}) == -2);
  CHECK(j1.coeff({3}) == Rational(8, 3));
  CHECK(j2.coeff({1}) == 2);
  CHECK(j2.coeff({2}) == 2);
  CHECK(j2.coeff({3}) == Rational(8, 3));
}

TEST_CASE("zero connection data gives the zero logarithm") {
  auto e1 = build_universal(LINE, 2);
  conn::ReducedConnection zero = e1;
  for (auto& w : zero.omega) w = forms::DifferentialForm::zero(e1.lambda.space, 1);
  auto h = solve_j(zero, {Rational(1, 2)}, 5);
  CHECK(h.j.is_zero());
  CHECK(h.exp_j.terms.size() == 1);
}

TEST_CASE("pole at base is rejected") {
  auto e1 = build_universal(LINE, 1);
  CHECK_THROWS_WITH_AS(solve_j(e1, {Rational(0)}, 4), doctest::Contains("PoleAtBase"), Error);
}

TEST_CASE("the enveloping-algebra solver agrees with the Lie-side equation") {
  for (int depth : {2, 3}) {
    auto universal = build_universal(LINE, depth);
    auto h = solve_j(universal, {Rational(1, 2)}, 7);
    CHECK(verify_horizontality(universal, h) == 0);
    CHECK(lie_ode_cross_check(universal, h) == 0);
    // fully independent second solver, coefficient for coefficient
    auto j2 = solve_lie_ode_line(universal, Rational(1, 2), 7);
    for (auto& [i, c] : j2.coords) {
      auto it = h.j.coords.find(i);
      TruncSeries diff = it == h.j.coords.end() ? c : (c - it->second);
      CHECK(diff.truncate(6).is_zero());
    }
  }
}

TEST_CASE("exp(J) is group-like; corrupted sections are not") {
  auto universal = build_universal(LINE, 3);
  auto h = solve_j(universal, {Rational(1, 2)}, 6);
  CHECK(verify_grouplike(h) == 0);

  auto bad = h.exp_j;
  TruncSeries t2 = TruncSeries::variable({"t"}, 0, 6);
  bad.add(lie::Word{0, 1}, t2 * t2);
  CHECK(verify_grouplike(bad) > 0);
}

TEST_CASE("theta system at depth 1 and the depth-2 half-bracket term") {
  auto e1 = build_universal(LINE, 1);
  auto ts1 = compute_theta(e1);
  // theta_i = dt_i - omega_i
  for (size_t k = 0; k < 2; ++k) {
    CHECK(ts1.theta[k].c[k] == RationalFunction::constant(ts1.vars, 1));
    for (size_t other = 0; other < 2; ++other)
      if (other != k) CHECK(ts1.theta[k].c[other].is_zero());
    CHECK(ts1.theta[k].c[2] == -ts1.omega[k].c[2]);
  }

  auto e2 = build_universal(LINE, 2);
  auto ts2 = compute_theta(e2);
  // theta_3 = dt_3 + 1/2 (t1 dt2 - t2 dt1), no omega_3 term
  const auto& th3 = ts2.theta[2];
  CHECK(th3.c[2] == RationalFunction::constant(ts2.vars, 1));
  RationalFunction half_t1(parse_polynomial(ts2.vars, "1/2 * t1"));
  RationalFunction half_t2(parse_polynomial(ts2.vars, "1/2 * t2"));
  CHECK(th3.c[1] == half_t1);
  CHECK(th3.c[0] == -half_t2);
  CHECK(th3.c[3].is_zero());
}

TEST_CASE("theta differential identity holds exactly") {
  // depth 1 with closed omega: d theta = 0
  auto e1 = build_universal(LINE, 1);
  CHECK(mixed_nonzero_count(theta_identity_residual(compute_theta(e1))) == 0);

  auto e2 = build_universal(LINE, 2);
  CHECK(mixed_nonzero_count(theta_identity_residual(compute_theta(e2))) == 0);

  auto sq2 = build_universal(SQUARE, 2);
  CHECK(mixed_nonzero_count(theta_identity_residual(compute_theta(sq2))) == 0);
}

TEST_CASE("pullback of theta along the graph of J vanishes identically") {
  for (int depth : {1, 2, 3}) {
    auto universal = build_universal(LINE, depth);
    auto h = solve_j(universal, {Rational(1, 2)}, 6);
    auto ts = compute_theta(universal);
    auto pb = pullback_theta_along_graph(ts, h);
    for (auto& form : pb) CHECK(form.nonzero_coefficients() == 0);
  }
  auto sq = build_universal(SQUARE, 2);
  auto h = solve_j(sq, {Rational(1, 2), Rational(1, 3)}, 5);
  auto ts = compute_theta(sq);
  for (auto& form : pullback_theta_along_graph(ts, h))
    CHECK(form.nonzero_coefficients() == 0);
}

TEST_CASE("depth projection and uniqueness under factor relabeling") {
  auto e3 = build_universal(LINE, 3);
  auto e2 = build_universal(LINE, 2);
  auto h3 = solve_j(e3, {Rational(1, 2)}, 6);
  auto h2 = solve_j(e2, {Rational(1, 2)}, 6);
  for (auto& [i, c] : h2.j.coords) {
    auto it = h3.j.coords.find(i);
    REQUIRE(it != h3.j.coords.end());
    CHECK((c - it->second).is_zero());
  }

  // factor swap on the square: J for base (a, b) determines J for (b, a)
  auto sq = build_universal(SQUARE, 1);
  auto ha = solve_j(sq, {Rational(1, 2), Rational(1, 3)}, 5);
  auto hb = solve_j(sq, {Rational(1, 3), Rational(1, 2)}, 5);
  // generators 0,1 belong to factor 1 and 2,3 to factor 2; swap both
  for (int g = 0; g < 4; ++g) {
    int sg = (g + 2) % 4;
    auto ita = ha.j.coords.find(g);
    auto itb = hb.j.coords.find(sg);
    REQUIRE(ita != ha.j.coords.end());
    REQUIRE(itb != hb.j.coords.end());
    // swap the series variables t1 <-> t2
    std::vector<std::string> tv{"t1", "t2"};
    std::vector<TruncSeries> swap_args{TruncSeries::variable(tv, 1, 5),
                                       TruncSeries::variable(tv, 0, 5)};
    CHECK((ita->second - itb->second.substitute(swap_args)).is_zero());
  }
}

TEST_CASE("local Albanese map with Hodge sections") {
  auto e2 = build_universal(LINE, 2);
  auto h = solve_j(e2, {Rational(1, 2)}, 5);
  TruncSeries one({"t"}, 5, 1);

  // F = 1: the map is exp(J)
  auto unit = lie::UEAElement<TruncSeries>::one(h.ctx, one);
  auto m = albanese_local(h, unit);
  CHECK((m - h.exp_j).is_zero());

  // F = exp(f e1) with f(base) = 0
  TruncSeries f = TruncSeries::variable({"t"}, 0, 5);
  lie::LieElement<TruncSeries> fe1 = lie::LieElement<TruncSeries>::zero(h.ctx);
  fe1.add(0, f);
  auto sec = lie::uea_exp(fe1, one);
  auto m2 = albanese_local(h, sec);
  lie::LieElement<TruncSeries> minus = lie::LieElement<TruncSeries>::zero(h.ctx);
  minus.add(0, -f);
  auto expect = h.exp_j * lie::uea_exp(minus, one);
  CHECK((m2 - expect).is_zero());
  CHECK(verify_grouplike(m2) == 0);

  // non-group-like F
  auto bad = unit;
  bad.add(lie::Word{0, 1}, f);
  CHECK_THROWS_WITH_AS(albanese_local(h, bad), doctest::Contains("NotGroupLike"), Error);
  // group-like but not 1 at the base
  lie::LieElement<TruncSeries> c1 = lie::LieElement<TruncSeries>::zero(h.ctx);
  c1.add(0, one);
  CHECK_THROWS_WITH_AS(albanese_local(h, lie::uea_exp(c1, one)),
                       doctest::Contains("NotGroupLike"), Error);
}
