#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kim/intersect.hpp"

using namespace kim;
using namespace kim::intersect;
using kim::transport::compute_theta;
using conn::build_universal;
using forms::Chart;
using forms::DifferentialForm;
using forms::FormSpace;

namespace {

const Chart SQUARE = Chart::parse("p1(0,1,inf)^2");

RationalFunction rf(const std::vector<std::string>& vars, const std::string& text) {
  return RationalFunction(parse_polynomial(vars, text));
}

// diagonal {z1 = z2 = 1/2 + s}
FormalSubvariety diagonal_z() {
  FormalSubvariety v;
  v.params = {"s"};
  v.z_param = {rf(v.params, "1 * s + 1/2"), rf(v.params, "1 * s + 1/2")};
  return v;
}

std::vector<DifferentialForm> square_dlogs(const forms::FormSpacePtr& space) {
  std::vector<DifferentialForm> out;
  for (size_t i = 0; i < 4; ++i) out.push_back(DifferentialForm::atom(space, i));
  return out;
}

}  // namespace

TEST_CASE("restriction of forms to parameterized subvarieties") {
  auto space = FormSpace::for_chart(SQUARE);
  auto dlogs = square_dlogs(space);

  // diagonal: dz1/z1 - dz2/z2 pulls back to zero
  auto v = diagonal_z();
  auto sym = restrict_forms_symbolic({dlogs[0], dlogs[2]}, v);
  CHECK(sym[0][0] == sym[1][0]);

  // V = {z2 = 1 - z1}: pullback of dz2/z2 is -dz/(1-z)
  FormalSubvariety w;
  w.params = {"s"};
  w.z_param = {rf(w.params, "1 * s + 1/3"), rf(w.params, "2/3 + -1 * s")};
  auto sym2 = restrict_forms_symbolic({dlogs[2], dlogs[1]}, w);
  // dz2/z2 |-> (1/(2/3 - s)) * (-1) ds ; dz1/(1-z1) = 1/(1 - z1) dz1 |-> (1/(2/3 - s)) ds
  CHECK(sym2[0][0] == -sym2[1][0]);

  // constant point: everything restricts to zero (no parameters to carry ds)
  FormalSubvariety pt;
  pt.params = {"s"};
  pt.z_param = {rf(pt.params, "1/2"), rf(pt.params, "1/3")};
  auto sym3 = restrict_forms_symbolic(dlogs, pt);
  for (auto& row : sym3)
    for (auto& c : row) CHECK(c.is_zero());
}

TEST_CASE("jet ranks of restricted dlog systems") {
  auto space = FormSpace::for_chart(SQUARE);
  auto dlogs = square_dlogs(space);

  // diagonal: rank 2 with a two-dimensional relation space
  auto v = diagonal_z();
  auto jr = jet_rank(restrict_forms(dlogs, v, 6), 4);
  CHECK(jr.rank == 2);
  CHECK(jr.relations.rows() == 2);
  // relations are spanned by (1,0,-1,0) and (0,1,0,-1)
  MatQ expected(2, 4);
  expected << 1, 0, -1, 0, 0, 1, 0, -1;
  MatQ stacked(4, 4);
  stacked.topRows(2) = jr.relations;
  stacked.bottomRows(2) = expected;
  CHECK(linalg::rank(stacked) == 2);

  // the full surface: rank 4, no relations
  FormalSubvariety full;
  full.params = {"s1", "s2"};
  full.z_param = {rf(full.params, "1 * s1 + 1/2"), rf(full.params, "1 * s2 + 1/3")};
  auto jr2 = jet_rank(restrict_forms(dlogs, full, 6), 4);
  CHECK(jr2.rank == 4);
  CHECK(jr2.relations.rows() == 0);

  // V = {z2 = 1 - z1}: rank 2, relations (1,0,0,1) and (0,1,1,0)
  FormalSubvariety w;
  w.params = {"s"};
  w.z_param = {rf(w.params, "1 * s + 1/3"), rf(w.params, "2/3 + -1 * s")};
  auto jr3 = jet_rank(restrict_forms(dlogs, w, 6), 4);
  CHECK(jr3.rank == 2);
  MatQ expect3(2, 4);
  expect3 << 1, 0, 0, 1, 0, 1, 1, 0;
  MatQ stacked3(4, 4);
  stacked3.topRows(2) = jr3.relations;
  stacked3.bottomRows(2) = expect3;
  CHECK(linalg::rank(stacked3) == 2);

  // monotone in the jet order, and stabilized at the symbolic rank
  auto r2 = jet_rank(restrict_forms(dlogs, v, 6), 2).rank;
  auto r3 = jet_rank(restrict_forms(dlogs, v, 6), 3).rank;
  CHECK(r2 <= r3);
  CHECK(r3 <= jr.rank);
  CHECK(jr.rank == symbolic_q_rank(restrict_forms_symbolic(dlogs, v)));
  CHECK(jr2.rank == symbolic_q_rank(restrict_forms_symbolic(dlogs, full)));
}

TEST_CASE("descent: constant relation on the embedded diagonal") {
  auto e1 = build_universal(SQUARE, 1);
  auto ts = compute_theta(e1);

  // diagonal x diagonally embedded L1: t1 = t3 = u1, t2 = t4 = u2
  FormalSubvariety v;
  v.params = {"u1", "u2", "s"};
  v.t_param = {rf(v.params, "1 * u1"), rf(v.params, "1 * u2"), rf(v.params, "1 * u1"),
               rf(v.params, "1 * u2")};
  v.z_param = {rf(v.params, "1 * s + 1/2"), rf(v.params, "1 * s + 1/2")};

  std::vector<RationalFunction> rel{rf(v.params, "1"), rf(v.params, "0"), rf(v.params, "-1"),
                                    rf(v.params, "0")};
  auto cert = descent_depth1(ts, rel, v);
  CHECK(cert.kind == DependencyCertificate::Kind::ConstantRelation);
  REQUIRE(cert.constant_coeffs.size() == 4);
  CHECK(cert.constant_coeffs(0) == 1);
  CHECK(cert.constant_coeffs(2) == -1);
  CHECK(verify_certificate(ts, cert, v, 6));

  // a non-relation is rejected
  std::vector<RationalFunction> bad{rf(v.params, "1"), rf(v.params, "0"), rf(v.params, "0"),
                                    rf(v.params, "0")};
  CHECK_THROWS_WITH_AS(descent_depth1(ts, bad, v), doctest::Contains("NotARelation"), Error);
}

TEST_CASE("descent: anti-diagonal constant relation") {
  auto e1 = build_universal(SQUARE, 1);
  auto ts = compute_theta(e1);
  // V = {z2 = 1 - z1} with t-coordinates matched so that theta2 + theta3
  // restricts to zero: t2 = t3' pairing via u-coordinates
  FormalSubvariety v;
  v.params = {"u1", "u2", "u3", "s"};
  v.t_param = {rf(v.params, "1 * u1"), rf(v.params, "1 * u2"), rf(v.params, "-1 * u2"),
               rf(v.params, "1 * u3")};
  v.z_param = {rf(v.params, "1 * s + 1/3"), rf(v.params, "2/3 + -1 * s")};
  std::vector<RationalFunction> rel{rf(v.params, "0"), rf(v.params, "1"), rf(v.params, "1"),
                                    rf(v.params, "0")};
  auto cert = descent_depth1(ts, rel, v);
  CHECK(cert.kind == DependencyCertificate::Kind::ConstantRelation);
  CHECK(verify_certificate(ts, cert, v, 6));
}

TEST_CASE("descent: fabricated function relation hits the witness branch") {
  auto e1 = build_universal(SQUARE, 1);
  auto ts = compute_theta(e1);

  // V one-dimensional in z1 with z2 frozen; t chosen rationally.
  // theta_i|_V = c_i(s) ds, so s * theta_1 - (s c_1 / c_2) theta_2 = 0.
  FormalSubvariety v;
  v.params = {"s"};
  v.t_param = {rf(v.params, "1 * s"), rf(v.params, "0"), rf(v.params, "0"), rf(v.params, "0")};
  v.z_param = {rf(v.params, "1 * s + 1/2"), rf(v.params, "1/3")};

  auto theta_v = restrict_theta_symbolic(ts, v);
  RationalFunction c1 = theta_v[0][0];
  RationalFunction c2 = theta_v[1][0];
  REQUIRE(!c1.is_zero());
  REQUIRE(!c2.is_zero());
  RationalFunction s = RationalFunction::variable(v.params, 0);
  std::vector<RationalFunction> rel{s, -(s * c1 / c2), rf(v.params, "0"), rf(v.params, "0")};
  auto cert = descent_depth1(ts, rel, v);
  CHECK(cert.kind == DependencyCertificate::Kind::FunctionRelation);
  CHECK(!cert.h2.is_constant());
  CHECK(verify_certificate(ts, cert, v, 6));
}

TEST_CASE("descent: derivation branch strictly shrinks the support") {
  auto e1 = build_universal(SQUARE, 1);
  auto ts = compute_theta(e1);

  // two parameters, z2 frozen: the theta span only sees ds1, so a relation
  // with an s2-dependent coefficient forces the derivation branch.
  FormalSubvariety v;
  v.params = {"s1", "s2"};
  v.t_param = {rf(v.params, "0"), rf(v.params, "0"), rf(v.params, "0"), rf(v.params, "0")};
  v.z_param = {rf(v.params, "1 * s1 + 1/2"), rf(v.params, "1/3")};

  auto theta_v = restrict_theta_symbolic(ts, v);
  RationalFunction c1 = theta_v[0][0];
  RationalFunction c2 = theta_v[1][0];
  std::vector<RationalFunction> rel{rf(v.params, "1"), -(c1 / c2),
                                    RationalFunction::variable(v.params, 1), rf(v.params, "0")};
  // theta_3 restricts to zero (z2 is constant), so the relation holds
  auto cert = descent_depth1(ts, rel, v);
  CHECK(cert.kind == DependencyCertificate::Kind::ConstantRelation);
  bool shrank = false;
  for (auto& line : cert.trace) shrank |= line.rfind("derivation step", 0) == 0;
  CHECK(shrank);
  CHECK(verify_certificate(ts, cert, v, 6));
}

TEST_CASE("colinearity locus of the introduction example") {
  auto space = FormSpace::for_chart(SQUARE);
  auto dlogs = square_dlogs(space);
  // dz1/z1 - dz2/z2 and dz1/(1-z1) - dz2/(1-z2)
  DifferentialForm a = dlogs[0] - dlogs[2];
  DifferentialForm b = dlogs[1] - dlogs[3];
  auto locus = colinearity_locus(a, b);
  REQUIRE(locus.kind == LocusResult::Kind::Proper);
  REQUIRE(locus.generators.size() == 1);
  Polynomial expect = parse_polynomial(space->vars(), "1 * z1 + -1 * z2");
  CHECK(locus.generators[0] == expect);
  // z1(z2 - 1) = z2(z1 - 1) normalizes to the same generator
  Polynomial paper_form = parse_polynomial(space->vars(), "1 * z1*z2 + -1 * z1") -
                          parse_polynomial(space->vars(), "1 * z1*z2 + -1 * z2");
  Rational c = paper_form.content();
  if (c != 0 && c != 1) paper_form *= 1 / c;
  CHECK(locus.generators[0] == paper_form);

  // identical forms: everywhere colinear
  CHECK(colinearity_locus(a, a).kind == LocusResult::Kind::ZeroIdeal);

  // dz1, dz2: nowhere colinear
  auto ext = FormSpace::for_chart_extended(SQUARE, true, true);
  auto da = DifferentialForm::atom(ext, 4);
  auto db = DifferentialForm::atom(ext, 5);
  CHECK(colinearity_locus(da, db).kind == LocusResult::Kind::UnitIdeal);
}

TEST_CASE("unlikely reports") {
  // graph closure of J at depth 2 on the line: V is all of L_2 x Z
  auto e2 = build_universal(Chart::parse("p1(0,1,inf)"), 2);
  FormalSubvariety full;
  full.params = {"u1", "u2", "u3", "s"};
  full.t_param = {RationalFunction::variable(full.params, 0),
                  RationalFunction::variable(full.params, 1),
                  RationalFunction::variable(full.params, 2)};
  full.z_param = {rf(full.params, "1 * s + 1/2")};
  auto rep = unlikely_report(e2, full, 6);
  CHECK(rep.theta_rank == 3);
  CHECK_FALSE(rep.rank_deficient);
  CHECK(rep.v_codim == 0);
  CHECK_FALSE(rep.unlikely);
  CHECK(rep.w_codim_in_graph == 0);

  // embedded diagonal inside the depth-1 square system
  auto sq1 = build_universal(SQUARE, 1);
  FormalSubvariety diag;
  diag.params = {"u1", "u2", "s"};
  diag.t_param = {rf(diag.params, "1 * u1"), rf(diag.params, "1 * u2"),
                  rf(diag.params, "1 * u1"), rf(diag.params, "1 * u2")};
  diag.z_param = {rf(diag.params, "1 * s + 1/2"), rf(diag.params, "1 * s + 1/2")};
  auto rep2 = unlikely_report(sq1, diag, 6);
  CHECK(rep2.rank_deficient);
  CHECK(rep2.theta_rank == 2);
  CHECK(rep2.unlikely);
  CHECK(rep2.w_dim == 1);
  REQUIRE(rep2.certificates.size() == 2);
  for (auto& cert : rep2.certificates) {
    CHECK(cert.kind == DependencyCertificate::Kind::ConstantRelation);
    CHECK(verify_certificate(compute_theta(sq1), cert, diag, 6));
  }

  // a point is degenerate
  FormalSubvariety pt;
  pt.order = 4;
  auto rep3 = unlikely_report(sq1, pt, 4);
  CHECK(rep3.degenerate);
}

TEST_CASE("ideal validation on formal subvarieties") {
  FormalSubvariety v = diagonal_z();
  std::vector<std::string> ambient{"z1", "z2"};
  v.ideal = {parse_polynomial(ambient, "1 * z1 + -1 * z2")};
  v.validate();
  v.ideal = {parse_polynomial(ambient, "1 * z1 + 1 * z2")};
  CHECK_THROWS_WITH_AS(v.validate(), doctest::Contains("InvalidData"), Error);
}
