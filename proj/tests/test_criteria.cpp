#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kim/criteria.hpp"
#include "kim/lie.hpp"

using namespace kim;
using namespace kim::criteria;

namespace {

CurveData basic(long long g, long long d, long long r1, long long r2, long long rank) {
  CurveData c;
  c.genus = g;
  c.degree = d;
  c.r1 = r1;
  c.r2 = r2;
  c.mw_rank = rank;
  return c;
}

// the base-change Prym counterexample shape: genus-3 curve over a quadratic
// field covering a genus-2 curve over Q, Prym a rank-two elliptic curve
CurveData prym_fixture() {
  CurveData c = basic(3, 2, 2, 0, 4);
  c.hom_vanishing = false;
  CoverRecord cov;
  cov.label = "genus-2 quotient over the rationals";
  cov.subfield_degree = 1;
  cov.quotient_genus = 2;
  cov.prym_rank = 2;
  cov.quotient_padic_dense = true;
  cov.prym_padic_dense = true;
  c.covers.push_back(cov);
  ModelRecord m;
  m.label = "X over K";
  m.field_degree = 2;
  m.genus = 3;
  m.rank = 4;
  c.models.push_back(m);
  return c;
}

}  // namespace

TEST_CASE("depth-one Chabauty criterion") {
  CurveData ok = basic(2, 2, 2, 0, 2);
  ok.hom_vanishing = true;
  auto rep = depth1_check(ok);
  CHECK(rep.verdict == Verdict::Finite);
  CHECK(rep.bound == 2);

  auto rep2 = depth1_check(prym_fixture());
  CHECK(rep2.verdict == Verdict::Obstructed);
  REQUIRE(rep2.obstruction.has_value());
  CHECK(rep2.obstruction->subfield_degree == 1);

  // classical r < g over the rationals
  auto rep3 = depth1_check(basic(3, 1, 1, 0, 1));
  CHECK(rep3.verdict == Verdict::Finite);

  CHECK_THROWS_WITH_AS(depth1_check(basic(1, 1, 1, 0, 0)), doctest::Contains("InvalidData"),
                       Error);
}

TEST_CASE("quadratic Chabauty bound arithmetic") {
  // imaginary quadratic, g = 2, rho = 2, h1f = 4: bound 2*1 + 2*1 = 4
  CurveData iq = basic(2, 2, 0, 1, 4);
  iq.hom_vanishing = true;
  iq.h1f = 4;
  iq.ns_rank = 2;
  auto rep = qc_depth2_check(iq);
  CHECK(rep.bound == 4);
  CHECK(rep.verdict == Verdict::Finite);

  // over the rationals: bound (g-1) + rho - 1
  CurveData q = basic(2, 1, 1, 0, 2);
  q.h1f = 2;
  q.ns_rank = 1;
  auto rep2 = qc_depth2_check(q);
  CHECK(rep2.bound == 1);
  CHECK(rep2.verdict == Verdict::Inconclusive);

  // totally real cubic: (d - r1 - r2 + 1) = 1, bound 3 + 2 = 5
  CurveData tr = basic(2, 3, 3, 0, 5);
  tr.hom_vanishing = true;
  tr.h1f = 5;
  tr.ns_rank = 3;
  auto rep3 = qc_depth2_check(tr);
  CHECK(rep3.bound == 5);
  CHECK(rep3.verdict == Verdict::Finite);

  // symbolic d = 1 reduction across genus and rho
  for (long long g = 2; g <= 5; ++g)
    for (long long rho = 1; rho <= 4; ++rho) {
      CurveData c = basic(g, 1, 1, 0, 0);
      c.ns_rank = rho;
      CHECK(qc_depth2_check(c).bound == (g - 1) + rho - 1);
      CHECK(qc_depth2_check(c, true).bound == g + rho - 1);
    }
}

TEST_CASE("imaginary quadratic corollary") {
  CurveData c = basic(2, 2, 0, 1, 4);
  c.h1f = 4;
  c.jk_padic_dense = true;
  c.ns_rank = 2;
  CHECK(imag_quadratic_check(c).verdict == Verdict::Finite);

  CurveData rho1 = c;
  rho1.ns_rank = 1;
  CHECK(imag_quadratic_check(rho1).verdict == Verdict::Inconclusive);

  CurveData real_quad = basic(2, 2, 2, 0, 4);
  CHECK_THROWS_WITH_AS(imag_quadratic_check(real_quad), doctest::Contains("WrongField"), Error);
}

TEST_CASE("margin arithmetic for the finiteness inequality") {
  MoreInequalityData d;
  d.wdr_dims = {2, 1, 2, 3};
  d.h1_bounds = {1, 0, 1, 0};
  d.kernel_dims = {0, 0, 0};
  d.dim_z = 1;
  auto rep = more_inequality_eval(d);
  CHECK(rep.margin == 5);
  CHECK(rep.verdict == Verdict::Finite);

  MoreInequalityData zero;
  zero.dim_z = 1;
  auto rep2 = more_inequality_eval(zero);
  CHECK(rep2.margin == -1);
  CHECK(rep2.verdict == Verdict::Inconclusive);

  // metabelian dims with Artin--Tate parity bounds: margin positive by a
  // computable depth
  auto ctx = lie::LieContext::make(lie::LieAlgebraSpec::free_metabelian(2, 6));
  auto dims = ctx->graded_dims();
  MoreInequalityData meta;
  meta.dim_z = 1;
  long long margin_at_nstar = 0;
  int nstar = -1;
  for (int i = 1; i <= 6; ++i) {
    long long m = dims[static_cast<size_t>(i - 1)];
    meta.wdr_dims.push_back(m);
    meta.h1_bounds.push_back(i == 1 ? 0 : (i % 2) ? m : 0);
    if (i > 1) meta.kernel_dims.push_back(0);
    auto r = more_inequality_eval(meta);
    if (nstar < 0 && r.verdict == Verdict::Finite) {
      nstar = i;
      margin_at_nstar = r.margin;
    }
  }
  CHECK(nstar > 0);
  CHECK(nstar <= 6);
  CHECK(margin_at_nstar >= 0);
  CHECK(more_inequality_eval(meta).verdict == Verdict::Finite);

  // additivity over concatenated degree ranges
  MoreInequalityData left, right;
  left.wdr_dims = {2, 1};
  left.h1_bounds = {0, 0};
  left.kernel_dims = {1};
  left.dim_z = 1;
  right.wdr_dims = {2, 3};
  right.h1_bounds = {2, 0};
  right.kernel_dims = {1};
  right.dim_z = 0;
  MoreInequalityData both;
  both.wdr_dims = {2, 1, 2, 3};
  both.h1_bounds = {0, 0, 2, 0};
  both.kernel_dims = {1, 0, 1};
  both.dim_z = 1;
  CHECK(more_inequality_eval(both).margin ==
        more_inequality_eval(left).margin + more_inequality_eval(right).margin);

  MoreInequalityData bad;
  bad.wdr_dims = {1, 1};
  bad.h1_bounds = {0};
  CHECK_THROWS_WITH_AS(more_inequality_eval(bad), doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("growth deficit case 1 with exact metabelian dimensions") {
  GrowthParams p;
  p.gens = 2;
  p.soule = true;
  p.iwasawa_torsion = true;
  auto rep = growth_deficit(1, p, 8);
  REQUIRE(rep.deficit.size() == 8);
  CHECK(rep.nondecreasing);
  CHECK(rep.first_positive >= 1);
  CHECK(rep.first_positive <= 8);
  CHECK(rep.deficit[5] > 0);  // D(6) positive
  // exact values: increments 2,1,0,3,0,5,0,7
  std::vector<long long> expect{2, 3, 3, 6, 6, 11, 11, 18};
  for (int i = 0; i < 8; ++i) CHECK(rep.deficit[static_cast<size_t>(i)] == expect[static_cast<size_t>(i)]);

  GrowthParams missing = p;
  missing.soule = false;
  CHECK_THROWS_WITH_AS(growth_deficit(1, missing, 4), doctest::Contains("MissingFlag"), Error);

  // n = 1: a single abelian term
  auto rep1 = growth_deficit(1, p, 1);
  CHECK(rep1.deficit.size() == 1);
  CHECK(rep1.deficit[0] == 2);
}

TEST_CASE("growth deficit cases 3 and 4") {
  GrowthParams p3;
  p3.iwasawa_torsion = true;
  p3.h1_exceptional_total = 3;
  auto rep3 = growth_deficit(3, p3, 6);
  CHECK(rep3.nondecreasing);
  CHECK(rep3.first_positive == 4);  // deficit linear in n minus the constant

  GrowthParams p4;
  p4.dims = {2, 3, 4};
  p4.cminus = {1, 1, 1};
  p4.genus = 1;
  p4.ck_constant = 0;
  auto rep4 = growth_deficit(4, p4, 3);
  CHECK(rep4.deficit == std::vector<Rational>{1, 3, 6});
  p4.ck_constant = 1;
  auto rep4b = growth_deficit(4, p4, 3);
  CHECK(rep4b.deficit == std::vector<Rational>{0, 1, 3});
  p4.ck_constant = -1;
  CHECK_THROWS_WITH_AS(growth_deficit(4, p4, 3), doctest::Contains("MissingFlag"), Error);
}

TEST_CASE("Siksek audit") {
  auto fixture = prym_fixture();
  auto rep = siksek_question_audit(fixture);
  CHECK(rep.condition_satisfied);  // rank 4 <= (3-1)*2
  CHECK(rep.obstruction_present);
  REQUIRE(rep.witness.has_value());

  CurveData clean = basic(2, 2, 2, 0, 2);
  clean.models.push_back({"X over K", 2, 2, 2});
  auto rep2 = siksek_question_audit(clean);
  CHECK(rep2.condition_satisfied);
  CHECK_FALSE(rep2.obstruction_present);

  CurveData bad = clean;
  bad.models.push_back({"violating model", 1, 2, 5});
  auto rep3 = siksek_question_audit(bad);
  CHECK_FALSE(rep3.condition_satisfied);
  bool named = false;
  for (auto& row : rep3.rows)
    if (!row.satisfied && row.label == "violating model") named = true;
  CHECK(named);
}

TEST_CASE("verdicts are deterministic functions of the data") {
  CurveData c = basic(2, 2, 0, 1, 4);
  c.hom_vanishing = true;
  c.h1f = 4;
  c.ns_rank = 2;
  auto a = qc_depth2_check(c);
  auto b = qc_depth2_check(c);
  CHECK(a.verdict == b.verdict);
  CHECK(a.bound == b.bound);
}
