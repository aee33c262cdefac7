#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "kim/lie.hpp"
#include "kim/uea.hpp"

using namespace kim;
using namespace kim::lie;

namespace {

using LE = LieElement<Rational>;
using UE = UEAElement<Rational>;

LE gen(const LieContextPtr& ctx, int g) { return LE::generator(ctx, g, Rational(1)); }

LE random_element(const LieContextPtr& ctx, std::mt19937& rng, int max_degree) {
  std::uniform_int_distribution<int> coef(-3, 3);
  LE out = LE::zero(ctx);
  auto dims = ctx->graded_dims();
  int idx = 0;
  for (int d = 1; d <= max_degree && d <= ctx->cls(); ++d)
    for (int k = 0; k < dims[static_cast<size_t>(d - 1)]; ++k, ++idx) {
      int c = coef(rng);
      if (c) out.add(idx, Rational(c));
    }
  return out;
}

// Independent oracle: spans of all binary bracketings, expanded in the free
// associative algebra, ranked per degree.
std::vector<long long> bracketing_span_dims(int gens, int cls) {
  using Vec = std::map<std::vector<int>, Rational>;
  std::vector<std::vector<Vec>> by_degree(static_cast<size_t>(cls) + 1);
  for (int g = 0; g < gens; ++g) by_degree[1].push_back(Vec{{{g}, Rational(1)}});
  auto mul = [](const Vec& a, const Vec& b, const Rational& sgn, Vec& out) {
    for (auto& [wa, ca] : a)
      for (auto& [wb, cb] : b) {
        std::vector<int> w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        out[w] += sgn * ca * cb;
      }
  };
  for (int d = 2; d <= cls; ++d)
    for (int da = 1; da < d; ++da)
      for (auto& a : by_degree[static_cast<size_t>(da)])
        for (auto& b : by_degree[static_cast<size_t>(d - da)]) {
          Vec v;
          mul(a, b, 1, v);
          mul(b, a, -1, v);
          for (auto it = v.begin(); it != v.end();)
            it = (it->second == 0) ? v.erase(it) : std::next(it);
          if (!v.empty()) by_degree[static_cast<size_t>(d)].push_back(std::move(v));
        }
  std::vector<long long> dims;
  for (int d = 1; d <= cls; ++d) {
    auto& vecs = by_degree[static_cast<size_t>(d)];
    std::map<std::vector<int>, int> col;
    for (auto& v : vecs)
      for (auto& [w, c] : v) col.emplace(w, 0);
    int nc = 0;
    for (auto& [w, c] : col) c = nc++;
    MatQ m(static_cast<Eigen::Index>(vecs.size()), nc);
    m.setConstant(Rational(0));
    for (size_t r = 0; r < vecs.size(); ++r)
      for (auto& [w, c] : vecs[r]) m(static_cast<Eigen::Index>(r), col[w]) = c;
    dims.push_back(linalg::rank(m));
  }
  return dims;
}

}  // namespace

TEST_CASE("free Hall basis dimensions against independent oracles") {
  // spans of all bracketings, linear-algebra rank
  auto free23 = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 3));
  CHECK(free23->graded_dims() == std::vector<int>{2, 1, 2});
  CHECK(bracketing_span_dims(2, 3) == std::vector<long long>{2, 1, 2});
  CHECK(bracketing_span_dims(2, 5) == std::vector<long long>{2, 1, 2, 3, 6});
  CHECK(bracketing_span_dims(3, 4) == std::vector<long long>{3, 3, 8, 18});

  // Witt / Moebius counts
  for (int m = 1; m <= 3; ++m) {
    auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(m, 8));
    auto dims = ctx->graded_dims();
    for (int d = 1; d <= 8; ++d)
      CHECK(dims[static_cast<size_t>(d - 1)] == witt_dimension(m, d));
  }

  auto free25 = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 5));
  CHECK(free25->graded_dims() == std::vector<int>{2, 1, 2, 3, 6});

  auto abelian = LieContext::make(LieAlgebraSpec::free_nilpotent(1, 3));
  CHECK(abelian->graded_dims() == std::vector<int>{1, 0, 0});
}

TEST_CASE("metabelian and surface quotients") {
  auto meta25 = LieContext::make(LieAlgebraSpec::free_metabelian(2, 5));
  CHECK(meta25->graded_dims() == std::vector<int>{2, 1, 2, 3, 4});

  auto meta26 = LieContext::make(LieAlgebraSpec::free_metabelian(2, 6));
  CHECK(meta26->graded_dims() == std::vector<int>{2, 1, 2, 3, 4, 5});

  auto surf22 = LieContext::make(LieAlgebraSpec::surface(2, 2, true));
  CHECK(surf22->graded_dims() == std::vector<int>{4, 5});

  // genus-1 surface: the relation kills the only degree-2 element
  auto surf12 = LieContext::make(LieAlgebraSpec::surface(1, 3, true));
  CHECK(surf12->graded_dims() == std::vector<int>{2, 0, 0});
}

TEST_CASE("bracket basics") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 3));
  // [x1, x2] is the degree-2 Hall element (index 2)
  auto b = bracket(gen(ctx, 0), gen(ctx, 1));
  REQUIRE(b.coords.size() == 1);
  CHECK(b.coords.begin()->first == 2);
  CHECK(b.coords.begin()->second == 1);
  CHECK(ctx->basis().basis_name(2) == "[x1,x2]");

  auto x = random_element(ctx, *new std::mt19937(3), 2);
  CHECK(bracket(x, x).is_zero());
}

TEST_CASE("antisymmetry and Jacobi hold on random elements up to class 6") {
  std::mt19937 rng(17);
  for (auto spec : {LieAlgebraSpec::free_nilpotent(2, 6), LieAlgebraSpec::free_metabelian(3, 4),
                    LieAlgebraSpec::surface(2, 4, true),
                    LieAlgebraSpec::product_of_free(2, 2, 4)}) {
    auto ctx = LieContext::make(spec);
    for (int trial = 0; trial < 8; ++trial) {
      LE x = random_element(ctx, rng, ctx->cls());
      LE y = random_element(ctx, rng, ctx->cls());
      LE z = random_element(ctx, rng, ctx->cls());
      CHECK((bracket(x, y) + bracket(y, x)).is_zero());
      LE jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
      CHECK(jac.is_zero());
    }
  }
}

TEST_CASE("structure constants are graded") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 5));
  const auto& basis = ctx->basis();
  for (int i = 0; i < ctx->dim(); ++i)
    for (int j = 0; j < ctx->dim(); ++j) {
      int d = basis.degree_of(i) + basis.degree_of(j);
      for (auto& [k, c] : ctx->bracket(i, j)) CHECK(basis.degree_of(k) == d);
    }
}

TEST_CASE("BCH in class 2 against a dense associative oracle") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 2));
  Rational one(1);
  UE lhs = uea_exp(gen(ctx, 0), one) * uea_exp(gen(ctx, 1), one);
  LE z = uea_log(lhs, one);
  // x1 + x2 + 1/2 [x1,x2]
  REQUIRE(z.coords.size() == 3);
  CHECK(z.coords.at(0) == 1);
  CHECK(z.coords.at(1) == 1);
  CHECK(z.coords.at(2) == Rational(1, 2));

  // independent dense word computation
  using Vec = std::map<std::vector<int>, Rational>;
  auto mul = [](const Vec& a, const Vec& b) {
    Vec out;
    for (auto& [wa, ca] : a)
      for (auto& [wb, cb] : b) {
        if (wa.size() + wb.size() > 2) continue;
        std::vector<int> w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        out[w] += ca * cb;
      }
    return out;
  };
  Vec e1{{{0}, 1}}, e2{{{1}, 1}}, unit{{{}, 1}};
  auto expo = [&](const Vec& v) {
    Vec acc = unit, p = unit;
    for (int k = 1; k <= 2; ++k) {
      p = mul(p, v);
      for (auto& [w, c] : p) acc[w] += c / factorial(static_cast<unsigned>(k));
    }
    return acc;
  };
  Vec prod = mul(expo(e1), expo(e2));
  Vec n = prod;
  n[{}] -= 1;
  Vec logv;
  Vec p = unit;
  for (int k = 1; k <= 2; ++k) {
    p = mul(p, n);
    for (auto& [w, c] : p) logv[w] += Rational((k % 2) ? 1 : -1, k) * c;
  }
  CHECK(logv[{0}] == 1);
  CHECK(logv[{1}] == 1);
  CHECK(logv[{0, 1}] == Rational(1, 2));
  CHECK(logv[{1, 0}] == Rational(-1, 2));
}

TEST_CASE("exp of zero is one; log and exp are mutually inverse") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 5));
  Rational one(1);
  UE e0 = uea_exp(LE::zero(ctx), one);
  CHECK(e0.terms.size() == 1);
  CHECK(*e0.find({}) == 1);

  std::mt19937 rng(5);
  for (int t = 0; t < 6; ++t) {
    LE x = random_element(ctx, rng, 5);
    LE back = uea_log(uea_exp(x, one), one);
    CHECK((back - x).is_zero());
  }
}

TEST_CASE("log rejects elements with constant term differing from 1") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 3));
  UE u = UE::one(ctx, Rational(2));
  CHECK_THROWS_WITH_AS(uea_log(u, Rational(1)), doctest::Contains("NotUnipotent"), Error);
}

TEST_CASE("group-like iff primitive, in both directions") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 3));
  Rational one(1);

  // primitive -> group-like (class 3)
  UE g = uea_exp(gen(ctx, 0), one);
  CHECK(grouplike_defect(g).is_zero());

  std::mt19937 rng(11);
  for (int t = 0; t < 4; ++t) {
    LE x = random_element(ctx, rng, 3);
    CHECK(grouplike_defect(uea_exp(x, one)).is_zero());
    // primitivity of log side
    auto delta = coproduct(embed(x));
    TensorElement<Rational> expect{ctx, {}};
    for (auto& [w, c] : embed(x).terms) {
      expect.add(w, {}, c);
      expect.add({}, w, c);
    }
    expect.reduce();
    CHECK((delta - expect).is_zero());
  }

  // corrupt a group-like element outside the Lie span: no longer group-like
  UE bad = g;
  bad.add(Word{0, 1}, Rational(1, 7));
  bad.reduce();
  CHECK_FALSE(grouplike_defect(bad).is_zero());
  CHECK_THROWS_WITH_AS(uea_log(bad, one), doctest::Contains("NotUnipotent"), Error);
}

TEST_CASE("ad series operators") {
  auto ctx2 = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 2));
  // truncates at the first bracket when [x,[x,y]] = 0
  LE y2 = ad_series_apply(AdSeriesKind::Expm1OverT, gen(ctx2, 0), gen(ctx2, 1));
  CHECK(y2.coords.at(1) == 1);
  CHECK(y2.coords.at(2) == Rational(1, 2));

  auto ctx3 = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 3));
  LE r = ad_series_apply(AdSeriesKind::Exp, gen(ctx3, 0), gen(ctx3, 1));
  // x2 + [x1,x2] + 1/2 [x1,[x1,x2]]
  CHECK(r.coords.at(1) == 1);
  CHECK(r.coords.at(2) == 1);
  CHECK(r.coords.at(3) == Rational(1, 2));
  CHECK(r.coords.count(4) == 0);

  // (t/(e^t-1)) ( (e^t-1)/t ) = identity
  std::mt19937 rng(23);
  for (int t = 0; t < 6; ++t) {
    LE x = random_element(ctx3, rng, 1);
    LE z = random_element(ctx3, rng, 3);
    LE roundtrip =
        ad_series_apply(AdSeriesKind::TOverExpm1, x, ad_series_apply(AdSeriesKind::Expm1OverT, x, z));
    CHECK((roundtrip - z).is_zero());
  }
}

TEST_CASE("Poincare derivative-of-exponential identity through class 3") {
  auto ctx = LieContext::make(LieAlgebraSpec::free_nilpotent(2, 3));
  std::vector<std::string> svars{"s"};
  Polynomial one = Polynomial::constant(svars, 1);
  Polynomial s = Polynomial::variable(svars, 0);

  using LP = LieElement<Polynomial>;
  using UP = UEAElement<Polynomial>;
  LP x{ctx, {}};  // x(s) = s x1 + s^2 x2
  x.add(0, s);
  x.add(1, s * s);
  LP dx{ctx, {}};  // x'(s)
  dx.add(0, one);
  dx.add(1, s * Rational(2));

  UP e = uea_exp(x, one);
  UP de{ctx, {}};
  for (auto& [w, c] : e.terms) de.add(w, c.derivative(0));
  LP minus_x = LP::zero(ctx) - x;
  UP rhs_op = de * uea_exp(minus_x, one);

  LP lie_side = ad_series_apply(AdSeriesKind::Expm1OverT, x, dx);
  UP expect = embed(lie_side);
  CHECK((rhs_op - expect).is_zero());
}

TEST_CASE("ihara syzygy module description of the commutator") {
  auto meta2 = LieContext::make(LieAlgebraSpec::free_metabelian(2, 5));
  auto rep = ihara_module_check(meta2);
  CHECK(rep.all_match);
  std::vector<long long> syz;
  for (auto& row : rep.rows) syz.push_back(row.syzygy_dim);
  CHECK(syz == std::vector<long long>{1, 2, 3, 4});

  auto surf1 = LieContext::make(LieAlgebraSpec::surface(1, 3, true));
  auto rep1 = ihara_module_check(surf1);
  CHECK(rep1.all_match);
  CHECK(rep1.rows[0].syzygy_dim == 0);

  auto meta3 = LieContext::make(LieAlgebraSpec::free_metabelian(3, 4));
  CHECK(ihara_module_check(meta3).all_match);

  auto surf2 = LieContext::make(LieAlgebraSpec::surface(2, 4, true));
  CHECK(ihara_module_check(surf2).all_match);
}

TEST_CASE("ad injectivity on metabelian quotients") {
  auto meta2 = LieContext::make(LieAlgebraSpec::free_metabelian(2, 5));
  auto rep = ad_injectivity_check(meta2, {Rational(1), Rational(0)}, 2, 4);
  CHECK(rep.all_injective);

  auto meta1 = LieContext::make(LieAlgebraSpec::free_metabelian(1, 3));
  CHECK_THROWS_WITH_AS(ad_injectivity_check(meta1, {Rational(1)}, 1, 2),
                       doctest::Contains("DegenerateSpec"), Error);

  auto surf2 = LieContext::make(LieAlgebraSpec::surface(2, 5, true));
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int t = 0; t < 5; ++t) {
    std::vector<Rational> v(4, Rational(0));
    bool nz = false;
    while (!nz)
      for (auto& c : v) {
        c = coef(rng);
        nz |= (c != 0);
      }
    CHECK(ad_injectivity_check(surf2, v, 2, 4).all_injective);
  }
}

TEST_CASE("c eigenspace bookkeeping") {
  // swap of two generator blocks, diagonal W: all c-fixed in degree 1
  LieAlgebraSpec spec = LieAlgebraSpec::free_nilpotent(4, 2);
  spec.involution = Involution{{{2, 1}, {3, 1}, {0, 1}, {1, 1}}};
  auto ctx = LieContext::make(spec);
  MatQ w(2, 4);
  w << 1, 0, 1, 0, 0, 1, 0, 1;
  auto d1 = c_eigenspaces(ctx, w, 1);
  CHECK(d1.dim == 2);
  CHECK(d1.plus == 2);
  CHECK(d1.minus == 0);

  // c = -1 on all generators: degree-2 brackets are c-fixed
  LieAlgebraSpec neg = LieAlgebraSpec::free_nilpotent(2, 2);
  neg.involution = Involution{{{0, -1}, {1, -1}}};
  auto nctx = LieContext::make(neg);
  MatQ w2(2, 2);
  w2 << 1, 0, 0, 1;
  auto d2 = c_eigenspaces(nctx, w2, 2);
  CHECK(d2.dim == 1);
  CHECK(d2.plus == 1);
  CHECK(d2.minus == 0);

  // swap involution, diagonal W, degree 2: exhaustive bracket span
  auto d3 = c_eigenspaces(ctx, w, 2);
  CHECK(d3.dim == 1);
  CHECK(d3.plus == 1);
  CHECK(d3.minus == 0);
}

TEST_CASE("c-twisted injection on the swap-involution family") {
  // two free-metabelian factors swapped by c, W surjecting onto a factor
  LieAlgebraSpec spec = LieAlgebraSpec::product_of_free(2, 2, 4);
  spec.metabelian = true;
  spec.involution = Involution{{{2, 1}, {3, 1}, {0, 1}, {1, 1}}};
  auto ctx = LieContext::make(spec);
  MatQ w(2, 4);
  w << 1, 0, 1, 0, 0, 1, 0, -1;  // x1 + x3, x2 - x4
  // The injection concerns the commutator part, degrees >= 2.
  for (int d = 2; d <= 3; ++d) {
    auto row = c_twisted_injection_check(ctx, w, d);
    INFO("degree ", d, " minus_dim ", row.minus_dim, " rank ", row.rank);
    CHECK(row.minus_dim > 0);
    CHECK(row.injective);
  }
}
