#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kim/cohomdim.hpp"

using namespace kim;
using namespace kim::cohom;

namespace {

RepDescriptor tate_twist_over_q(long long n) {
  // Q_p(n) over Q: one real place, c acts by (-1)^n
  RepDescriptor r;
  r.label = "Qp(" + std::to_string(n) + ")";
  r.dimension = 1;
  r.tate_weight = n;
  r.r1 = 1;
  r.r2 = 0;
  r.real_places = {(n % 2) ? std::make_pair(0LL, 1LL) : std::make_pair(1LL, 0LL)};
  return r;
}

}  // namespace

TEST_CASE("Euler characteristic h1 values") {
  // K = Q, W = Qp(1): h0 = 0, h2 = s, d- = 1 -> h1 = s + 1
  for (long long s : {0, 1, 2}) {
    RepDescriptor r = tate_twist_over_q(1);
    r.h2 = s;
    CHECK(euler_h1(r) == s + 1);
  }

  // imaginary quadratic, dim W = 2, h0 = h2 = 0 -> h1 = 2
  RepDescriptor iq;
  iq.dimension = 2;
  iq.r1 = 0;
  iq.r2 = 1;
  CHECK(euler_h1(iq) == 2);

  // K = Q, W = Qp(3) with the soule flag -> h1 = 1
  RepDescriptor q3 = tate_twist_over_q(3);
  q3.h2 = 7;  // ignored under the flag
  q3.soule = true;
  CHECK(euler_h1(q3) == 1);
}

TEST_CASE("Euler h1 is additive in direct sums") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<long long> d(0, 4);
  for (int t = 0; t < 20; ++t) {
    RepDescriptor a, b;
    a.dimension = d(rng) + 1;
    b.dimension = d(rng) + 1;
    a.r1 = b.r1 = 1;
    a.r2 = b.r2 = 2;
    long long am = d(rng) % (a.dimension + 1), bm = d(rng) % (b.dimension + 1);
    a.real_places = {{a.dimension - am, am}};
    b.real_places = {{b.dimension - bm, bm}};
    a.h0 = d(rng);
    b.h0 = d(rng);
    a.h2 = d(rng);
    b.h2 = d(rng);
    RepDescriptor sum;
    sum.dimension = a.dimension + b.dimension;
    sum.r1 = 1;
    sum.r2 = 2;
    sum.real_places = {{a.real_places[0].first + b.real_places[0].first,
                        a.real_places[0].second + b.real_places[0].second}};
    sum.h0 = a.h0 + b.h0;
    sum.h2 = a.h2 + b.h2;
    CHECK(euler_h1(sum) == euler_h1(a) + euler_h1(b));
  }
}

TEST_CASE("Artin--Tate parity values") {
  RepDescriptor triv;
  triv.dimension = 1;
  triv.r1 = 1;
  triv.real_places = {{1, 0}};
  CHECK(artin_tate_h1(triv, 3) == 1);  // odd
  CHECK(artin_tate_h1(triv, 2) == 0);  // even

  RepDescriptor two;
  two.dimension = 2;
  two.r1 = 1;
  two.real_places = {{1, 1}};
  CHECK(artin_tate_h1(two, 2) == 1);

  CHECK_THROWS_WITH_AS(artin_tate_h1(triv, 1), doctest::Contains("BadTwist"), Error);

  // parity table: h1(W, n) + h1(W, n+1) = dim W for dims <= 4, twists 2..7
  for (long long dim = 1; dim <= 4; ++dim)
    for (long long plus = 0; plus <= dim; ++plus) {
      RepDescriptor w;
      w.dimension = dim;
      w.r1 = 1;
      w.real_places = {{plus, dim - plus}};
      for (long long n = 2; n <= 6; ++n)
        CHECK(artin_tate_h1(w, n) + artin_tate_h1(w, n + 1) == dim);
    }
}

TEST_CASE("local vanishing by weights") {
  CHECK(local_h1_vanishing(2));
  CHECK_FALSE(local_h1_vanishing(1));
  CHECK(local_h1_vanishing(5));
}

TEST_CASE("induced dimension bookkeeping") {
  auto r = induced_dims(2, 3);
  CHECK(r.total == 6);
  CHECK(r.local_factors == std::vector<long long>{2, 2, 2});
  CHECK(induced_dims(5, 1).total == 5);
  auto r2 = induced_dims(4, 2);
  CHECK(r2.total == 8);
  CHECK(r2.local_factors == std::vector<long long>{4, 4});
}

TEST_CASE("subspace intersection codimension") {
  SubspaceData lines;
  lines.ambient = 2;
  lines.a_rows = MatQ(1, 2);
  lines.a_rows << 1, 0;
  lines.b_rows = MatQ(1, 2);
  lines.b_rows << 0, 1;
  auto r = intersection_codim(lines);
  CHECK(r.dim_intersection == 0);
  CHECK(r.codim_in_a == 1);

  SubspaceData same;
  same.ambient = 3;
  same.a_rows = MatQ(2, 3);
  same.a_rows << 1, 0, 0, 0, 1, 0;
  same.b_rows = same.a_rows;
  CHECK(intersection_codim(same).codim_in_a == 0);

  // random 3- and 4-dimensional subspaces of Q^6 against the rank identity
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int t = 0; t < 25; ++t) {
    MatQ a(3, 6), b(4, 6);
    do
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = coef(rng);
    while (linalg::rank(a) < 3);
    do
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j) b(i, j) = coef(rng);
    while (linalg::rank(b) < 4);
    SubspaceData s{6, a, b};
    auto rr = intersection_codim(s);
    MatQ stacked(7, 6);
    stacked.topRows(3) = a;
    stacked.bottomRows(4) = b;
    CHECK(rr.dim_intersection == 3 + 4 - linalg::rank(stacked));
    CHECK(rr.dim_intersection >= 1);  // 3 + 4 > 6
  }

  SubspaceData bad;
  bad.ambient = 2;
  bad.a_rows = MatQ(1, 3);
  bad.a_rows << 1, 0, 0;
  bad.b_rows = MatQ(1, 2);
  bad.b_rows << 1, 0;
  CHECK_THROWS_WITH_AS(intersection_codim(bad), doctest::Contains("DimensionMismatch"), Error);
}
