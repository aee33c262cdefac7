#include "kim/cohomdim.hpp"

#include "kim/error.hpp"

namespace kim::cohom {

void RepDescriptor::validate() const {
  require(dimension >= 0 && h0 >= 0 && h2 >= 0, "InvalidData", "negative dimension data");
  require(static_cast<long long>(real_places.size()) == r1, "InvalidData",
          "need one (d+, d-) pair per real place");
  for (auto& [p, m] : real_places)
    require(p >= 0 && m >= 0 && p + m == dimension, "InvalidData",
            "eigenspace dimensions must sum to the dimension at every real place");
}

long long euler_h1(const RepDescriptor& rep) {
  rep.validate();
  long long h2 = rep.soule ? 0 : rep.h2;
  long long acc = h2 + rep.h0 + rep.r2 * rep.dimension;
  for (auto& [p, m] : rep.real_places) acc += m;
  return acc;
}

long long artin_tate_h1(const RepDescriptor& w, long long n) {
  require(n > 1, "BadTwist", "Artin--Tate dimensions need twist n > 1");
  w.validate();
  require(w.r1 == 1 && w.r2 == 0, "InvalidData",
          "the parity formula is stated over the rationals");
  const auto& [plus, minus] = w.real_places.at(0);
  return (n % 2) ? plus : minus;
}

bool local_h1_vanishing(long long grading_i) {
  // weights -2i and 2 - 2i are both nonzero iff i is not 0 or 1
  return grading_i != 0 && grading_i != 1;
}

InducedDims induced_dims(long long base_dim, long long subfield_degree) {
  require(subfield_degree >= 1, "InvalidData", "degree must be at least 1");
  require(base_dim >= 0, "InvalidData", "negative dimension");
  InducedDims out;
  out.total = base_dim * subfield_degree;
  out.local_factors.assign(static_cast<size_t>(subfield_degree), base_dim);
  return out;
}

IntersectionCodim intersection_codim(const SubspaceData& s) {
  require(s.a_rows.cols() == s.ambient && s.b_rows.cols() == s.ambient, "DimensionMismatch",
          "subspace bases must live in the declared ambient space");
  IntersectionCodim out;
  out.dim_a = linalg::rank(s.a_rows);
  out.dim_b = linalg::rank(s.b_rows);
  require(out.dim_a == s.a_rows.rows() && out.dim_b == s.b_rows.rows(), "InvalidData",
          "bases must have full row rank");
  MatQ stacked(s.a_rows.rows() + s.b_rows.rows(), s.ambient);
  if (s.a_rows.rows() > 0) stacked.topRows(s.a_rows.rows()) = s.a_rows;
  if (s.b_rows.rows() > 0) stacked.bottomRows(s.b_rows.rows()) = s.b_rows;
  out.dim_sum = linalg::rank(stacked);
  out.dim_intersection = out.dim_a + out.dim_b - out.dim_sum;
  out.codim_in_a = out.dim_a - out.dim_intersection;
  return out;
}

}  // namespace kim::cohom
