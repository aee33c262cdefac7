#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kim/linalg.hpp"

namespace kim::cohom {

// Dimension-level description of a Galois representation.
struct RepDescriptor {
  std::string label;
  long long dimension = 0;
  long long tate_weight = 0;                        // Tate-twist weight
  std::vector<std::pair<long long, long long>> real_places;  // (d+, d-) per real place
  long long r1 = 0, r2 = 0;                         // real / complex places of the field
  long long h0 = 0;
  long long h2 = 0;
  bool soule = false;                               // force h2 = 0 (Tate twists n > 1)
  std::optional<long long> induced_from_degree;

  void validate() const;
};

struct SubspaceData {
  long long ambient = 0;
  MatQ a_rows, b_rows;  // row bases of the two subspaces
};

// Global Euler characteristic:
// h1 = h2 + h0 + sum_{v real} dim W^{c_v = -1} + r2 * dim W.
long long euler_h1(const RepDescriptor& rep);

// Artin--Tate dimension: for twists n > 1 over Q,
// h1 = dim W^{c=1} (n odd) or dim W^{c=-1} (n even). BadTwist for n <= 1.
long long artin_tate_h1(const RepDescriptor& w, long long n);

// H^1(G_{Q_v}, W) = 0 for v away from p iff neither W nor W*(1) has weight
// zero; in the gr_i normalization (weight -2i) that means i > 1.
bool local_h1_vanishing(long long grading_i);

struct InducedDims {
  long long total = 0;
  std::vector<long long> local_factors;  // per embedding at a split prime
};

InducedDims induced_dims(long long base_dim, long long subfield_degree);

struct IntersectionCodim {
  long long dim_a = 0, dim_b = 0, dim_sum = 0, dim_intersection = 0;
  long long codim_in_a = 0;
};

// Exact ranks: dim(A ^ B) = dim A + dim B - dim(A + B).
IntersectionCodim intersection_codim(const SubspaceData& s);

}  // namespace kim::cohom
