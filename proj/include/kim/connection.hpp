#pragma once

#include <vector>

#include "kim/forms.hpp"
#include "kim/lie.hpp"

namespace kim::conn {

using forms::Chart;
using forms::DifferentialForm;
using forms::FormSpacePtr;

// Square matrix of one-forms over a common space, block structure V_0..V_n.
struct FormMatrix {
  FormSpacePtr space;
  std::vector<int> block_dims;
  std::vector<std::vector<DifferentialForm>> entries;  // [row][col]

  int dim() const;
  int block_of(int index) const;      // which block an absolute index lies in
  int block_start(int block) const;
  static FormMatrix zero(FormSpacePtr space, std::vector<int> block_dims);
  bool strictly_block_lower() const;
};

// Unipotent change of basis 1 + M, M strictly block-lower with 0-form entries.
struct GaugeTransform {
  std::vector<int> block_dims;
  std::vector<std::vector<RationalFunction>> m;  // [row][col]

  static GaugeTransform identity(const std::vector<std::string>& vars,
                                 std::vector<int> block_dims);
  bool is_identity() const;
};

// Block-nilpotent connection matrix with its S-chain membership data.
struct ReducedConnection {
  FormMatrix lambda;
  std::vector<MatQ> s_chain;     // S_1..S_n, rows over one-atoms
  std::vector<bool> certified;   // per nil index 1..n

  // Set for universal connections: the fiber model and the omega data.
  lie::LieContextPtr fiber;
  std::vector<DifferentialForm> omega;  // per Lie basis index (zero beyond degree one)
  int depth = 0;
};

// S_1..S_n per the reduced-form recursion: S_i is the echelon complement of
// the exact forms inside sum_{j+k=i} d^{-1}(S_j wedge S_k). S_1 rows must be
// closed with independent classes.
std::vector<MatQ> build_s_chain(const FormSpacePtr& space, const MatQ& s1_rows, int depth);

// Curvature d Lambda + Lambda ^ Lambda; zero iff flat.
std::vector<std::vector<DifferentialForm>> flatness_residual(const FormMatrix& lambda);
bool is_flat(const FormMatrix& lambda);
size_t residual_entry_count(const std::vector<std::vector<DifferentialForm>>& residual);

// Exact gauge action (1+M) Lambda (1+M)^{-1} - d(1+M) (1+M)^{-1}.
FormMatrix apply_gauge(const GaugeTransform& g, const FormMatrix& lambda);

// Composition g2 after g1: (1+M2)(1+M1).
GaugeTransform compose(const GaugeTransform& g2, const GaugeTransform& g1);

// Gauge normalization by descending induction; raises NotFlat / NotReducible.
std::pair<ReducedConnection, GaugeTransform> reduce_to_reduced_form(
    const FormMatrix& lambda, const std::vector<MatQ>& s_chain);

// Does every nil-index-l block have constant entries inside S_l?
std::vector<bool> certify_blocks(const FormMatrix& lambda, const std::vector<MatQ>& s_chain);

// The depth-n universal connection on a punctured-line chart or product:
// omega = sum e_i (x) omega_i over the degree-one Hall generators, and the
// enveloping-algebra matrix -Lmult(omega) in the reduced word basis.
ReducedConnection build_universal(const Chart& chart, int depth);

// The Lie algebra of the chart: one generator per dlog atom, factors commute.
lie::LieAlgebraSpec chart_lie_spec(const Chart& chart, int depth);

}  // namespace kim::conn
