#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kim/transport.hpp"

namespace kim::intersect {

using transport::MixedOneForm;
using transport::ThetaSystem;

// Parameterized formal subvariety of L_n x Z (or of Z alone when the Lie
// parameterization is absent). The parameter origin s = 0 is the base point
// and must be pole-free.
struct FormalSubvariety {
  std::vector<std::string> params;
  std::vector<RationalFunction> z_param;  // chart coordinates, in the params
  std::vector<RationalFunction> t_param;  // Lie coordinates; empty if unused
  std::vector<Polynomial> ideal;          // optional: cut equations in (t.., z..)
  unsigned order = 8;

  size_t dim() const { return params.size(); }
  std::vector<Rational> base_z() const;   // z_param evaluated at 0
  // Series expansions at s = 0.
  std::vector<TruncSeries> z_series(unsigned order) const;
  std::vector<TruncSeries> t_series(unsigned order) const;
  // Checks the ideal generators vanish along the parameterization.
  void validate() const;
};

// Restriction of one-forms on Z to V: series one-forms over the parameter
// differentials.
std::vector<forms::SeriesOneForm> restrict_forms(const std::vector<forms::DifferentialForm>& ws,
                                                 const FormalSubvariety& v, unsigned order);

// Same symbolically: per form, rational-function coefficients over ds_j.
std::vector<std::vector<RationalFunction>> restrict_forms_symbolic(
    const std::vector<forms::DifferentialForm>& ws, const FormalSubvariety& v);

// Restriction of the theta system (needs the Lie parameterization).
std::vector<forms::SeriesOneForm> restrict_theta(const ThetaSystem& ts,
                                                 const FormalSubvariety& v, unsigned order);
std::vector<std::vector<RationalFunction>> restrict_theta_symbolic(const ThetaSystem& ts,
                                                                   const FormalSubvariety& v);

struct JetRankResult {
  long long rank = 0;       // certified lower bound for the true rank
  MatQ relations;           // rows: rational kernel vectors at this jet order
  unsigned order = 0;
};

// Rank over Q of the jet coefficient matrix of the restricted forms.
JetRankResult jet_rank(const std::vector<forms::SeriesOneForm>& restricted, unsigned order);

// Exact rank of the span over Q for symbolically restricted forms.
long long symbolic_q_rank(const std::vector<std::vector<RationalFunction>>& restricted);

struct DependencyCertificate {
  enum class Kind { FullRank, ConstantRelation, FunctionRelation };
  Kind kind = Kind::FullRank;
  std::vector<RationalFunction> relation;  // the verified relation coefficients
  // ConstantRelation: rational coefficient vector and the exactness witness
  // h with dh = pullback of sum a_i omega_i.
  VecQ constant_coeffs;
  RationalFunction exactness_witness;
  // FunctionRelation: h1 dh2 in the theta span; lambda gives dh2 = sum lambda_j theta_j.
  RationalFunction h1, h2;
  std::vector<RationalFunction> lambda;
  std::vector<std::string> trace;          // descent steps taken
};

// Depth-1 descent classification of a relation sum a_i theta_i = 0 on V.
// Raises NotARelation when the input fails symbolic verification.
DependencyCertificate descent_depth1(const ThetaSystem& ts,
                                     const std::vector<RationalFunction>& relation,
                                     const FormalSubvariety& v);

// Re-verification used by tests and reports: the relation holds at twice the
// given jet order, and the certificate data satisfies its contracts.
bool verify_certificate(const ThetaSystem& ts, const DependencyCertificate& cert,
                        const FormalSubvariety& v, unsigned order);

struct LocusResult {
  enum class Kind { ZeroIdeal, UnitIdeal, Proper };
  Kind kind = Kind::ZeroIdeal;
  std::vector<Polynomial> generators;  // content-normalized, deduplicated
};

// Equations of the locus where a pair of one-forms is pointwise colinear:
// numerators of all 2x2 minors of the coefficient matrix.
LocusResult colinearity_locus(const forms::DifferentialForm& a, const forms::DifferentialForm& b);

struct UnlikelyReport {
  int ambient_dim = 0;   // r + chart dim
  int v_dim = 0;
  int v_codim = 0;
  int chart_dim = 0;
  long long theta_rank = 0;
  long long theta_count = 0;
  bool rank_deficient = false;
  long long w_dim = 0;         // jet estimate of dim(V ^ graph of J)
  long long w_codim_in_graph = 0;
  bool unlikely = false;       // codim_Delta(W) < codim(V)
  bool degenerate = false;     // zero-dimensional V
  MatQ relations;              // constant relation basis among restricted thetas
  std::vector<DependencyCertificate> certificates;  // depth-1 descents
};

UnlikelyReport unlikely_report(const conn::ReducedConnection& universal,
                               const FormalSubvariety& v, unsigned order);

}  // namespace kim::intersect
