#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kim/rational.hpp"

namespace kim::criteria {

// Quotient/cover bookkeeping for the base-change Prym obstruction.
struct CoverRecord {
  std::string label;
  long long subfield_degree = 1;  // the quotient curve is defined over this subfield
  long long quotient_genus = 0;
  long long quotient_rank = -1;  // -1 when unknown
  long long prym_rank = -1;
  bool quotient_padic_dense = false;
  bool prym_padic_dense = false;
};

// Intermediate-field model for the Chabauty--Coleman rank condition.
struct ModelRecord {
  std::string label;
  long long field_degree = 1;  // [L:Q]
  long long genus = 0;
  long long rank = 0;  // rk Jac(X')(L)
};

struct CurveData {
  std::string label;
  long long genus = 0;
  long long degree = 1;  // d = [K:Q]
  long long r1 = 0, r2 = 0;
  long long mw_rank = 0;
  long long h1f = -1;  // Selmer rank; -1 means "use mw_rank" (finite Sha)
  long long ns_rank = 1;
  bool hom_vanishing = false;
  bool jk_padic_dense = false;
  std::vector<CoverRecord> covers;
  std::vector<ModelRecord> models;
  std::map<std::string, std::string> annotations;  // verbatim fixture notes

  void validate() const;
  long long selmer_rank() const { return h1f >= 0 ? h1f : mw_rank; }
  // hom-vanishing is vacuous over the rationals
  bool effective_hom_vanishing() const { return hom_vanishing || degree == 1; }
};

enum class Verdict { Finite, Inconclusive, Obstructed };

std::string verdict_name(Verdict v);

struct CriterionReport {
  std::string criterion;
  Verdict verdict = Verdict::Inconclusive;
  long long value = 0;  // the rank-type quantity tested
  long long bound = 0;  // the computed bound
  std::optional<CoverRecord> obstruction;
  std::vector<std::string> notes;
};

// Depth-one Chabauty over number fields: finite iff r <= d(g-1) under
// hom-vanishing; detects the base-change Prym obstruction otherwise.
CriterionReport depth1_check(const CurveData& c);

// Quadratic Chabauty bound: h1f <= d(g-1) + (d - r1 - r2 + 1)(rho - 1); the
// modified-Selmer variant replaces d(g-1) by dg.
CriterionReport qc_depth2_check(const CurveData& c, bool modified_selmer = false);

// Imaginary quadratic corollary: finite iff h1f = 2g, the p-adic closure of
// J(K) has finite index, and rho > 1.
CriterionReport imag_quadratic_check(const CurveData& c);

struct MoreInequalityData {
  std::vector<long long> wdr_dims;     // dim W_i^{dR}/F^0, degrees 1..n
  std::vector<long long> h1_bounds;    // h^1 of the descended pieces, degrees 1..n
  std::vector<long long> kernel_dims;  // localization kernels, degrees 1..n-1
  long long dim_z = 0;
};

struct MarginReport {
  long long margin = 0;
  Verdict verdict = Verdict::Inconclusive;
};

// margin = sum wdr - dim Z - sum h1 - sum ker; finite iff margin >= 0.
MarginReport more_inequality_eval(const MoreInequalityData& data);

struct GrowthParams {
  // case 1 (punctured line over Q, metabelian bookkeeping)
  int gens = 2;
  long long s_primes = 0;
  bool soule = false;
  bool iwasawa_torsion = false;
  long long kernel_total = 0;
  // case 3 (CM elliptic curve minus the origin)
  long long h1_exceptional_total = 0;
  // case 4 (CM cover): per-degree data and the growth constant
  std::vector<long long> dims;
  std::vector<long long> cminus;
  long long genus = 2;
  long long ck_constant = -1;
};

struct GrowthReport {
  std::vector<Rational> deficit;  // D(1..n), exact partial sums
  bool nondecreasing = true;
  long long first_positive = -1;  // 1-based index; -1 when never positive
};

// Exact deficit bookkeeping for the finiteness cases 1, 3 and 4.
GrowthReport growth_deficit(int case_id, const GrowthParams& params, int n);

struct SiksekModelRow {
  std::string label;
  long long rank = 0;
  long long bound = 0;
  bool satisfied = false;
};

struct SiksekReport {
  std::vector<SiksekModelRow> rows;
  bool condition_satisfied = true;
  bool obstruction_present = false;
  std::optional<CoverRecord> witness;
};

// Per-model audit of the rank condition, plus base-change Prym detection.
SiksekReport siksek_question_audit(const CurveData& c);

}  // namespace kim::criteria
