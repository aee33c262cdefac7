#include "kim/criteria.hpp"

#include <algorithm>

#include "kim/error.hpp"
#include "kim/lie.hpp"

namespace kim::criteria {

void CurveData::validate() const {
  require(genus >= 0 && degree >= 1, "InvalidData", "genus/degree out of range");
  require(r1 >= 0 && r2 >= 0 && r1 + 2 * r2 == degree, "InvalidData",
          "place counts must satisfy r1 + 2 r2 = d");
  require(mw_rank >= 0 && ns_rank >= 1, "InvalidData", "ranks out of range");
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Finite: return "finite";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Obstructed: return "obstructed";
  }
  return "?";
}

namespace {

std::optional<CoverRecord> prym_obstruction(const CurveData& c) {
  for (auto& cov : c.covers)
    if (cov.subfield_degree < c.degree && cov.quotient_padic_dense && cov.prym_padic_dense)
      return cov;
  return std::nullopt;
}

}  // namespace

CriterionReport depth1_check(const CurveData& c) {
  c.validate();
  require(c.genus >= 2, "InvalidData", "depth-one criterion needs genus at least 2");
  CriterionReport rep;
  rep.criterion = "depth1";
  rep.value = c.mw_rank;
  rep.bound = c.degree * (c.genus - 1);
  if (!c.effective_hom_vanishing()) {
    if (auto w = prym_obstruction(c)) {
      rep.verdict = Verdict::Obstructed;
      rep.obstruction = w;
      rep.notes.push_back("base-change Prym obstruction: quotient over a proper subfield with "
                          "p-adically dense Mordell-Weil image");
      return rep;
    }
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("hom-vanishing hypothesis not satisfied");
    return rep;
  }
  rep.verdict = (rep.value <= rep.bound) ? Verdict::Finite : Verdict::Inconclusive;
  return rep;
}

CriterionReport qc_depth2_check(const CurveData& c, bool modified_selmer) {
  c.validate();
  require(c.genus >= 2, "InvalidData", "quadratic Chabauty needs genus at least 2");
  require(c.effective_hom_vanishing(), "InvalidData",
          "quadratic Chabauty over number fields needs the hom-vanishing hypothesis");
  CriterionReport rep;
  rep.criterion = modified_selmer ? "qc2-modified" : "qc2";
  rep.value = modified_selmer ? c.mw_rank : c.selmer_rank();
  long long base = modified_selmer ? c.degree * c.genus : c.degree * (c.genus - 1);
  rep.bound = base + (c.degree - c.r1 - c.r2 + 1) * (c.ns_rank - 1);
  rep.verdict = (rep.value <= rep.bound) ? Verdict::Finite : Verdict::Inconclusive;
  return rep;
}

CriterionReport imag_quadratic_check(const CurveData& c) {
  c.validate();
  require(c.r1 == 0 && c.r2 == 1, "WrongField",
          "the explicit corollary is for imaginary quadratic fields");
  CriterionReport rep;
  rep.criterion = "imquad";
  rep.value = c.selmer_rank();
  rep.bound = 2 * c.genus;
  bool finite = c.selmer_rank() == 2 * c.genus && c.jk_padic_dense && c.ns_rank > 1;
  rep.verdict = finite ? Verdict::Finite : Verdict::Inconclusive;
  if (!c.jk_padic_dense) rep.notes.push_back("p-adic density of J(K) not declared");
  if (c.ns_rank <= 1) rep.notes.push_back("needs Neron-Severi rank > 1");
  return rep;
}

MarginReport more_inequality_eval(const MoreInequalityData& data) {
  size_t n = data.wdr_dims.size();
  require(data.h1_bounds.size() == n, "LengthMismatch", "h1 list must match the degree range");
  require(data.kernel_dims.size() + 1 == n || (n == 0 && data.kernel_dims.empty()),
          "LengthMismatch", "kernel list must cover degrees 1..n-1");
  MarginReport rep;
  rep.margin = -data.dim_z;
  for (auto v : data.wdr_dims) rep.margin += v;
  for (auto v : data.h1_bounds) rep.margin -= v;
  for (auto v : data.kernel_dims) rep.margin -= v;
  rep.verdict = rep.margin >= 0 ? Verdict::Finite : Verdict::Inconclusive;
  return rep;
}

GrowthReport growth_deficit(int case_id, const GrowthParams& params, int n) {
  require(n >= 1, "InvalidData", "need a positive depth range");
  std::vector<Rational> increments;
  Rational constant = 0;

  switch (case_id) {
    case 1: {
      require(params.soule, "MissingFlag", "case 1 consumes Soule's theorem (h2 = 0)");
      require(params.iwasawa_torsion, "MissingFlag",
              "case 1 consumes Iwasawa's theorem for the localization kernels");
      auto ctx = lie::LieContext::make(lie::LieAlgebraSpec::free_metabelian(params.gens, n));
      auto dims = ctx->graded_dims();
      for (int i = 1; i <= n; ++i) {
        long long m = dims[static_cast<size_t>(i - 1)];
        long long h1;
        if (i == 1)
          h1 = m * params.s_primes;  // S-unit rank per Tate line
        else
          h1 = (i % 2) ? m : 0;  // Artin--Tate parity per line
        increments.push_back(Rational(m - h1));
      }
      constant = params.kernel_total;
      break;
    }
    case 3: {
      require(params.iwasawa_torsion, "MissingFlag",
              "case 3 consumes Iwasawa's theorem (torsion module)");
      for (int i = 1; i <= n; ++i) increments.push_back(Rational(1));
      constant = params.h1_exceptional_total;
      break;
    }
    case 4: {
      require(params.ck_constant >= 0, "MissingFlag",
              "case 4 consumes the Coates--Kim growth constant");
      require(params.dims.size() >= static_cast<size_t>(n) &&
                  params.cminus.size() >= static_cast<size_t>(n),
              "InvalidData", "case 4 needs per-degree dims and c-eigenspace dims");
      for (int i = 1; i <= n; ++i)
        increments.push_back(Rational(params.dims[static_cast<size_t>(i - 1)] -
                                      params.cminus[static_cast<size_t>(i - 1)]));
      break;
    }
    default:
      fail("InvalidData", "growth cases are 1, 3 and 4");
  }

  GrowthReport rep;
  Rational acc = 0;
  Rational prev = 0;
  for (int k = 1; k <= n; ++k) {
    acc += increments[static_cast<size_t>(k - 1)];
    Rational d = acc - constant;
    if (case_id == 4) {
      // subtract B k^{2g-1}
      Rational penalty = params.ck_constant * pow_rational(Rational(k), 2 * params.genus - 1);
      d = acc - penalty;
    }
    rep.deficit.push_back(d);
    if (k > 1 && d < prev) rep.nondecreasing = false;
    if (rep.first_positive < 0 && d > 0) rep.first_positive = k;
    prev = d;
  }
  return rep;
}

SiksekReport siksek_question_audit(const CurveData& c) {
  c.validate();
  SiksekReport rep;
  for (auto& m : c.models) {
    SiksekModelRow row;
    row.label = m.label;
    row.rank = m.rank;
    row.bound = (m.genus - 1) * m.field_degree;
    row.satisfied = m.rank <= row.bound;
    rep.condition_satisfied &= row.satisfied;
    rep.rows.push_back(row);
  }
  if (auto w = prym_obstruction(c)) {
    rep.obstruction_present = true;
    rep.witness = w;
  }
  return rep;
}

}  // namespace kim::criteria
