#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kim/linalg.hpp"
#include "kim/rational.hpp"

namespace kim::lie {

// Signed generator permutation; squares to the identity.
struct Involution {
  // images[i] = (generator index, sign) for generator i.
  std::vector<std::pair<int, int>> images;
};

struct LieAlgebraSpec {
  int gens = 0;
  int cls = 1;  // nilpotency class
  bool metabelian = false;
  std::optional<int> surface_genus;        // requires gens == 2 * genus
  std::vector<std::string> custom_ideal;   // homogeneous bracket expressions
  std::optional<Involution> involution;

  static LieAlgebraSpec free_nilpotent(int gens, int cls);
  static LieAlgebraSpec free_metabelian(int gens, int cls);
  static LieAlgebraSpec surface(int genus, int cls, bool metabelian = false);
  // Direct sum of `factors` free Lie algebras on `gens_per_factor` generators
  // each: the custom ideal kills all cross-factor brackets.
  static LieAlgebraSpec product_of_free(int factors, int gens_per_factor, int cls);
};

// Node of a Hall tree; generators have left == right == -1.
struct HallWord {
  int left = -1;
  int right = -1;
  int gen = -1;
  int degree = 1;
};

using SparseQ = std::map<int, Rational>;       // index -> coefficient
using WordVec = std::map<size_t, Rational>;    // word code (base-m) -> coefficient

class LieContext;
using LieContextPtr = std::shared_ptr<const LieContext>;

// Hall basis of the declared quotient: an ordered subset of the free Hall
// words, degree-major, whose images form a basis of each graded piece.
struct HallBasis {
  std::vector<HallWord> free_words;            // all free Hall words
  std::vector<std::pair<int, int>> free_slice; // per degree d (1-based): [begin, end)
  std::vector<int> basis_words;                // quotient basis as free word indices
  std::vector<std::pair<int, int>> slice;      // per degree: [begin, end) into basis_words
  std::vector<std::string> gen_names;

  int dim() const { return static_cast<int>(basis_words.size()); }
  int degree_of(int index) const;              // degree of basis element `index`
  std::string word_name(int free_index) const;
  std::string basis_name(int index) const { return word_name(basis_words[index]); }
};

// Algebra context: free Hall machinery, the graded quotient ideal, structure
// constants, and the truncated enveloping algebra apparatus. Logically
// immutable; internal caches fill lazily behind a mutex, so shared concurrent
// use is safe.
class LieContext {
public:
  static LieContextPtr make(const LieAlgebraSpec& spec);

  const LieAlgebraSpec& spec() const { return spec_; }
  const HallBasis& basis() const { return basis_; }
  int gens() const { return spec_.gens; }
  int cls() const { return spec_.cls; }
  int dim() const { return basis_.dim(); }
  std::vector<int> graded_dims() const;

  // Structure constants: [basis_i, basis_j] in quotient coordinates.
  const SparseQ& bracket(int i, int j) const;

  // Associative expansion of quotient basis element i, reduced modulo the
  // enveloping-algebra image of the ideal.
  const WordVec& uea_expansion(int i) const;

  // Reduces an associative word vector of uniform length modulo the ideal.
  void reduce_words(size_t len, WordVec& v) const;
  // Canonical reduced words of the given length (the UEA graded basis).
  const std::vector<size_t>& reduced_words(size_t len) const;

  // Writes a reduced primitive word vector of uniform length in quotient-basis
  // coordinates; fails if it is not in the Lie span.
  SparseQ primitive_to_basis(size_t len, const WordVec& v) const;

  // Echelon row snapshots for coefficient-ring-generic reduction. The pivot
  // entry is part of `row` with coefficient one. `combo` gives the row as a
  // combination of global quotient-basis indices (lie rows only).
  struct EchelonRowView {
    size_t pivot = 0;
    WordVec row;
    SparseQ combo;
  };
  std::vector<EchelonRowView> uea_ideal_rows(size_t len) const;
  std::vector<EchelonRowView> uea_lie_rows(size_t len) const;

  // Involution action on quotient coordinates, block per degree.
  const MatQ& involution_matrix(int degree) const;

  size_t word_count(size_t len) const;  // gens^len
  std::vector<uint8_t> decode_word(size_t len, size_t code) const;
  size_t encode_word(const std::vector<uint8_t>& w) const;

private:
  explicit LieContext(const LieAlgebraSpec& spec);
  void build_free_hall();
  void build_ideal();
  void build_involution();

  const WordVec& expand_free_word(int free_index) const;
  // Converts a degree-homogeneous word vector to free Hall coordinates.
  SparseQ words_to_free_hall(size_t len, const WordVec& v) const;
  SparseQ project_to_quotient(int degree, const SparseQ& free_coords) const;
  SparseQ free_bracket(int fi, int fj) const;
  std::map<int, SparseQ> parse_bracket_expr(const std::string& text) const;
  void ensure_uea(size_t len) const;
  void reduce_nolock(size_t len, WordVec& v) const;

  LieAlgebraSpec spec_;
  HallBasis basis_;

  // Echelon solver for "express this word vector in the given rows".
  struct WordEchelon {
    std::vector<WordVec> rows;          // echelonized, leading code normalized to 1
    std::vector<size_t> pivots;         // leading word code per row
    std::vector<SparseQ> combos;        // row as combination of original inputs
    void add(WordVec v, int original_index);
    // Reduces v in place; returns the combination of original inputs used.
    SparseQ reduce(WordVec& v) const;
  };

  const WordEchelon& free_lie_echelon(int degree) const;

  mutable std::vector<std::optional<WordVec>> free_expansion_memo_;
  mutable std::vector<WordEchelon> free_lie_ech_;  // per degree: Hall expansions
  mutable std::vector<bool> free_lie_ech_ready_;

  std::vector<MatQ> ideal_rows_;  // per degree: ideal span, reduced echelon
  std::vector<std::vector<Eigen::Index>> ideal_pivots_;
  std::vector<std::vector<int>> quotient_positions_;  // per degree: non-pivot free slots

  mutable std::vector<WordEchelon> uea_ideal_ech_;  // per word length
  mutable std::vector<std::vector<size_t>> uea_reduced_words_;
  mutable std::vector<WordEchelon> uea_lie_ech_;    // reduced expansions of quotient basis
  mutable std::vector<bool> uea_ready_;
  mutable std::map<int, WordVec> uea_expansion_cache_;
  mutable std::map<std::pair<int, int>, SparseQ> bracket_cache_;
  mutable std::recursive_mutex mutex_;
  std::vector<MatQ> involution_mats_;
};

// Graded dimension of the free Lie algebra by the Witt/Moebius count.
long long witt_dimension(int gens, int degree);

// Element with coefficients in R (Rational, RationalFunction, Polynomial, or
// TruncSeries); coordinates on the context's quotient Hall basis.
template <typename R>
struct LieElement {
  LieContextPtr ctx;
  std::map<int, R> coords;

  static LieElement zero(LieContextPtr c) { return {std::move(c), {}}; }
  static LieElement generator(LieContextPtr c, int gen, const R& unit) {
    LieElement e{std::move(c), {}};
    e.coords.emplace(gen, unit);
    return e;
  }

  bool is_zero() const {
    for (auto& [i, c] : coords)
      if (!coeff_is_zero(c)) return false;
    return true;
  }
  void add(int index, const R& c) {
    auto it = coords.find(index);
    if (it == coords.end())
      coords.emplace(index, c);
    else {
      it->second = it->second + c;
      if (coeff_is_zero(it->second)) coords.erase(it);
    }
  }
  LieElement operator+(const LieElement& o) const {
    LieElement r = *this;
    for (auto& [i, c] : o.coords) r.add(i, c);
    return r;
  }
  LieElement operator-(const LieElement& o) const {
    LieElement r = *this;
    for (auto& [i, c] : o.coords) r.add(i, negate_coeff(c));
    return r;
  }
  LieElement scaled(const R& s) const {
    LieElement r{ctx, {}};
    for (auto& [i, c] : coords) {
      R v = c * s;
      if (!coeff_is_zero(v)) r.coords.emplace(i, v);
    }
    return r;
  }
  LieElement scaled_by_rational(const Rational& s) const {
    LieElement r{ctx, {}};
    if (s == 0) return r;
    for (auto& [i, c] : coords) r.coords.emplace(i, c * s);
    return r;
  }

  static bool coeff_is_zero(const R& c) {
    if constexpr (std::is_same_v<R, Rational>)
      return c == 0;
    else
      return c.is_zero();
  }
  static R negate_coeff(const R& c) { return -c; }
};

template <typename R>
LieElement<R> bracket(const LieElement<R>& x, const LieElement<R>& y) {
  require(x.ctx == y.ctx, "SpecMismatch", "bracket of elements over different specs");
  LieElement<R> out{x.ctx, {}};
  for (auto& [i, ci] : x.coords)
    for (auto& [j, cj] : y.coords) {
      R prod = ci * cj;
      if (LieElement<R>::coeff_is_zero(prod)) continue;
      for (auto& [k, b] : x.ctx->bracket(i, j)) out.add(k, prod * b);
    }
  return out;
}

// liecore reports ------------------------------------------------------------

struct IharaDegreeRow {
  int degree = 0;
  long long syzygy_dim = 0;   // dim of the syzygy module piece (minus Sym*m in surface mode)
  long long commutator_dim = 0;  // dim gr_degree([L, L]) from the Hall machinery
  bool match = false;
};

struct IharaReport {
  std::vector<IharaDegreeRow> rows;
  bool all_match = true;
};

// Verifies Ihara's description of [L, L] for metabelian (or surface-
// metabelian) quotients degree by degree up to the class.
IharaReport ihara_module_check(const LieContextPtr& ctx);

struct AdInjectivityRow {
  int degree = 0;
  long long domain_dim = 0;
  long long rank = 0;
  bool injective = false;
};

struct AdInjectivityReport {
  std::vector<AdInjectivityRow> rows;
  bool all_injective = true;
};

// Rank check for ad(v): gr_i -> gr_{i+1} over the degree range [lo, hi].
// v is a degree-1 element given by generator coordinates.
AdInjectivityReport ad_injectivity_check(const LieContextPtr& ctx, const std::vector<Rational>& v,
                                         int lo, int hi);

struct CEigenspaceDims {
  int degree = 0;
  long long dim = 0;
  long long plus = 0;   // c = +1
  long long minus = 0;  // c = -1
};

// W is spanned by degree-1 vectors (rows, generator coordinates); W_i is the
// image of W^{(x)i} under iterated bracketing. Requires c(W) = W.
CEigenspaceDims c_eigenspaces(const LieContextPtr& ctx, const MatQ& w_rows, int degree);

// Basis matrix of W_i in quotient coordinates of the given degree (rows).
MatQ bracket_power_span(const LieContextPtr& ctx, const MatQ& w_rows, int degree);

struct CTwistedRow {
  int degree = 0;
  long long minus_dim = 0;  // dim W_i^{c=-1}
  long long rank = 0;       // rank of W_i^{c=-1} -> W_{i+1}/W_{i+1}^{c=-1}
  bool injective = false;
};

// Searches for v in W realizing the injection W_i^{c=-1} -> W_{i+1}/W_{i+1}^{c=-1}
// and reports the best rank found.
CTwistedRow c_twisted_injection_check(const LieContextPtr& ctx, const MatQ& w_rows, int degree);

}  // namespace kim::lie
