#include "kim/lie.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "kim/error.hpp"
#include "kim/polynomial.hpp"

namespace kim::lie {

LieAlgebraSpec LieAlgebraSpec::free_nilpotent(int gens, int cls) {
  LieAlgebraSpec s;
  s.gens = gens;
  s.cls = cls;
  return s;
}

LieAlgebraSpec LieAlgebraSpec::free_metabelian(int gens, int cls) {
  LieAlgebraSpec s = free_nilpotent(gens, cls);
  s.metabelian = true;
  return s;
}

LieAlgebraSpec LieAlgebraSpec::surface(int genus, int cls, bool metabelian) {
  LieAlgebraSpec s = free_nilpotent(2 * genus, cls);
  s.surface_genus = genus;
  s.metabelian = metabelian;
  return s;
}

LieAlgebraSpec LieAlgebraSpec::product_of_free(int factors, int gens_per_factor, int cls) {
  LieAlgebraSpec s = free_nilpotent(factors * gens_per_factor, cls);
  for (int a = 0; a < factors; ++a)
    for (int b = a + 1; b < factors; ++b)
      for (int i = 0; i < gens_per_factor; ++i)
        for (int j = 0; j < gens_per_factor; ++j) {
          std::ostringstream e;
          e << "[x" << (a * gens_per_factor + i + 1) << ",x" << (b * gens_per_factor + j + 1)
            << "]";
          s.custom_ideal.push_back(e.str());
        }
  return s;
}

int HallBasis::degree_of(int index) const { return free_words[basis_words[index]].degree; }

std::string HallBasis::word_name(int free_index) const {
  const HallWord& w = free_words[free_index];
  if (w.gen >= 0) return gen_names[w.gen];
  return "[" + word_name(w.left) + "," + word_name(w.right) + "]";
}

long long witt_dimension(int gens, int degree) {
  // (1/d) sum_{e | d} mu(e) m^{d/e}
  auto mobius = [](int n) {
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
      if (n % p) continue;
      n /= p;
      if (n % p == 0) return 0;
      result = -result;
    }
    if (n > 1) result = -result;
    return result;
  };
  long long acc = 0;
  for (int e = 1; e <= degree; ++e) {
    if (degree % e) continue;
    long long power = 1;
    for (int k = 0; k < degree / e; ++k) power *= gens;
    acc += mobius(e) * power;
  }
  return acc / degree;
}

// WordEchelon --------------------------------------------------------------

void LieContext::WordEchelon::add(WordVec v, int original_index) {
  SparseQ combo{{original_index, Rational(1)}};
  for (size_t r = 0; r < rows.size(); ++r) {
    auto it = v.find(pivots[r]);
    if (it == v.end()) continue;
    Rational c = it->second;
    for (auto& [code, rc] : rows[r]) {
      auto vi = v.find(code);
      if (vi == v.end())
        v.emplace(code, -c * rc);
      else {
        vi->second -= c * rc;
        if (vi->second == 0) v.erase(vi);
      }
    }
    for (auto& [orig, cc] : combos[r]) {
      auto ci = combo.find(orig);
      if (ci == combo.end())
        combo.emplace(orig, -c * cc);
      else {
        ci->second -= c * cc;
        if (ci->second == 0) combo.erase(ci);
      }
    }
  }
  if (v.empty()) return;  // dependent input
  Rational lead = v.begin()->second;
  for (auto& [code, c] : v) c /= lead;
  for (auto& [orig, c] : combo) c /= lead;
  pivots.push_back(v.begin()->first);
  rows.push_back(std::move(v));
  combos.push_back(std::move(combo));
}

SparseQ LieContext::WordEchelon::reduce(WordVec& v) const {
  SparseQ combo;
  bool progress = true;
  while (progress && !v.empty()) {
    progress = false;
    for (size_t r = 0; r < rows.size(); ++r) {
      auto it = v.find(pivots[r]);
      if (it == v.end()) continue;
      Rational c = it->second;
      for (auto& [code, rc] : rows[r]) {
        auto vi = v.find(code);
        if (vi == v.end())
          v.emplace(code, -c * rc);
        else {
          vi->second -= c * rc;
          if (vi->second == 0) v.erase(vi);
        }
      }
      for (auto& [orig, cc] : combos[r]) {
        auto ci = combo.find(orig);
        if (ci == combo.end())
          combo.emplace(orig, c * cc);
        else {
          ci->second += c * cc;
          if (ci->second == 0) combo.erase(ci);
        }
      }
      progress = true;
    }
  }
  return combo;
}

// LieContext ----------------------------------------------------------------

LieContextPtr LieContext::make(const LieAlgebraSpec& spec) {
  return LieContextPtr(new LieContext(spec));
}

LieContext::LieContext(const LieAlgebraSpec& spec) : spec_(spec) {
  require(spec_.gens >= 1, "InvalidData", "need at least one generator");
  require(spec_.cls >= 1, "InvalidData", "nilpotency class must be at least 1");
  if (spec_.surface_genus)
    require(spec_.gens == 2 * *spec_.surface_genus, "InvalidData",
            "surface mode requires gens == 2 * genus");
  if (spec_.involution) {
    require(static_cast<int>(spec_.involution->images.size()) == spec_.gens, "InvalidData",
            "involution must cover every generator");
    for (int i = 0; i < spec_.gens; ++i) {
      auto [j, s] = spec_.involution->images[i];
      require(j >= 0 && j < spec_.gens && (s == 1 || s == -1), "InvalidData",
              "involution entries must be signed generator indices");
      auto [k, s2] = spec_.involution->images[j];
      require(k == i && s * s2 == 1, "InvalidData", "involution must square to the identity");
    }
  }
  build_free_hall();
  build_ideal();
  if (spec_.involution) build_involution();
}

void LieContext::build_free_hall() {
  for (int g = 0; g < spec_.gens; ++g) {
    basis_.gen_names.push_back("x" + std::to_string(g + 1));
    basis_.free_words.push_back(HallWord{-1, -1, g, 1});
  }
  basis_.free_slice.assign(static_cast<size_t>(spec_.cls) + 1, {0, 0});
  basis_.free_slice[1] = {0, spec_.gens};
  for (int d = 2; d <= spec_.cls; ++d) {
    int begin = static_cast<int>(basis_.free_words.size());
    // Hall set: [u, v] with u < v and, when v = [p, q], p <= u.
    for (int u = 0; u < begin; ++u) {
      int du = basis_.free_words[u].degree;
      if (du >= d) break;
      for (int v = u + 1; v < begin; ++v) {
        const HallWord& wv = basis_.free_words[v];
        if (du + wv.degree != d) continue;
        if (wv.gen < 0 && wv.left > u) continue;
        basis_.free_words.push_back(HallWord{u, v, -1, d});
      }
    }
    basis_.free_slice[d] = {begin, static_cast<int>(basis_.free_words.size())};
  }
  free_expansion_memo_.assign(basis_.free_words.size(), {});
  free_lie_ech_.assign(static_cast<size_t>(spec_.cls) + 1, {});
  free_lie_ech_ready_.assign(static_cast<size_t>(spec_.cls) + 1, false);
}

size_t LieContext::word_count(size_t len) const {
  size_t n = 1;
  for (size_t i = 0; i < len; ++i) n *= static_cast<size_t>(spec_.gens);
  return n;
}

std::vector<uint8_t> LieContext::decode_word(size_t len, size_t code) const {
  std::vector<uint8_t> w(len);
  for (size_t i = 0; i < len; ++i) {
    w[len - 1 - i] = static_cast<uint8_t>(code % spec_.gens);
    code /= spec_.gens;
  }
  return w;
}

size_t LieContext::encode_word(const std::vector<uint8_t>& w) const {
  size_t code = 0;
  for (auto g : w) code = code * spec_.gens + g;
  return code;
}

const WordVec& LieContext::expand_free_word(int free_index) const {
  auto& memo = free_expansion_memo_[static_cast<size_t>(free_index)];
  if (memo) return *memo;
  const HallWord& w = basis_.free_words[free_index];
  if (w.gen >= 0) {
    memo = WordVec{{static_cast<size_t>(w.gen), Rational(1)}};
    return *memo;
  }
  const WordVec& a = expand_free_word(w.left);
  const WordVec& b = expand_free_word(w.right);
  size_t db = static_cast<size_t>(basis_.free_words[w.right].degree);
  size_t da = static_cast<size_t>(basis_.free_words[w.left].degree);
  WordVec out;
  auto accumulate = [&](const WordVec& x, const WordVec& y, size_t ylen, const Rational& sgn) {
    size_t shift = word_count(ylen);
    for (auto& [cx, vx] : x)
      for (auto& [cy, vy] : y) {
        size_t code = cx * shift + cy;
        auto it = out.find(code);
        if (it == out.end())
          out.emplace(code, sgn * vx * vy);
        else {
          it->second += sgn * vx * vy;
          if (it->second == 0) out.erase(it);
        }
      }
  };
  accumulate(a, b, db, 1);
  accumulate(b, a, da, -1);
  memo = std::move(out);
  return *memo;
}

const LieContext::WordEchelon& LieContext::free_lie_echelon(int degree) const {
  if (free_lie_ech_ready_[degree]) return free_lie_ech_[degree];
  WordEchelon ech;
  auto [b, e] = basis_.free_slice[degree];
  for (int i = b; i < e; ++i) {
    size_t before = ech.rows.size();
    ech.add(expand_free_word(i), i - b);
    require(ech.rows.size() == before + 1, "InvalidData",
            "Hall expansions unexpectedly dependent");
  }
  free_lie_ech_[degree] = std::move(ech);
  free_lie_ech_ready_[degree] = true;
  return free_lie_ech_[degree];
}

SparseQ LieContext::words_to_free_hall(size_t len, const WordVec& v) const {
  const WordEchelon& ech = free_lie_echelon(static_cast<int>(len));
  WordVec work = v;
  SparseQ combo = ech.reduce(work);
  require(work.empty(), "InvalidData", "word vector is not a Lie element");
  int base = basis_.free_slice[len].first;
  SparseQ out;
  for (auto& [pos, c] : combo) out.emplace(base + pos, c);
  return out;
}

SparseQ LieContext::free_bracket(int fi, int fj) const {
  int d = basis_.free_words[fi].degree + basis_.free_words[fj].degree;
  if (d > spec_.cls) return {};
  const WordVec& a = expand_free_word(fi);
  const WordVec& b = expand_free_word(fj);
  size_t da = static_cast<size_t>(basis_.free_words[fi].degree);
  size_t db = static_cast<size_t>(basis_.free_words[fj].degree);
  WordVec out;
  auto accumulate = [&](const WordVec& x, const WordVec& y, size_t ylen, const Rational& sgn) {
    size_t shift = word_count(ylen);
    for (auto& [cx, vx] : x)
      for (auto& [cy, vy] : y) {
        size_t code = cx * shift + cy;
        auto it = out.find(code);
        if (it == out.end())
          out.emplace(code, sgn * vx * vy);
        else {
          it->second += sgn * vx * vy;
          if (it->second == 0) out.erase(it);
        }
      }
  };
  accumulate(a, b, db, 1);
  accumulate(b, a, da, -1);
  if (out.empty()) return {};
  return words_to_free_hall(static_cast<size_t>(d), out);
}

// Bracket-expression parser for custom ideals: "x1", "[x1,[x2,x3]]",
// "2 * [x1,x2] + -1 * [x3,x4]". Values are kept per homogeneous degree.
std::map<int, SparseQ> LieContext::parse_bracket_expr(const std::string& text) const {
  size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto eat = [&](char c) {
    skip();
    if (i < text.size() && text[i] == c) {
      ++i;
      return true;
    }
    return false;
  };

  std::function<std::map<int, SparseQ>()> parse_atom = [&]() -> std::map<int, SparseQ> {
    skip();
    if (eat('[')) {
      auto lhs = parse_atom();
      require(eat(','), "UnsupportedQuotient", "expected ',' in bracket expression");
      auto rhs = parse_atom();
      require(eat(']'), "UnsupportedQuotient", "expected ']' in bracket expression");
      std::map<int, SparseQ> out;
      for (auto& [da, va] : lhs)
        for (auto& [db, vb] : rhs) {
          if (da + db > spec_.cls) continue;
          for (auto& [ia, ca] : va)
            for (auto& [ib, cb] : vb) {
              SparseQ br = free_bracket(ia, ib);
              for (auto& [k, c] : br) {
                auto& cell = out[da + db][k];
                cell += ca * cb * c;
                if (cell == 0) out[da + db].erase(k);
              }
            }
        }
      return out;
    }
    skip();
    size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
      ++i;
    std::string name = text.substr(start, i - start);
    for (int g = 0; g < spec_.gens; ++g)
      if (name == basis_.gen_names[g]) return {{1, SparseQ{{g, Rational(1)}}}};
    fail("UnsupportedQuotient", "unknown generator '" + name + "' in ideal expression");
  };

  auto add_into = [](std::map<int, SparseQ>& acc, const std::map<int, SparseQ>& v,
                     const Rational& scale) {
    for (auto& [d, sparse] : v)
      for (auto& [idx, c] : sparse) {
        auto& cell = acc[d][idx];
        cell += scale * c;
        if (cell == 0) acc[d].erase(idx);
      }
  };

  std::map<int, SparseQ> acc;
  bool first = true;
  while (true) {
    skip();
    if (i >= text.size()) break;
    Rational sign = 1;
    if (!first) {
      if (eat('+')) {
      } else if (eat('-')) {
        sign = -1;
      } else {
        fail("UnsupportedQuotient", "expected '+' between ideal terms in '" + text + "'");
      }
    }
    first = false;
    skip();
    Rational coef = 1;
    if (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '-')) {
      size_t start = i;
      if (text[i] == '-') ++i;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '/'))
        ++i;
      coef = parse_rational(text.substr(start, i - start));
      require(eat('*'), "UnsupportedQuotient", "expected '*' after coefficient");
    }
    add_into(acc, parse_atom(), sign * coef);
  }
  for (auto it = acc.begin(); it != acc.end();)
    it = it->second.empty() ? acc.erase(it) : std::next(it);
  return acc;
}

void LieContext::build_ideal() {
  int cls = spec_.cls;
  std::vector<std::vector<SparseQ>> span(static_cast<size_t>(cls) + 1);

  // Metabelian: brackets of two commutator-degree pieces.
  if (spec_.metabelian) {
    for (int d = 4; d <= cls; ++d)
      for (int da = 2; da <= d - 2; ++da) {
        auto [ba, ea] = basis_.free_slice[da];
        auto [bb, eb] = basis_.free_slice[d - da];
        for (int a = ba; a < ea; ++a)
          for (int b = bb; b < eb; ++b) {
            if (da == d - da && b <= a) continue;
            SparseQ v = free_bracket(a, b);
            if (!v.empty()) span[d].push_back(std::move(v));
          }
      }
  }

  // Homogeneous generators: the surface relation and custom expressions.
  std::vector<std::pair<int, SparseQ>> gens;
  if (spec_.surface_genus) {
    int g = *spec_.surface_genus;
    SparseQ rel;
    for (int i = 0; i < g; ++i) {
      // [x_i, x_{g+i}] is itself a Hall word; locate it.
      SparseQ v = free_bracket(i, g + i);
      for (auto& [k, c] : v) {
        auto& cell = rel[k];
        cell += c;
        if (cell == 0) rel.erase(k);
      }
    }
    if (cls >= 2) gens.emplace_back(2, std::move(rel));
  }
  for (auto& text : spec_.custom_ideal) {
    auto parsed = parse_bracket_expr(text);
    require(parsed.size() <= 1, "UnsupportedQuotient",
            "ideal generator '" + text + "' is not graded-homogeneous");
    if (parsed.empty()) continue;
    auto& [d, v] = *parsed.begin();
    if (d <= cls) gens.emplace_back(d, v);
  }

  // Close the generated ideal degree by degree: the algebra is generated in
  // degree one, so bracketing with generators suffices.
  std::vector<std::vector<SparseQ>> closure(static_cast<size_t>(cls) + 1);
  for (auto& [d, v] : gens) closure[d].push_back(v);
  for (int d = 2; d < cls; ++d)
    for (auto& v : closure[d])
      for (int g = 0; g < spec_.gens; ++g) {
        SparseQ out;
        for (auto& [idx, c] : v) {
          SparseQ br = free_bracket(g, idx);
          for (auto& [k, bc] : br) {
            auto& cell = out[k];
            cell += c * bc;
            if (cell == 0) out.erase(k);
          }
        }
        if (!out.empty()) closure[d + 1].push_back(std::move(out));
      }
  for (int d = 2; d <= cls; ++d)
    for (auto& v : closure[d]) span[d].push_back(v);

  // Echelonize per degree and pick quotient representatives.
  ideal_rows_.assign(static_cast<size_t>(cls) + 1, MatQ());
  ideal_pivots_.assign(static_cast<size_t>(cls) + 1, {});
  quotient_positions_.assign(static_cast<size_t>(cls) + 1, {});
  basis_.slice.assign(static_cast<size_t>(cls) + 1, {0, 0});
  basis_.slice[1] = {0, spec_.gens};
  for (int g = 0; g < spec_.gens; ++g) {
    basis_.basis_words.push_back(g);
    quotient_positions_[1].push_back(g);
  }
  for (int d = 2; d <= cls; ++d) {
    auto [b, e] = basis_.free_slice[d];
    int free_dim = e - b;
    MatQ rows(static_cast<Eigen::Index>(span[d].size()), free_dim);
    rows.setConstant(Rational(0));
    for (size_t r = 0; r < span[d].size(); ++r)
      for (auto& [idx, c] : span[d][r]) rows(static_cast<Eigen::Index>(r), idx - b) = c;
    ideal_pivots_[d] = linalg::rref_in_place(rows);
    Eigen::Index rk = static_cast<Eigen::Index>(ideal_pivots_[d].size());
    ideal_rows_[d] = rows.topRows(rk);
    std::vector<bool> is_pivot(free_dim, false);
    for (auto p : ideal_pivots_[d]) is_pivot[static_cast<size_t>(p)] = true;
    int begin = static_cast<int>(basis_.basis_words.size());
    for (int pos = 0; pos < free_dim; ++pos)
      if (!is_pivot[static_cast<size_t>(pos)]) {
        quotient_positions_[d].push_back(pos);
        basis_.basis_words.push_back(b + pos);
      }
    basis_.slice[d] = {begin, static_cast<int>(basis_.basis_words.size())};
  }
}

SparseQ LieContext::project_to_quotient(int degree, const SparseQ& free_coords) const {
  auto [b, e] = basis_.free_slice[degree];
  int free_dim = e - b;
  VecQ v(free_dim);
  v.setConstant(Rational(0));
  for (auto& [idx, c] : free_coords) v(idx - b) = c;
  const MatQ& rows = ideal_rows_[degree];
  const auto& pivots = ideal_pivots_[degree];
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Rational c = v(pivots[static_cast<size_t>(r)]);
    if (c != 0) v -= c * rows.row(r).transpose();
  }
  SparseQ out;
  int base = basis_.slice[degree].first;
  const auto& positions = quotient_positions_[degree];
  for (size_t q = 0; q < positions.size(); ++q)
    if (v(positions[q]) != 0) out.emplace(base + static_cast<int>(q), v(positions[q]));
  return out;
}

std::vector<int> LieContext::graded_dims() const {
  std::vector<int> dims;
  for (int d = 1; d <= spec_.cls; ++d)
    dims.push_back(basis_.slice[d].second - basis_.slice[d].first);
  return dims;
}

const SparseQ& LieContext::bracket(int i, int j) const {
  std::scoped_lock lock(mutex_);
  auto key = std::make_pair(i, j);
  auto it = bracket_cache_.find(key);
  if (it != bracket_cache_.end()) return it->second;
  int d = basis_.degree_of(i) + basis_.degree_of(j);
  if (d > spec_.cls) return bracket_cache_.emplace(key, SparseQ{}).first->second;
  SparseQ free = free_bracket(basis_.basis_words[i], basis_.basis_words[j]);
  return bracket_cache_.emplace(key, project_to_quotient(d, free)).first->second;
}

// UEA -----------------------------------------------------------------------

void LieContext::ensure_uea(size_t len) const {
  if (uea_ideal_ech_.size() > len && uea_ready_[len]) return;
  if (uea_ideal_ech_.size() <= len) {
    uea_ideal_ech_.resize(len + 1);
    uea_reduced_words_.resize(len + 1);
    uea_lie_ech_.resize(len + 1);
    uea_ready_.resize(len + 1, false);
  }
  if (!uea_ready_[0]) {
    uea_reduced_words_[0] = {0};  // the empty word
    uea_ready_[0] = true;
  }
  for (size_t l = 1; l <= len; ++l) {
    if (uea_ready_[l]) continue;
    WordEchelon ech;
    // Two-sided associative ideal generated by the Lie ideal, degree piece l.
    for (size_t e = 2; e <= l && e < ideal_rows_.size(); ++e) {
      const MatQ& rows = ideal_rows_[e];
      if (rows.rows() == 0) continue;
      int b = basis_.free_slice[e].first;
      for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        WordVec mid;
        for (Eigen::Index cidx = 0; cidx < rows.cols(); ++cidx) {
          if (rows(r, cidx) == 0) continue;
          for (auto& [code, c] : expand_free_word(b + static_cast<int>(cidx))) {
            auto& cell = mid[code];
            cell += rows(r, cidx) * c;
            if (cell == 0) mid.erase(code);
          }
        }
        size_t rest = l - e;
        for (size_t p = 0; p <= rest; ++p) {
          size_t q = rest - p;
          for (size_t wp = 0; wp < word_count(p); ++wp)
            for (size_t wq = 0; wq < word_count(q); ++wq) {
              WordVec row;
              for (auto& [code, c] : mid)
                row.emplace((wp * word_count(e) + code) * word_count(q) + wq, c);
              ech.add(std::move(row), 0);
            }
        }
      }
    }
    std::vector<bool> pivot(word_count(l), false);
    for (auto p : ech.pivots) pivot[p] = true;
    uea_reduced_words_[l].clear();
    for (size_t code = 0; code < word_count(l); ++code)
      if (!pivot[code]) uea_reduced_words_[l].push_back(code);
    uea_ideal_ech_[l] = std::move(ech);

    // Reduced expansions of the quotient Lie basis in this degree.
    WordEchelon lie_ech;
    auto [qb, qe] = basis_.slice[static_cast<int>(l)];
    for (int i = qb; i < qe; ++i) {
      WordVec v = expand_free_word(basis_.basis_words[i]);
      reduce_nolock(l, v);
      size_t before = lie_ech.rows.size();
      lie_ech.add(std::move(v), i - qb);
      require(lie_ech.rows.size() == before + 1, "InvalidData",
              "quotient basis expansions unexpectedly dependent");
    }
    uea_lie_ech_[l] = std::move(lie_ech);
    uea_ready_[l] = true;
  }
}

void LieContext::reduce_nolock(size_t len, WordVec& v) const {
  if (len == 0 || len >= uea_ideal_ech_.size()) return;
  const WordEchelon& ech = uea_ideal_ech_[len];
  for (size_t r = 0; r < ech.rows.size(); ++r) {
    auto it = v.find(ech.pivots[r]);
    if (it == v.end()) continue;
    Rational c = it->second;
    for (auto& [code, rc] : ech.rows[r]) {
      auto vi = v.find(code);
      if (vi == v.end())
        v.emplace(code, -c * rc);
      else {
        vi->second -= c * rc;
        if (vi->second == 0) v.erase(vi);
      }
    }
  }
}

void LieContext::reduce_words(size_t len, WordVec& v) const {
  std::scoped_lock lock(mutex_);
  ensure_uea(len);
  reduce_nolock(len, v);
}

const std::vector<size_t>& LieContext::reduced_words(size_t len) const {
  std::scoped_lock lock(mutex_);
  ensure_uea(len);
  return uea_reduced_words_[len];
}

const WordVec& LieContext::uea_expansion(int i) const {
  std::scoped_lock lock(mutex_);
  size_t d = static_cast<size_t>(basis_.degree_of(i));
  ensure_uea(d);
  auto it = uea_expansion_cache_.find(i);
  if (it != uea_expansion_cache_.end()) return it->second;
  WordVec v = expand_free_word(basis_.basis_words[i]);
  reduce_nolock(d, v);
  return uea_expansion_cache_.emplace(i, std::move(v)).first->second;
}

std::vector<LieContext::EchelonRowView> LieContext::uea_ideal_rows(size_t len) const {
  std::scoped_lock lock(mutex_);
  ensure_uea(len);
  std::vector<EchelonRowView> out;
  const WordEchelon& ech = uea_ideal_ech_[len];
  out.reserve(ech.rows.size());
  for (size_t r = 0; r < ech.rows.size(); ++r)
    out.push_back({ech.pivots[r], ech.rows[r], {}});
  return out;
}

std::vector<LieContext::EchelonRowView> LieContext::uea_lie_rows(size_t len) const {
  std::scoped_lock lock(mutex_);
  ensure_uea(len);
  std::vector<EchelonRowView> out;
  const WordEchelon& ech = uea_lie_ech_[len];
  int base = basis_.slice[len].first;
  out.reserve(ech.rows.size());
  for (size_t r = 0; r < ech.rows.size(); ++r) {
    SparseQ combo;
    for (auto& [pos, c] : ech.combos[r]) combo.emplace(base + pos, c);
    out.push_back({ech.pivots[r], ech.rows[r], std::move(combo)});
  }
  return out;
}

SparseQ LieContext::primitive_to_basis(size_t len, const WordVec& v) const {
  std::scoped_lock lock(mutex_);
  ensure_uea(len);
  WordVec work = v;
  reduce_nolock(len, work);
  SparseQ combo = uea_lie_ech_[len].reduce(work);
  require(work.empty(), "NotUnipotent", "word vector is not primitive in the quotient");
  int base = basis_.slice[len].first;
  SparseQ out;
  for (auto& [pos, c] : combo) out.emplace(base + pos, c);
  return out;
}

// Involution ------------------------------------------------------------------

void LieContext::build_involution() {
  const auto& img = spec_.involution->images;
  involution_mats_.assign(static_cast<size_t>(spec_.cls) + 1, MatQ());
  for (int d = 1; d <= spec_.cls; ++d) {
    auto [qb, qe] = basis_.slice[d];
    int dim = qe - qb;
    MatQ m(dim, dim);
    m.setConstant(Rational(0));
    for (int i = qb; i < qe; ++i) {
      // Map letters through the signed permutation on the expansion.
      WordVec mapped;
      for (auto& [code, c] : expand_free_word(basis_.basis_words[i])) {
        auto letters = decode_word(static_cast<size_t>(d), code);
        Rational sign = c;
        for (auto& g : letters) {
          sign *= img[g].second;
          g = static_cast<uint8_t>(img[g].first);
        }
        size_t ncode = encode_word(letters);
        auto& cell = mapped[ncode];
        cell += sign;
        if (cell == 0) mapped.erase(ncode);
      }
      SparseQ free_coords = words_to_free_hall(static_cast<size_t>(d), mapped);
      // The image must stay in the quotient consistently: project and also
      // verify nothing was lost (the ideal must be involution-stable).
      SparseQ q = project_to_quotient(d, free_coords);
      for (auto& [k, c] : q) m(k - qb, i - qb) = c;
    }
    require((m * m).isIdentity(), "InvalidData",
            "involution does not preserve the declared quotient at degree " + std::to_string(d));
    involution_mats_[d] = std::move(m);
  }
}

const MatQ& LieContext::involution_matrix(int degree) const {
  require(spec_.involution.has_value(), "InvalidData", "no involution declared");
  require(degree >= 1 && degree <= spec_.cls, "InvalidData", "degree out of range");
  return involution_mats_[static_cast<size_t>(degree)];
}

// Reports ---------------------------------------------------------------------

namespace {

std::vector<Exps> monomials_of_degree(int nvars, int degree) {
  std::vector<Exps> out;
  Exps cur(static_cast<size_t>(nvars), 0);
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == nvars - 1) {
      cur[static_cast<size_t>(var)] = static_cast<uint32_t>(left);
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[static_cast<size_t>(var)] = static_cast<uint32_t>(k);
      rec(var + 1, left - k);
    }
  };
  if (nvars > 0) rec(0, degree);
  return out;
}

}  // namespace

IharaReport ihara_module_check(const LieContextPtr& ctx) {
  const auto& spec = ctx->spec();
  require(spec.metabelian, "InvalidData", "ihara_module_check needs a metabelian quotient");
  int m = spec.gens;
  IharaReport report;
  auto dims = ctx->graded_dims();
  for (int i = 2; i <= spec.cls; ++i) {
    int d = i - 1;  // syzygy degree paired with gr_i of the commutator
    auto mons_d = monomials_of_degree(m, d);
    auto mons_d1 = monomials_of_degree(m, d + 1);
    std::map<Exps, int> index;
    for (size_t k = 0; k < mons_d1.size(); ++k) index[mons_d1[k]] = static_cast<int>(k);
    // Multiplication map Sym^d(V)^m -> Sym^{d+1}(V).
    MatQ mul(static_cast<Eigen::Index>(mons_d1.size()),
             static_cast<Eigen::Index>(m * mons_d.size()));
    mul.setConstant(Rational(0));
    for (int a = 0; a < m; ++a)
      for (size_t k = 0; k < mons_d.size(); ++k) {
        Exps e = mons_d[k];
        e[static_cast<size_t>(a)] += 1;
        mul(index.at(e), a * static_cast<Eigen::Index>(mons_d.size()) +
                             static_cast<Eigen::Index>(k)) = 1;
      }
    long long syz = static_cast<long long>(m * mons_d.size()) - linalg::rank(mul);
    if (spec.surface_genus) {
      // Subtract the Sym-module line generated by the symplectic syzygy.
      int g = *spec.surface_genus;
      auto mons_dm1 = monomials_of_degree(m, d - 1);
      MatQ line(static_cast<Eigen::Index>(mons_dm1.size()),
                static_cast<Eigen::Index>(m * mons_d.size()));
      line.setConstant(Rational(0));
      std::map<Exps, int> idx_d;
      for (size_t k = 0; k < mons_d.size(); ++k) idx_d[mons_d[k]] = static_cast<int>(k);
      for (size_t q = 0; q < mons_dm1.size(); ++q) {
        // q * m where m = (x_{g+1},...,x_{2g},-x_1,...,-x_g)
        for (int a = 0; a < m; ++a) {
          int comp = a;  // component index
          int var = (a < g) ? g + a : a - g;
          Rational sign = (a < g) ? 1 : -1;
          Exps e = mons_dm1[q];
          e[static_cast<size_t>(var)] += 1;
          line(static_cast<Eigen::Index>(q),
               comp * static_cast<Eigen::Index>(mons_d.size()) + idx_d.at(e)) = sign;
        }
      }
      syz -= linalg::rank(line);
    }
    long long comm = dims[static_cast<size_t>(i - 1)];
    bool ok = (syz == comm);
    report.rows.push_back({i, syz, comm, ok});
    report.all_match &= ok;
  }
  return report;
}

MatQ bracket_power_span(const LieContextPtr& ctx, const MatQ& w_rows, int degree) {
  require(degree >= 1 && degree <= ctx->cls(), "InvalidData", "degree out of range");
  auto dims = ctx->graded_dims();
  auto slice_dim = [&](int d) { return dims[static_cast<size_t>(d - 1)]; };
  auto slice_base = [&](int d) {
    int base = 0;
    for (int k = 1; k < d; ++k) base += dims[static_cast<size_t>(k - 1)];
    return base;
  };
  require(w_rows.cols() == ctx->gens(), "InvalidData", "W must be given in generator coordinates");
  MatQ cur = w_rows;
  {
    MatQ tmp = cur;
    auto piv = linalg::rref_in_place(tmp);
    cur = tmp.topRows(static_cast<Eigen::Index>(piv.size()));
  }
  for (int d = 2; d <= degree; ++d) {
    // [W, W_{d-1}] spans the degree-d piece of the subalgebra generated by W.
    std::vector<VecQ> rows;
    for (Eigen::Index wi = 0; wi < w_rows.rows(); ++wi)
      for (Eigen::Index ui = 0; ui < cur.rows(); ++ui) {
        LieElement<Rational> w = LieElement<Rational>::zero(ctx);
        for (int g = 0; g < ctx->gens(); ++g)
          if (w_rows(wi, g) != 0) w.add(g, w_rows(wi, g));
        LieElement<Rational> u = LieElement<Rational>::zero(ctx);
        for (Eigen::Index c = 0; c < cur.cols(); ++c)
          if (cur(ui, c) != 0) u.add(slice_base(d - 1) + static_cast<int>(c), cur(ui, c));
        auto br = lie::bracket(w, u);
        VecQ row(slice_dim(d));
        row.setConstant(Rational(0));
        for (auto& [k, c] : br.coords) row(k - slice_base(d)) = c;
        rows.push_back(std::move(row));
      }
    MatQ mat(static_cast<Eigen::Index>(rows.size()), slice_dim(d));
    for (size_t r = 0; r < rows.size(); ++r) mat.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    auto piv = linalg::rref_in_place(mat);
    cur = mat.topRows(static_cast<Eigen::Index>(piv.size()));
  }
  return cur;
}

AdInjectivityReport ad_injectivity_check(const LieContextPtr& ctx, const std::vector<Rational>& v,
                                         int lo, int hi) {
  const auto& spec = ctx->spec();
  require(spec.metabelian, "DegenerateSpec", "ad injectivity needs a metabelian quotient");
  if (spec.surface_genus)
    require(spec.gens > 2, "DegenerateSpec", "surface-metabelian case needs dimension > 2");
  else
    require(spec.gens > 1, "DegenerateSpec", "free metabelian case needs dimension > 1");
  require(static_cast<int>(v.size()) == spec.gens, "InvalidData", "v must have one entry per generator");
  bool nonzero = false;
  for (auto& c : v) nonzero |= (c != 0);
  require(nonzero, "InvalidData", "v must be nonzero");
  require(lo >= 1 && hi < spec.cls && lo <= hi, "InvalidData", "degree range out of bounds");

  auto dims = ctx->graded_dims();
  auto slice_base = [&](int d) {
    int base = 0;
    for (int k = 1; k < d; ++k) base += dims[static_cast<size_t>(k - 1)];
    return base;
  };
  LieElement<Rational> vv = LieElement<Rational>::zero(ctx);
  for (int g = 0; g < spec.gens; ++g)
    if (v[static_cast<size_t>(g)] != 0) vv.add(g, v[static_cast<size_t>(g)]);

  AdInjectivityReport report;
  for (int d = lo; d <= hi; ++d) {
    int dn = dims[static_cast<size_t>(d - 1)];
    int dn1 = dims[static_cast<size_t>(d)];
    MatQ m(dn1, dn);
    m.setConstant(Rational(0));
    for (int c = 0; c < dn; ++c) {
      LieElement<Rational> u = LieElement<Rational>::zero(ctx);
      u.add(slice_base(d) + c, 1);
      auto br = lie::bracket(vv, u);
      for (auto& [k, cc] : br.coords) m(k - slice_base(d + 1), c) = cc;
    }
    long long rank = linalg::rank(m);
    bool inj = (rank == dn);
    report.rows.push_back({d, dn, rank, inj});
    report.all_injective &= inj;
  }
  return report;
}

CEigenspaceDims c_eigenspaces(const LieContextPtr& ctx, const MatQ& w_rows, int degree) {
  MatQ span = bracket_power_span(ctx, w_rows, degree);
  const MatQ& c = ctx->involution_matrix(degree);
  // c must stabilize W_degree.
  for (Eigen::Index r = 0; r < span.rows(); ++r) {
    RowQ image = (c * span.row(r).transpose()).transpose();
    require(linalg::in_row_space(span, image), "InvalidData",
            "involution does not stabilize the bracket span");
  }
  CEigenspaceDims out;
  out.degree = degree;
  out.dim = span.rows();
  MatQ id = MatQ::Identity(c.rows(), c.cols());
  // x = span^T a with (c -+ 1) x = 0
  MatQ plus_sys = (c - id) * span.transpose();
  MatQ minus_sys = (c + id) * span.transpose();
  out.plus = span.rows() - linalg::rank(plus_sys);
  out.minus = span.rows() - linalg::rank(minus_sys);
  return out;
}

namespace {

MatQ eigenspace_basis(const MatQ& span, const MatQ& c, int sign) {
  MatQ id = MatQ::Identity(c.rows(), c.cols());
  MatQ shifted = (sign > 0) ? MatQ(c - id) : MatQ(c + id);
  MatQ sys = shifted * span.transpose();
  MatQ a = linalg::kernel_basis(sys);
  MatQ out(a.cols(), span.cols());
  for (Eigen::Index k = 0; k < a.cols(); ++k)
    out.row(k) = (span.transpose() * a.col(k)).transpose();
  return out;
}

}  // namespace

CTwistedRow c_twisted_injection_check(const LieContextPtr& ctx, const MatQ& w_rows, int degree) {
  MatQ wi = bracket_power_span(ctx, w_rows, degree);
  MatQ wi1 = bracket_power_span(ctx, w_rows, degree + 1);
  const MatQ& ci = ctx->involution_matrix(degree);
  const MatQ& ci1 = ctx->involution_matrix(degree + 1);
  MatQ minus_i = eigenspace_basis(wi, ci, -1);
  MatQ minus_i1 = eigenspace_basis(wi1, ci1, -1);

  CTwistedRow row;
  row.degree = degree;
  row.minus_dim = minus_i.rows();
  if (minus_i.rows() == 0) {
    row.rank = 0;
    row.injective = true;
    return row;
  }

  auto dims = ctx->graded_dims();
  auto slice_base = [&](int d) {
    int base = 0;
    for (int k = 1; k < d; ++k) base += dims[static_cast<size_t>(k - 1)];
    return base;
  };

  // Candidate degree-one vectors from W: rows, pairwise combinations, total sum.
  std::vector<VecQ> candidates;
  for (Eigen::Index r = 0; r < w_rows.rows(); ++r) candidates.push_back(w_rows.row(r).transpose());
  for (Eigen::Index r = 0; r < w_rows.rows(); ++r)
    for (Eigen::Index s = r + 1; s < w_rows.rows(); ++s) {
      candidates.push_back((w_rows.row(r) + w_rows.row(s)).transpose());
      candidates.push_back((w_rows.row(r) - w_rows.row(s)).transpose());
    }
  if (w_rows.rows() > 1) {
    VecQ sum = w_rows.colwise().sum().transpose();
    candidates.push_back(sum);
  }

  long long best = -1;
  for (auto& cand : candidates) {
    LieElement<Rational> v = LieElement<Rational>::zero(ctx);
    for (int g = 0; g < ctx->gens(); ++g)
      if (cand(g) != 0) v.add(g, cand(g));
    // rank of W_i^{c=-1} -> W_{i+1}/W_{i+1}^{c=-1}
    MatQ stacked(minus_i1.rows() + minus_i.rows(), wi1.cols());
    stacked.topRows(minus_i1.rows()) = minus_i1;
    for (Eigen::Index r = 0; r < minus_i.rows(); ++r) {
      LieElement<Rational> x = LieElement<Rational>::zero(ctx);
      for (Eigen::Index c = 0; c < minus_i.cols(); ++c)
        if (minus_i(r, c) != 0) x.add(slice_base(degree) + static_cast<int>(c), minus_i(r, c));
      auto br = lie::bracket(v, x);
      RowQ img(wi1.cols());
      img.setConstant(Rational(0));
      for (auto& [k, c] : br.coords) img(k - slice_base(degree + 1)) = c;
      stacked.row(minus_i1.rows() + r) = img;
    }
    long long rank = linalg::rank(stacked) - linalg::rank(minus_i1);
    best = std::max(best, rank);
    if (best == minus_i.rows()) break;
  }
  row.rank = best;
  row.injective = (best == minus_i.rows());
  return row;
}

}  // namespace kim::lie
