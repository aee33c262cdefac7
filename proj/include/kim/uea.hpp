#pragma once

#include <vector>

#include "kim/lie.hpp"
#include "kim/series.hpp"

namespace kim::lie {

using Word = std::vector<uint8_t>;

// Reduces a word-code -> R map of uniform length against the Q-echelon rows
// of the quotient ideal. Works for any coefficient ring R.
template <typename R>
void reduce_generic(const LieContextPtr& ctx, size_t len, std::map<size_t, R>& v) {
  if (len == 0) return;
  for (auto& row : ctx->uea_ideal_rows(len)) {
    auto it = v.find(row.pivot);
    if (it == v.end()) continue;
    R c = it->second;
    if (LieElement<R>::coeff_is_zero(c)) {
      v.erase(it);
      continue;
    }
    for (auto& [code, rc] : row.row) {
      R delta = c * rc;
      auto vi = v.find(code);
      if (vi == v.end())
        v.emplace(code, LieElement<R>::negate_coeff(delta));
      else {
        vi->second = vi->second - delta;
        if (LieElement<R>::coeff_is_zero(vi->second)) v.erase(vi);
      }
    }
  }
}

// Element of the truncated enveloping algebra: words of length <= class,
// reduced modulo the associative image of the quotient ideal, coefficients
// in R.
template <typename R>
struct UEAElement {
  LieContextPtr ctx;
  std::map<Word, R> terms;

  static UEAElement zero(LieContextPtr c) { return {std::move(c), {}}; }
  static UEAElement one(LieContextPtr c, const R& unit) {
    UEAElement e{std::move(c), {}};
    e.terms.emplace(Word{}, unit);
    return e;
  }

  bool is_zero() const {
    for (auto& [w, c] : terms)
      if (!LieElement<R>::coeff_is_zero(c)) return false;
    return true;
  }

  void add(const Word& w, const R& c) {
    auto it = terms.find(w);
    if (it == terms.end()) {
      if (!LieElement<R>::coeff_is_zero(c)) terms.emplace(w, c);
      return;
    }
    it->second = it->second + c;
    if (LieElement<R>::coeff_is_zero(it->second)) terms.erase(it);
  }

  const R* find(const Word& w) const {
    auto it = terms.find(w);
    return it == terms.end() ? nullptr : &it->second;
  }

  UEAElement operator+(const UEAElement& o) const {
    UEAElement r = *this;
    for (auto& [w, c] : o.terms) r.add(w, c);
    return r;
  }
  UEAElement operator-(const UEAElement& o) const {
    UEAElement r = *this;
    for (auto& [w, c] : o.terms) r.add(w, LieElement<R>::negate_coeff(c));
    return r;
  }
  UEAElement scaled(const R& s) const {
    UEAElement r{ctx, {}};
    for (auto& [w, c] : terms) {
      R v = c * s;
      if (!LieElement<R>::coeff_is_zero(v)) r.terms.emplace(w, v);
    }
    return r;
  }
  UEAElement scaled_by_rational(const Rational& s) const {
    UEAElement r{ctx, {}};
    if (s == 0) return r;
    for (auto& [w, c] : terms) r.terms.emplace(w, c * s);
    return r;
  }

  void reduce() {
    std::map<size_t, std::map<size_t, R>> by_len;
    for (auto& [w, c] : terms) {
      auto& cell = by_len[w.size()];
      cell.emplace(ctx->encode_word(w), c);
    }
    terms.clear();
    for (auto& [len, coeffs] : by_len) {
      reduce_generic(ctx, len, coeffs);
      for (auto& [code, c] : coeffs)
        if (!LieElement<R>::coeff_is_zero(c)) terms.emplace(ctx->decode_word(len, code), c);
    }
  }
};

template <typename R>
UEAElement<R> operator*(const UEAElement<R>& a, const UEAElement<R>& b) {
  require(a.ctx == b.ctx, "SpecMismatch", "product of elements over different specs");
  UEAElement<R> out{a.ctx, {}};
  size_t cls = static_cast<size_t>(a.ctx->cls());
  for (auto& [wa, ca] : a.terms)
    for (auto& [wb, cb] : b.terms) {
      if (wa.size() + wb.size() > cls) continue;
      R prod = ca * cb;
      if (LieElement<R>::coeff_is_zero(prod)) continue;
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add(w, prod);
    }
  out.reduce();
  return out;
}

// Tensor square element for the coproduct. Keys are pairs of reduced words.
template <typename R>
struct TensorElement {
  LieContextPtr ctx;
  std::map<std::pair<Word, Word>, R> terms;

  bool is_zero() const {
    for (auto& [k, c] : terms)
      if (!LieElement<R>::coeff_is_zero(c)) return false;
    return true;
  }
  size_t nonzero_count() const {
    size_t n = 0;
    for (auto& [k, c] : terms)
      if (!LieElement<R>::coeff_is_zero(c)) ++n;
    return n;
  }
  void add(const Word& l, const Word& r, const R& c) {
    auto key = std::make_pair(l, r);
    auto it = terms.find(key);
    if (it == terms.end()) {
      if (!LieElement<R>::coeff_is_zero(c)) terms.emplace(key, c);
      return;
    }
    it->second = it->second + c;
    if (LieElement<R>::coeff_is_zero(it->second)) terms.erase(it);
  }
  TensorElement operator-(const TensorElement& o) const {
    TensorElement r = *this;
    for (auto& [k, c] : o.terms) r.add(k.first, k.second, LieElement<R>::negate_coeff(c));
    return r;
  }
  // Reduces both tensor legs modulo the ideal.
  void reduce() {
    auto old = std::move(terms);
    terms.clear();
    for (auto& [k, c] : old) {
      // left leg
      std::map<size_t, R> left{{ctx->encode_word(k.first), c}};
      reduce_generic(ctx, k.first.size(), left);
      for (auto& [lc, lv] : left) {
        std::map<size_t, R> right{{ctx->encode_word(k.second), lv}};
        reduce_generic(ctx, k.second.size(), right);
        for (auto& [rc, rv] : right)
          add(ctx->decode_word(k.first.size(), lc), ctx->decode_word(k.second.size(), rc), rv);
      }
    }
  }
};

// Coproduct: letters are primitive, extended multiplicatively; a word maps to
// the sum over subsets of its positions.
template <typename R>
TensorElement<R> coproduct(const UEAElement<R>& u) {
  TensorElement<R> out{u.ctx, {}};
  for (auto& [w, c] : u.terms) {
    size_t n = w.size();
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
      Word l, r;
      for (size_t i = 0; i < n; ++i)
        ((mask >> i) & 1 ? l : r).push_back(w[i]);
      out.add(l, r, c);
    }
  }
  out.reduce();
  return out;
}

template <typename R>
TensorElement<R> tensor_square(const UEAElement<R>& u) {
  TensorElement<R> out{u.ctx, {}};
  size_t cls = static_cast<size_t>(u.ctx->cls());
  for (auto& [wa, ca] : u.terms)
    for (auto& [wb, cb] : u.terms) {
      if (wa.size() + wb.size() > cls) continue;
      R prod = ca * cb;
      if (!LieElement<R>::coeff_is_zero(prod)) out.add(wa, wb, prod);
    }
  out.reduce();
  return out;
}

// Delta(u) - u (x) u restricted to total length <= class.
template <typename R>
TensorElement<R> grouplike_defect(const UEAElement<R>& u) {
  TensorElement<R> delta = coproduct(u);
  // coproduct emits pairs of total length <= class automatically
  return delta - tensor_square(u);
}

template <typename R>
UEAElement<R> embed(const LieElement<R>& x) {
  UEAElement<R> out{x.ctx, {}};
  for (auto& [i, c] : x.coords) {
    for (auto& [code, q] : x.ctx->uea_expansion(i)) {
      size_t len = static_cast<size_t>(x.ctx->basis().degree_of(i));
      out.add(x.ctx->decode_word(len, code), c * q);
    }
  }
  return out;
}

template <typename R>
UEAElement<R> uea_exp(const LieElement<R>& x, const R& unit) {
  UEAElement<R> acc = UEAElement<R>::one(x.ctx, unit);
  UEAElement<R> xe = embed(x);
  UEAElement<R> power = acc;
  for (int k = 1; k <= x.ctx->cls(); ++k) {
    power = power * xe;
    if (power.is_zero()) break;
    acc = acc + power.scaled_by_rational(1 / factorial(static_cast<unsigned>(k)));
  }
  return acc;
}

template <typename R>
UEAElement<R> uea_log_raw(const UEAElement<R>& u, const R& unit) {
  const R* c0 = u.find(Word{});
  bool unipotent = c0 != nullptr && LieElement<R>::coeff_is_zero(*c0 - unit);
  require(unipotent, "NotUnipotent", "constant term is not 1");
  UEAElement<R> n = u;
  n.add(Word{}, LieElement<R>::negate_coeff(unit));
  UEAElement<R> acc = UEAElement<R>::zero(u.ctx);
  UEAElement<R> power = UEAElement<R>::one(u.ctx, unit);
  for (int k = 1; k <= u.ctx->cls(); ++k) {
    power = power * n;
    if (power.is_zero()) break;
    Rational coef = Rational((k % 2) ? 1 : -1, k);
    acc = acc + power.scaled_by_rational(coef);
  }
  return acc;
}

// Converts a primitive enveloping-algebra element back to Hall coordinates.
template <typename R>
LieElement<R> primitive_part(const UEAElement<R>& p) {
  LieElement<R> out = LieElement<R>::zero(p.ctx);
  std::map<size_t, std::map<size_t, R>> by_len;
  for (auto& [w, c] : p.terms) {
    require(!w.empty(), "NotUnipotent", "primitive element has a constant term");
    by_len[w.size()].emplace(p.ctx->encode_word(w), c);
  }
  for (auto& [len, coeffs] : by_len) {
    auto work = coeffs;
    for (auto& row : p.ctx->uea_lie_rows(len)) {
      auto it = work.find(row.pivot);
      if (it == work.end()) continue;
      R c = it->second;
      if (LieElement<R>::coeff_is_zero(c)) {
        work.erase(it);
        continue;
      }
      for (auto& [code, rc] : row.row) {
        R delta = c * rc;
        auto vi = work.find(code);
        if (vi == work.end())
          work.emplace(code, LieElement<R>::negate_coeff(delta));
        else {
          vi->second = vi->second - delta;
          if (LieElement<R>::coeff_is_zero(vi->second)) work.erase(vi);
        }
      }
      for (auto& [idx, q] : row.combo) out.add(idx, c * q);
    }
    for (auto& [code, c] : work)
      require(LieElement<R>::coeff_is_zero(c), "NotUnipotent",
              "element is not primitive in the quotient");
  }
  return out;
}

template <typename R>
LieElement<R> uea_log(const UEAElement<R>& u, const R& unit) {
  return primitive_part(uea_log_raw(u, unit));
}

enum class AdSeriesKind {
  Expm1OverT,  // (e^t - 1)/t
  TOverExpm1,  // t/(e^t - 1)
  Exp          // e^t
};

// Rational coefficients a_0..a_upto of the named series.
std::vector<Rational> ad_series_coefficients(AdSeriesKind kind, unsigned upto);

// y |-> sum a_k ad_x^k y; nilpotency truncates the sum.
template <typename R>
LieElement<R> ad_series_apply(AdSeriesKind kind, const LieElement<R>& x, const LieElement<R>& y) {
  auto coeffs = ad_series_coefficients(kind, static_cast<unsigned>(x.ctx->cls()));
  LieElement<R> acc = y.scaled_by_rational(coeffs[0]);
  LieElement<R> iter = y;
  for (size_t k = 1; k < coeffs.size(); ++k) {
    iter = bracket(x, iter);
    if (iter.is_zero()) break;
    if (coeffs[k] != 0) acc = acc + iter.scaled_by_rational(coeffs[k]);
  }
  return acc;
}

}  // namespace kim::lie
