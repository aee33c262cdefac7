#include "kim/series.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "kim/error.hpp"

namespace kim {

TruncSeries::TruncSeries(std::vector<std::string> vars, unsigned order)
    : vars_(std::move(vars)), order_(order) {
  require(order_ >= 1, "InvalidData", "truncation order must be at least 1");
}

TruncSeries::TruncSeries(std::vector<std::string> vars, unsigned order, const Rational& c)
    : TruncSeries(std::move(vars), order) {
  if (c != 0) terms_.emplace(Exps(vars_.size(), 0), c);
}

TruncSeries TruncSeries::variable(const std::vector<std::string>& vars, size_t index,
                                  unsigned order) {
  require(index < vars.size(), "InvalidData", "variable index out of range");
  TruncSeries s(vars, order);
  if (order > 1) {
    Exps e(vars.size(), 0);
    e[index] = 1;
    s.terms_.emplace(std::move(e), Rational(1));
  }
  return s;
}

TruncSeries TruncSeries::from_polynomial(const Polynomial& p, unsigned order) {
  TruncSeries s(p.vars(), order);
  for (auto& [e, c] : p.terms())
    if (total_degree(e) < order) s.terms_.emplace(e, c);
  return s;
}

Rational TruncSeries::coeff(const Exps& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational TruncSeries::constant_term() const { return coeff(Exps(vars_.size(), 0)); }

void TruncSeries::set_coeff(const Exps& e, const Rational& c) {
  require(e.size() == vars_.size(), "InvalidData", "exponent arity mismatch");
  if (total_degree(e) >= order_) return;
  if (c == 0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

void TruncSeries::drop_high_terms() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (total_degree(it->first) >= order_)
      it = terms_.erase(it);
    else
      ++it;
  }
}

TruncSeries TruncSeries::operator-() const {
  TruncSeries r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

namespace {
void check_vars(const TruncSeries& a, const TruncSeries& b) {
  require(a.vars() == b.vars(), "SpecMismatch", "series variable lists differ");
}
}  // namespace

TruncSeries TruncSeries::operator+(const TruncSeries& o) const {
  check_vars(*this, o);
  TruncSeries r(vars_, std::min(order_, o.order_));
  r.terms_ = terms_;
  for (auto& [e, c] : o.terms_) {
    auto it = r.terms_.find(e);
    if (it == r.terms_.end())
      r.terms_.emplace(e, c);
    else {
      it->second += c;
      if (it->second == 0) r.terms_.erase(it);
    }
  }
  r.drop_high_terms();
  return r;
}

TruncSeries TruncSeries::operator-(const TruncSeries& o) const { return *this + (-o); }

TruncSeries TruncSeries::operator*(const TruncSeries& o) const {
  check_vars(*this, o);
  TruncSeries r(vars_, std::min(order_, o.order_));
  for (auto& [ea, ca] : terms_) {
    uint32_t da = total_degree(ea);
    if (da >= r.order_) continue;
    for (auto& [eb, cb] : o.terms_) {
      if (da + total_degree(eb) >= r.order_) continue;
      Exps e(ea);
      for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      auto it = r.terms_.find(e);
      if (it == r.terms_.end())
        r.terms_.emplace(std::move(e), ca * cb);
      else {
        it->second += ca * cb;
        if (it->second == 0) r.terms_.erase(it);
      }
    }
  }
  return r;
}

TruncSeries TruncSeries::operator*(const Rational& c) const {
  TruncSeries r(vars_, order_);
  if (c == 0) return r;
  r.terms_ = terms_;
  for (auto& [e, v] : r.terms_) v *= c;
  return r;
}

bool TruncSeries::operator==(const TruncSeries& o) const {
  return vars_ == o.vars_ && order_ == o.order_ && terms_ == o.terms_;
}

TruncSeries TruncSeries::truncate(unsigned new_order) const {
  require(new_order >= 1, "InvalidData", "truncation order must be at least 1");
  TruncSeries r(vars_, std::min(new_order, order_));
  for (auto& [e, c] : terms_)
    if (total_degree(e) < r.order_) r.terms_.emplace(e, c);
  return r;
}

TruncSeries TruncSeries::inverse() const {
  Rational c0 = constant_term();
  require(c0 != 0, "PoleAtBase", "series has no multiplicative inverse (zero constant term)");
  // 1/(c0(1+u)) via the geometric series in u.
  TruncSeries u = (*this) * (1 / c0);
  u.set_coeff(Exps(vars_.size(), 0), 0);
  TruncSeries acc(vars_, order_, 1);
  TruncSeries powu(vars_, order_, 1);
  for (unsigned k = 1; k < order_; ++k) {
    powu = powu * u;
    if (powu.is_zero()) break;
    acc = (k % 2) ? acc - powu : acc + powu;
  }
  return acc * (1 / c0);
}

TruncSeries TruncSeries::derivative(size_t var) const {
  require(var < vars_.size(), "InvalidData", "variable index out of range");
  TruncSeries r(vars_, order_);
  for (auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exps d(e);
    d[var] -= 1;
    r.terms_.emplace(std::move(d), c * Rational(e[var]));
  }
  return r;
}

TruncSeries TruncSeries::homogeneous_part(unsigned degree) const {
  TruncSeries r(vars_, order_);
  for (auto& [e, c] : terms_)
    if (total_degree(e) == degree) r.terms_.emplace(e, c);
  return r;
}

TruncSeries TruncSeries::substitute(const std::vector<TruncSeries>& args) const {
  require(args.size() == vars_.size(), "InvalidData", "substitution arity mismatch");
  std::vector<std::string> tvars = args.empty() ? std::vector<std::string>{} : args[0].vars();
  unsigned torder = order_;
  for (auto& a : args) {
    require(a.vars() == tvars, "SpecMismatch", "substitution arguments disagree on variables");
    torder = std::min(torder, a.order());
  }
  TruncSeries acc(tvars, torder);
  // Memoized powers per variable.
  std::vector<std::vector<TruncSeries>> pows(args.size());
  for (size_t i = 0; i < args.size(); ++i) pows[i].push_back(TruncSeries(tvars, torder, 1));
  auto power = [&](size_t i, uint32_t e) {
    while (pows[i].size() <= e) pows[i].push_back(pows[i].back() * args[i]);
    return pows[i][e];
  };
  for (auto& [e, c] : terms_) {
    TruncSeries t(tvars, torder, c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = t * power(i, e[i]);
    acc = acc + t;
  }
  return acc;
}

std::string TruncSeries::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  // Ascending degree reads naturally for series.
  std::vector<const TermMap::value_type*> items;
  for (auto& kv : terms_) items.push_back(&kv);
  std::reverse(items.begin(), items.end());
  bool first = true;
  for (auto* kv : items) {
    if (!first) out << " + ";
    first = false;
    out << to_string(kv->second);
    bool any = false;
    for (size_t i = 0; i < kv->first.size(); ++i) {
      if (!kv->first[i]) continue;
      out << (any ? "*" : " * ") << vars_[i];
      if (kv->first[i] > 1) out << "^" << kv->first[i];
      any = true;
    }
  }
  return out.str();
}

TruncSeries parse_series(const std::vector<std::string>& vars, unsigned order,
                         const std::string& text) {
  return TruncSeries::from_polynomial(parse_polynomial(vars, text), order);
}

std::vector<std::string> shifted_var_names(const std::vector<std::string>& vars) {
  std::vector<std::string> out;
  out.reserve(vars.size());
  for (auto& v : vars) {
    size_t i = 0;
    while (i < v.size() && std::isalpha(static_cast<unsigned char>(v[i]))) ++i;
    out.push_back("t" + v.substr(i));
  }
  return out;
}

TruncSeries jet_expand(const Polynomial& p, const std::vector<Rational>& base, unsigned order) {
  require(base.size() == p.vars().size(), "InvalidData", "base point arity mismatch");
  auto tvars = shifted_var_names(p.vars());
  std::vector<TruncSeries> args;
  for (size_t i = 0; i < base.size(); ++i)
    args.push_back(TruncSeries::variable(tvars, i, order) + TruncSeries(tvars, order, base[i]));
  return TruncSeries::from_polynomial(p, order + static_cast<unsigned>(p.degree()) + 1)
      .substitute(args)
      .truncate(order);
}

TruncSeries jet_expand(const RationalFunction& f, const std::vector<Rational>& base,
                       unsigned order) {
  Rational d0 = f.den().eval(base);
  require(d0 != 0, "PoleAtBase", "denominator vanishes at the base point");
  TruncSeries num = jet_expand(f.num(), base, order);
  TruncSeries den = jet_expand(f.den(), base, order);
  return num * den.inverse();
}

TruncSeries reversion(const TruncSeries& f) {
  require(f.vars().size() == 1, "InvalidData", "reversion needs a univariate series");
  Exps one{1};
  require(f.constant_term() == 0 && f.coeff(one) == 1, "BadLeadingTerm",
          "series must start with t");
  unsigned n = f.order();
  // Solve g(f(t)) = t degree by degree.
  TruncSeries g = TruncSeries::variable(f.vars(), 0, n);
  for (unsigned k = 2; k < n; ++k) {
    TruncSeries comp = g.substitute({f});
    TruncSeries err = comp - TruncSeries::variable(f.vars(), 0, n);
    Exps e{k};
    g.set_coeff(e, -err.coeff(e));
  }
  return g;
}

}  // namespace kim
