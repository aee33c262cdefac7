#include "kim/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "kim/error.hpp"

namespace kim {

Polynomial::Polynomial(std::vector<std::string> vars, const Rational& c) : vars_(std::move(vars)) {
  if (c != 0) terms_.emplace(Exps(vars_.size(), 0), c);
}

Polynomial Polynomial::variable(const std::vector<std::string>& vars, size_t index) {
  require(index < vars.size(), "InvalidData", "variable index out of range");
  Polynomial p(vars);
  Exps e(vars.size(), 0);
  e[index] = 1;
  p.terms_.emplace(std::move(e), Rational(1));
  return p;
}

Polynomial Polynomial::constant(const std::vector<std::string>& vars, const Rational& c) {
  return Polynomial(vars, c);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return 0;
  require(is_constant(), "InvalidData", "polynomial is not constant");
  return terms_.begin()->second;
}

uint32_t Polynomial::degree() const {
  return terms_.empty() ? 0 : total_degree(terms_.begin()->first);
}

void Polynomial::set_term(const Exps& e, const Rational& c) {
  require(e.size() == vars_.size(), "InvalidData", "exponent arity mismatch");
  if (c == 0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

void Polynomial::add_term(const Exps& e, const Rational& c) {
  require(e.size() == vars_.size(), "InvalidData", "exponent arity mismatch");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (c != 0) terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

void Polynomial::check_same(const Polynomial& o) const {
  require(vars_ == o.vars_, "SpecMismatch", "polynomial variable lists differ");
}

Polynomial Polynomial::operator-() const {
  Polynomial r(vars_);
  for (auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_same(o);
  for (auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_same(o);
  for (auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  r -= o;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_same(o);
  Polynomial r(vars_);
  for (auto& [ea, ca] : terms_)
    for (auto& [eb, cb] : o.terms_) {
      Exps e(ea);
      for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r = *this;
  r *= c;
  return r;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial acc = Polynomial::constant(vars_, 1);
  Polynomial b = *this;
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

Polynomial Polynomial::derivative(size_t var) const {
  require(var < vars_.size(), "InvalidData", "variable index out of range");
  Polynomial r(vars_);
  for (auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exps d(e);
    d[var] -= 1;
    r.add_term(d, c * Rational(e[var]));
  }
  return r;
}

Rational Polynomial::eval(const std::vector<Rational>& point) const {
  require(point.size() == vars_.size(), "InvalidData", "evaluation arity mismatch");
  Rational acc = 0;
  for (auto& [e, c] : terms_) {
    Rational t = c;
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) t *= pow_rational(point[i], e[i]);
    acc += t;
  }
  return acc;
}

bool Polynomial::divide_exact(const Polynomial& divisor, Polynomial& quotient) const {
  check_same(divisor);
  require(!divisor.is_zero(), "InvalidData", "division by the zero polynomial");
  Polynomial rem = *this;
  Polynomial q(vars_);
  const auto& lead = *divisor.terms_.begin();
  while (!rem.is_zero()) {
    const auto& rl = *rem.terms_.begin();
    Exps e(rl.first.size());
    for (size_t i = 0; i < e.size(); ++i) {
      if (rl.first[i] < lead.first[i]) return false;
      e[i] = rl.first[i] - lead.first[i];
    }
    Rational c = rl.second / lead.second;
    Polynomial t(vars_);
    t.terms_.emplace(e, c);
    q += t;
    rem -= t * divisor;
  }
  quotient = q;
  return true;
}

Rational Polynomial::content() const {
  if (terms_.empty()) return 0;
  Integer gn = 0, gd = 1;
  for (auto& [e, c] : terms_) {
    gn = gcd(gn, numerator(c));
    gd = lcm(gd, denominator(c));
  }
  Rational g(gn, gd);
  if (terms_.begin()->second < 0) g = -g;
  return g;
}

Polynomial Polynomial::with_vars(const std::vector<std::string>& new_vars) const {
  std::vector<size_t> map(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    auto it = std::find(new_vars.begin(), new_vars.end(), vars_[i]);
    require(it != new_vars.end(), "SpecMismatch", "variable '" + vars_[i] + "' missing from target list");
    map[i] = static_cast<size_t>(it - new_vars.begin());
  }
  Polynomial r(new_vars);
  for (auto& [e, c] : terms_) {
    Exps ne(new_vars.size(), 0);
    for (size_t i = 0; i < e.size(); ++i) ne[map[i]] = e[i];
    r.add_term(ne, c);
  }
  return r;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto& [e, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << to_string(c);
    bool any = false;
    for (size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      out << (any ? "*" : " * ") << vars_[i];
      if (e[i] > 1) out << "^" << e[i];
      any = true;
    }
  }
  return out.str();
}

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool done() {
    skip();
    return i >= s.size();
  }
};

Rational parse_coef(Cursor& c) {
  c.skip();
  size_t start = c.i;
  if (c.i < c.s.size() && (c.s[c.i] == '-' || c.s[c.i] == '+')) ++c.i;
  while (c.i < c.s.size() && (std::isdigit(static_cast<unsigned char>(c.s[c.i])) || c.s[c.i] == '/')) ++c.i;
  require(c.i > start, "InvalidData", "expected coefficient at '" + c.s.substr(start) + "'");
  return parse_rational(c.s.substr(start, c.i - start));
}

std::string parse_name(Cursor& c) {
  c.skip();
  size_t start = c.i;
  while (c.i < c.s.size() &&
         (std::isalnum(static_cast<unsigned char>(c.s[c.i])) || c.s[c.i] == '_'))
    ++c.i;
  return c.s.substr(start, c.i - start);
}

}  // namespace

Polynomial parse_polynomial(const std::vector<std::string>& vars, const std::string& text) {
  Polynomial p(vars);
  Cursor c{text};
  bool first = true;
  while (!c.done()) {
    Rational sign = 1;
    if (!first) {
      if (c.eat('+')) {
      } else if (c.eat('-')) {
        sign = -1;
      } else {
        fail("InvalidData", "expected '+' between terms in '" + text + "'");
      }
    }
    first = false;
    c.skip();
    Rational coef = 1;
    bool saw_coef = false;
    if (c.i < c.s.size() &&
        (std::isdigit(static_cast<unsigned char>(c.s[c.i])) || c.s[c.i] == '-' || c.s[c.i] == '+')) {
      coef = parse_coef(c);
      saw_coef = true;
    }
    Exps e(vars.size(), 0);
    bool expect_factor = !saw_coef || c.eat('*');
    while (expect_factor) {
      std::string name = parse_name(c);
      require(!name.empty(), "InvalidData", "expected variable name in '" + text + "'");
      auto it = std::find(vars.begin(), vars.end(), name);
      require(it != vars.end(), "InvalidData", "unknown variable '" + name + "'");
      uint32_t exp = 1;
      if (c.eat('^')) {
        Rational r = parse_coef(c);
        require(is_integer(r) && r > 0, "InvalidData", "bad exponent in '" + text + "'");
        exp = static_cast<uint32_t>(numerator(r));
      }
      e[static_cast<size_t>(it - vars.begin())] += exp;
      expect_factor = c.eat('*');
    }
    p.add_term(e, sign * coef);
  }
  return p;
}

RationalFunction::RationalFunction() : RationalFunction(0) {}

RationalFunction::RationalFunction(int c)
    : num_(Polynomial::constant({}, c)), den_(Polynomial::constant({}, 1)) {}

RationalFunction::RationalFunction(Polynomial num)
    : num_(std::move(num)), den_(Polynomial::constant(num_.vars(), 1)) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  require(num_.vars() == den_.vars(), "SpecMismatch", "rational function variable lists differ");
  require(!den_.is_zero(), "InvalidData", "zero denominator polynomial");
  normalize();
}

RationalFunction RationalFunction::constant(const std::vector<std::string>& vars, const Rational& c) {
  return RationalFunction(Polynomial::constant(vars, c));
}

RationalFunction RationalFunction::variable(const std::vector<std::string>& vars, size_t index) {
  return RationalFunction(Polynomial::variable(vars, index));
}

Rational RationalFunction::constant_value() const {
  require(is_constant(), "InvalidData", "rational function is not constant");
  if (num_.is_zero()) return 0;
  return num_.constant_value() / den_.constant_value();
}

namespace {

// Univariate gcd by Euclid when both polynomials involve only variable `v`.
bool only_var(const Polynomial& p, size_t& v) {
  bool found = false;
  for (auto& [e, c] : p.terms())
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) {
        if (found && v != i) return false;
        v = i;
        found = true;
      }
  return found;
}

Polynomial uni_rem(const Polynomial& a, const Polynomial& b, size_t v) {
  Polynomial rem = a;
  const auto lead = *b.terms().begin();
  while (!rem.is_zero() && rem.terms().begin()->first[v] >= lead.first[v] &&
         total_degree(rem.terms().begin()->first) == rem.terms().begin()->first[v]) {
    auto rl = *rem.terms().begin();
    Exps e(rl.first.size(), 0);
    e[v] = rl.first[v] - lead.first[v];
    Polynomial t(a.vars());
    t.set_term(e, rl.second / lead.second);
    rem -= t * b;
  }
  return rem;
}

}  // namespace

void RationalFunction::normalize() {
  if (num_.is_zero()) {
    den_ = Polynomial::constant(num_.vars(), 1);
    return;
  }
  // Common monomial factor.
  Exps mins(num_.vars().size(), UINT32_MAX);
  auto scan = [&](const Polynomial& p) {
    for (auto& [e, c] : p.terms())
      for (size_t i = 0; i < e.size(); ++i) mins[i] = std::min(mins[i], e[i]);
  };
  scan(num_);
  scan(den_);
  bool shift = false;
  for (auto m : mins) shift |= (m > 0);
  if (shift) {
    auto strip = [&](Polynomial& p) {
      Polynomial r(p.vars());
      for (auto& [e, c] : p.terms()) {
        Exps ne(e);
        for (size_t i = 0; i < ne.size(); ++i) ne[i] -= mins[i];
        r.add_term(ne, c);
      }
      p = r;
    };
    strip(num_);
    strip(den_);
  }
  // Exact division in either direction.
  Polynomial q(num_.vars());
  if (num_.divide_exact(den_, q)) {
    num_ = q;
    den_ = Polynomial::constant(num_.vars(), 1);
  } else if (den_.divide_exact(num_, q)) {
    den_ = q;
    num_ = Polynomial::constant(num_.vars(), 1);
  } else {
    size_t vn = 0, vd = 0;
    if (only_var(num_, vn) && only_var(den_, vd) && vn == vd) {
      Polynomial a = num_, b = den_;
      while (!b.is_zero()) {
        Polynomial r = uni_rem(a, b, vn);
        a = b;
        b = r;
      }
      if (!a.is_constant()) {
        Polynomial qa(num_.vars()), qb(num_.vars());
        if (num_.divide_exact(a, qa) && den_.divide_exact(a, qb)) {
          num_ = qa;
          den_ = qb;
        }
      }
    }
  }
  // Scale so the denominator is integer-primitive with positive leading term.
  Rational c = den_.content();
  if (c != 0 && c != 1) {
    den_ *= 1 / c;
    num_ *= 1 / c;
  }
}

void RationalFunction::align(RationalFunction& a, RationalFunction& b) {
  if (a.vars() == b.vars()) return;
  if (a.vars().empty()) {
    a = RationalFunction(a.num_.with_vars(b.vars()), a.den_.with_vars(b.vars()));
    return;
  }
  if (b.vars().empty()) {
    b = RationalFunction(b.num_.with_vars(a.vars()), b.den_.with_vars(a.vars()));
    return;
  }
  fail("SpecMismatch", "rational function variable lists differ");
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  RationalFunction a = *this, b = o;
  align(a, b);
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
  RationalFunction a = *this, b = o;
  align(a, b);
  return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  RationalFunction a = *this, b = o;
  align(a, b);
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction RationalFunction::operator*(const Rational& c) const {
  RationalFunction r = *this;
  if (c == 0) return RationalFunction(Polynomial(vars()), Polynomial::constant(vars(), 1));
  r.num_ *= c;
  r.normalize();
  return r;
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
  require(!o.is_zero(), "InvalidData", "division by zero rational function");
  RationalFunction a = *this, b = o;
  align(a, b);
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

bool RationalFunction::operator==(const RationalFunction& o) const {
  RationalFunction a = *this, b = o;
  align(a, b);
  return (a.num_ * b.den_) == (b.num_ * a.den_);
}

RationalFunction RationalFunction::derivative(size_t var) const {
  // (f/g)' = (f'g - fg')/g^2
  return RationalFunction(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

Rational RationalFunction::eval(const std::vector<Rational>& point) const {
  Rational d = den_.eval(point);
  require(d != 0, "PoleAtBase", "denominator vanishes at evaluation point");
  return num_.eval(point) / d;
}

RationalFunction RationalFunction::with_vars(const std::vector<std::string>& new_vars) const {
  return RationalFunction(num_.with_vars(new_vars), den_.with_vars(new_vars));
}

std::string RationalFunction::str() const {
  if (den_.is_constant() && den_.constant_value() == 1) return num_.str();
  return "(" + num_.str() + ") / (" + den_.str() + ")";
}

RationalFunction Polynomial::eval_rational(const std::vector<RationalFunction>& args) const {
  require(args.size() == vars_.size(), "InvalidData", "evaluation arity mismatch");
  std::vector<std::string> tvars = args.empty() ? std::vector<std::string>{} : args[0].vars();
  RationalFunction acc = RationalFunction::constant(tvars, 0);
  for (auto& [e, c] : terms_) {
    RationalFunction t = RationalFunction::constant(tvars, c);
    for (size_t i = 0; i < e.size(); ++i)
      for (uint32_t k = 0; k < e[i]; ++k) t = t * args[i];
    acc = acc + t;
  }
  return acc;
}

std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (auto& v : b)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

}  // namespace kim
