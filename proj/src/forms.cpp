#include "kim/forms.hpp"

#include <algorithm>
#include <sstream>

#include "kim/error.hpp"

namespace kim::forms {

std::vector<std::string> Chart::vars() const {
  std::vector<std::string> out;
  for (auto& f : factors) out.push_back(f.var);
  return out;
}

std::string Chart::name() const {
  std::ostringstream out;
  for (size_t f = 0; f < factors.size(); ++f) {
    if (f) out << " x ";
    out << "p1(";
    for (size_t p = 0; p < factors[f].punctures.size(); ++p)
      out << to_string(factors[f].punctures[p]) << ",";
    out << "inf)";
  }
  return out.str();
}

Chart Chart::parse(const std::string& text) {
  // split on 'x' separators that are not inside parentheses
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && c == 'x' && i > 0 && (text[i - 1] == ' ' || text[i - 1] == ')')) {
      parts.push_back(cur);
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  parts.push_back(cur);

  auto parse_factor = [](std::string s, std::vector<ChartFactor>& out) {
    // trim
    auto trim = [](std::string& t) {
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    };
    trim(s);
    int copies = 1;
    auto caret = s.find('^');
    if (caret != std::string::npos) {
      copies = std::stoi(s.substr(caret + 1));
      s = s.substr(0, caret);
      trim(s);
    }
    require(s.rfind("p1(", 0) == 0 && s.back() == ')', "UnsupportedChart",
            "cannot parse chart factor '" + s + "'");
    std::string inner = s.substr(3, s.size() - 4);
    ChartFactor f;
    std::string tok;
    std::istringstream in(inner);
    bool saw_inf = false;
    while (std::getline(in, tok, ',')) {
      trim(tok);
      if (tok.empty()) continue;
      if (tok == "inf" || tok == "oo") {
        saw_inf = true;
        continue;
      }
      f.punctures.push_back(parse_rational(tok));
    }
    require(saw_inf, "UnsupportedChart", "charts are affine: the puncture list must contain inf");
    require(!f.punctures.empty(), "UnsupportedChart", "need at least one finite puncture");
    for (size_t i = 0; i < f.punctures.size(); ++i)
      for (size_t j = i + 1; j < f.punctures.size(); ++j)
        require(f.punctures[i] != f.punctures[j], "UnsupportedChart", "repeated puncture");
    for (int c = 0; c < copies; ++c) out.push_back(f);
  };

  Chart chart;
  for (auto& p : parts) parse_factor(p, chart.factors);
  require(!chart.factors.empty(), "UnsupportedChart", "empty chart");
  if (chart.factors.size() == 1)
    chart.factors[0].var = "z";
  else
    for (size_t f = 0; f < chart.factors.size(); ++f)
      chart.factors[f].var = "z" + std::to_string(f + 1);
  return chart;
}

bool CoordOneForm::is_zero() const {
  for (auto& f : c)
    if (!f.is_zero()) return false;
  return true;
}

void CoordTwoForm::add(int i, int j, const RationalFunction& v) {
  if (v.is_zero()) return;
  if (i == j) return;
  std::pair<int, int> key(i, j);
  RationalFunction val = v;
  if (i > j) {
    key = {j, i};
    val = -v;
  }
  auto it = c.find(key);
  if (it == c.end())
    c.emplace(key, val);
  else {
    it->second = it->second + val;
    if (it->second.is_zero()) c.erase(it);
  }
}

bool CoordTwoForm::is_zero() const {
  for (auto& [k, f] : c)
    if (!f.is_zero()) return false;
  return true;
}

std::optional<VecQ> FormSpace::express_two_form(const CoordTwoForm& w) const {
  // Unknowns c_k over two-atoms; per coordinate slot match polynomial
  // coefficients after clearing a common denominator.
  size_t n = two_.size();
  std::vector<RowQ> rows;
  std::vector<Rational> rhs;
  std::map<std::pair<int, int>, RationalFunction> target = w.c;
  // collect all slots appearing anywhere
  std::vector<std::pair<int, int>> slots;
  for (auto& [k, f] : target) slots.push_back(k);
  for (auto& atom : two_)
    for (auto& [k, f] : atom.coords)
      if (std::find(slots.begin(), slots.end(), k) == slots.end()) slots.push_back(k);

  for (auto& slot : slots) {
    // common denominator across the slot
    Polynomial den = Polynomial::constant(Polynomial(vars_).vars(), 1);
    auto get = [&](const std::map<std::pair<int, int>, RationalFunction>& m)
        -> std::optional<RationalFunction> {
      auto it = m.find(slot);
      if (it == m.end()) return std::nullopt;
      return it->second;
    };
    std::vector<RationalFunction> fs;
    for (size_t k = 0; k < n; ++k) {
      auto f = get(two_[k].coords);
      fs.push_back(f ? *f : RationalFunction::constant(vars_, 0));
      if (f) den = den * f->den();
    }
    RationalFunction tgt = get(target) ? *get(target) : RationalFunction::constant(vars_, 0);
    den = den * tgt.den();
    // numerators against the common denominator
    std::vector<Polynomial> nums;
    for (auto& f : fs) {
      Polynomial q(vars_);
      bool ok = den.divide_exact(f.den(), q);
      require(ok, "InvalidData", "denominator bookkeeping failure");
      nums.push_back(f.num() * q);
    }
    Polynomial qt(vars_);
    require(den.divide_exact(tgt.den(), qt), "InvalidData", "denominator bookkeeping failure");
    Polynomial tnum = tgt.num() * qt;
    // every monomial occurring anywhere gives one linear equation
    std::map<Exps, size_t> mono_index;
    auto note = [&](const Polynomial& p) {
      for (auto& [e, c] : p.terms()) mono_index.emplace(e, 0);
    };
    for (auto& p : nums) note(p);
    note(tnum);
    size_t mi = 0;
    for (auto& [e, idx] : mono_index) idx = mi++;
    std::vector<RowQ> local(mono_index.size(), RowQ::Constant(1, static_cast<Eigen::Index>(n), Rational(0)));
    std::vector<Rational> local_rhs(mono_index.size(), Rational(0));
    for (size_t k = 0; k < n; ++k)
      for (auto& [e, c] : nums[k].terms())
        local[mono_index[e]](static_cast<Eigen::Index>(k)) = c;
    for (auto& [e, c] : tnum.terms()) local_rhs[mono_index[e]] = c;
    for (size_t r = 0; r < local.size(); ++r) {
      rows.push_back(local[r]);
      rhs.push_back(local_rhs[r]);
    }
  }
  MatQ a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  VecQ b(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = rows[r];
    b(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  return linalg::solve(a, b);
}

void FormSpace::finalize() {
  d_img_.assign(one_.size(), std::nullopt);
  // d of backed atoms: d(sum f_i dz_i) = sum df_i ^ dz_i
  for (size_t i = 0; i < one_.size(); ++i) {
    const auto& atom = one_[i];
    if (!atom.backed()) continue;  // abstract: d image declared separately
    CoordTwoForm dw;
    for (size_t a = 0; a < vars_.size(); ++a) {
      if (atom.coords[a].is_zero()) continue;
      for (size_t b = 0; b < vars_.size(); ++b) {
        if (a == b) continue;
        RationalFunction df = atom.coords[a].derivative(b);
        if (!df.is_zero()) dw.add(static_cast<int>(b), static_cast<int>(a), df);
      }
    }
    if (dw.is_zero()) {
      VecQ zero = VecQ::Constant(static_cast<Eigen::Index>(two_.size()), Rational(0));
      d_img_[i] = zero;
      continue;
    }
    d_img_[i] = express_two_form(dw);
  }
  // validate declared primitives
  for (auto& atom : one_) {
    if (!atom.primitive || !atom.backed()) continue;
    for (size_t a = 0; a < vars_.size(); ++a)
      require(atom.primitive->derivative(a) == atom.coords[a], "InvalidData",
              "declared primitive does not differentiate to atom " + atom.name);
  }
  // wedge table for backed pairs
  for (size_t i = 0; i < one_.size(); ++i)
    for (size_t j = i; j < one_.size(); ++j) {
      if (wedge_.count({static_cast<int>(i), static_cast<int>(j)})) continue;
      if (i == j) {
        wedge_[{static_cast<int>(i), static_cast<int>(j)}] =
            VecQ::Constant(static_cast<Eigen::Index>(two_.size()), Rational(0));
        continue;
      }
      if (!one_[i].backed() || !one_[j].backed()) {
        wedge_[{static_cast<int>(i), static_cast<int>(j)}] = std::nullopt;
        continue;
      }
      CoordTwoForm w;
      for (size_t a = 0; a < vars_.size(); ++a)
        for (size_t b = 0; b < vars_.size(); ++b) {
          if (a == b) continue;
          RationalFunction prod = one_[i].coords[a] * one_[j].coords[b];
          if (!prod.is_zero()) w.add(static_cast<int>(a), static_cast<int>(b), prod);
        }
      if (w.is_zero()) {
        wedge_[{static_cast<int>(i), static_cast<int>(j)}] =
            VecQ::Constant(static_cast<Eigen::Index>(two_.size()), Rational(0));
        continue;
      }
      wedge_[{static_cast<int>(i), static_cast<int>(j)}] = express_two_form(w);
    }
}

std::optional<VecQ> FormSpace::wedge_image(size_t i, size_t j) const {
  bool flip = i > j;
  if (flip) std::swap(i, j);
  auto it = wedge_.find({static_cast<int>(i), static_cast<int>(j)});
  if (it == wedge_.end() || !it->second) return std::nullopt;
  if (!flip) return it->second;
  return VecQ(-*it->second);
}

MatQ FormSpace::exact_atom_rows() const {
  std::vector<size_t> exact;
  for (size_t i = 0; i < one_.size(); ++i)
    if (one_[i].primitive) exact.push_back(i);
  MatQ rows(static_cast<Eigen::Index>(exact.size()), static_cast<Eigen::Index>(one_.size()));
  rows.setConstant(Rational(0));
  for (size_t r = 0; r < exact.size(); ++r)
    rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(exact[r])) = 1;
  return rows;
}

bool FormSpace::fully_backed() const {
  for (auto& a : one_)
    if (!a.backed()) return false;
  return true;
}

int FormSpace::atom_index(const std::string& name) const {
  for (size_t i = 0; i < one_.size(); ++i)
    if (one_[i].name == name) return static_cast<int>(i);
  fail("InvalidData", "unknown atom '" + name + "'");
}

namespace {

RationalFunction dlog_coefficient(const std::vector<std::string>& vars, size_t var,
                                  const Rational& p) {
  // puncture 0 -> 1/z ; puncture p != 0 -> 1/(p - z)
  Polynomial den(vars);
  if (p == 0) {
    den = Polynomial::variable(vars, var);
  } else {
    den = Polynomial::constant(vars, p) - Polynomial::variable(vars, var);
  }
  return RationalFunction(Polynomial::constant(vars, 1), den);
}

std::string dlog_name(const std::string& var, const Rational& p) {
  if (p == 0) return "d" + var + "/" + var;
  if (p == 1) return "d" + var + "/(1-" + var + ")";
  return "d" + var + "/(" + to_string(p) + "-" + var + ")";
}

}  // namespace

std::shared_ptr<const FormSpace> FormSpace::for_chart(const Chart& chart) {
  return for_chart_extended(chart, false, false);
}

std::shared_ptr<const FormSpace> FormSpace::for_chart_extended(
    const Chart& chart, bool coordinate_atoms, bool plain_wedges,
    const std::vector<std::pair<Polynomial, size_t>>& monomial_atoms) {
  auto space = std::shared_ptr<FormSpace>(new FormSpace());
  space->chart_ = chart;
  space->vars_ = chart.vars();
  const auto& vars = space->vars_;

  struct DlogRef {
    size_t factor;
    size_t atom_index;
  };
  std::vector<DlogRef> dlogs;
  for (size_t f = 0; f < chart.factors.size(); ++f)
    for (auto& p : chart.factors[f].punctures) {
      OneFormAtom atom;
      atom.name = dlog_name(vars[f], p);
      atom.coords.assign(vars.size(), RationalFunction::constant(vars, 0));
      atom.coords[f] = dlog_coefficient(vars, f, p);
      dlogs.push_back({f, space->one_.size()});
      space->one_.push_back(std::move(atom));
    }
  if (coordinate_atoms)
    for (size_t f = 0; f < vars.size(); ++f) {
      OneFormAtom atom;
      atom.name = "d" + vars[f];
      atom.coords.assign(vars.size(), RationalFunction::constant(vars, 0));
      atom.coords[f] = RationalFunction::constant(vars, 1);
      atom.primitive = RationalFunction::variable(vars, f);
      space->one_.push_back(std::move(atom));
    }
  for (auto& [mono, f] : monomial_atoms) {
    OneFormAtom atom;
    atom.name = "(" + mono.str() + ")*d" + vars[f];
    atom.coords.assign(vars.size(), RationalFunction::constant(vars, 0));
    atom.coords[f] = RationalFunction(mono.with_vars(vars));
    // integrable when the monomial involves only the same variable
    bool same_var_only = true;
    for (auto& [e, c] : mono.terms())
      for (size_t v = 0; v < e.size(); ++v)
        if (e[v] && v != f) same_var_only = false;
    if (same_var_only) {
      Polynomial prim(vars);
      for (auto& [e, c] : mono.with_vars(vars).terms()) {
        Exps ne(e);
        ne[f] += 1;
        prim.add_term(ne, c / Rational(ne[f]));
      }
      atom.primitive = RationalFunction(prim);
    }
    space->one_.push_back(std::move(atom));
  }

  // two-atoms: wedges of dlog atoms across distinct factors
  for (size_t i = 0; i < dlogs.size(); ++i)
    for (size_t j = i + 1; j < dlogs.size(); ++j) {
      if (dlogs[i].factor == dlogs[j].factor) continue;
      const auto& a = space->one_[dlogs[i].atom_index];
      const auto& b = space->one_[dlogs[j].atom_index];
      TwoFormAtom two;
      two.name = "(" + a.name + ")^(" + b.name + ")";
      two.backed = true;
      int fa = static_cast<int>(dlogs[i].factor), fb = static_cast<int>(dlogs[j].factor);
      RationalFunction prod = a.coords[dlogs[i].factor] * b.coords[dlogs[j].factor];
      if (fa < fb)
        two.coords.emplace(std::make_pair(fa, fb), prod);
      else
        two.coords.emplace(std::make_pair(fb, fa), -prod);
      space->two_.push_back(std::move(two));
    }
  if (plain_wedges)
    for (size_t a = 0; a < vars.size(); ++a)
      for (size_t b = a + 1; b < vars.size(); ++b) {
        TwoFormAtom two;
        two.name = "d" + vars[a] + "^d" + vars[b];
        two.backed = true;
        two.coords.emplace(std::make_pair(static_cast<int>(a), static_cast<int>(b)),
                           RationalFunction::constant(vars, 1));
        space->two_.push_back(std::move(two));
      }

  space->finalize();
  return space;
}

std::shared_ptr<const FormSpace> FormSpace::with_abstract_atom(
    const std::shared_ptr<const FormSpace>& base,
                                                               const std::string& name,
                                                               const VecQ& d_image) {
  auto space = std::shared_ptr<FormSpace>(new FormSpace(*base));
  require(static_cast<size_t>(d_image.size()) == space->two_.size(), "InvalidData",
          "d image arity mismatch");
  space->one_.push_back(OneFormAtom{name, {}, std::nullopt});
  space->d_img_.push_back(d_image);
  int idx = static_cast<int>(space->one_.size()) - 1;
  for (int j = 0; j <= idx; ++j) {
    if (j == idx)
      space->wedge_[{idx, idx}] =
          VecQ::Constant(static_cast<Eigen::Index>(space->two_.size()), Rational(0));
    else
      space->wedge_[{j, idx}] = std::nullopt;
  }
  return space;
}

std::shared_ptr<const FormSpace> FormSpace::from_tables(
    std::vector<std::string> one_names, std::vector<std::string> two_names,
    const std::vector<std::optional<VecQ>>& d_images,
    const std::map<std::pair<int, int>, VecQ>& wedges) {
  auto space = std::shared_ptr<FormSpace>(new FormSpace());
  for (auto& n : one_names) space->one_.push_back(OneFormAtom{n, {}, std::nullopt});
  for (auto& n : two_names) space->two_.push_back(TwoFormAtom{n, {}, false});
  space->d_img_ = d_images;
  space->d_img_.resize(space->one_.size(), std::nullopt);
  for (size_t i = 0; i < space->one_.size(); ++i)
    for (size_t j = i; j < space->one_.size(); ++j) {
      auto it = wedges.find({static_cast<int>(i), static_cast<int>(j)});
      if (i == j) {
        if (it != wedges.end())
          require(it->second.isZero(), "InvalidData", "wedge table must be alternating");
        space->wedge_[{static_cast<int>(i), static_cast<int>(j)}] =
            VecQ::Constant(static_cast<Eigen::Index>(space->two_.size()), Rational(0));
        continue;
      }
      if (it == wedges.end()) {
        space->wedge_[{static_cast<int>(i), static_cast<int>(j)}] = std::nullopt;
        continue;
      }
      space->wedge_[{static_cast<int>(i), static_cast<int>(j)}] = it->second;
    }
  return space;
}

// DifferentialForm ------------------------------------------------------------

DifferentialForm DifferentialForm::function(FormSpacePtr s, RationalFunction f) {
  DifferentialForm out;
  out.degree_ = 0;
  out.space_ = std::move(s);
  out.f0_ = std::move(f);
  return out;
}

DifferentialForm DifferentialForm::zero(FormSpacePtr s, int degree) {
  DifferentialForm out;
  out.degree_ = degree;
  out.space_ = std::move(s);
  const auto& vars = out.space_->vars();
  if (degree == 0) {
    out.f0_ = RationalFunction::constant(vars, 0);
  } else if (degree == 1) {
    out.atom_.assign(out.space_->n1(), RationalFunction::constant(vars, 0));
    out.coord1_.c.assign(vars.size(), RationalFunction::constant(vars, 0));
  } else {
    require(degree == 2, "InvalidData", "forms have degree 0, 1 or 2");
    out.atom_.assign(out.space_->n2(), RationalFunction::constant(vars, 0));
  }
  return out;
}

DifferentialForm DifferentialForm::atom(FormSpacePtr s, size_t index, int degree) {
  DifferentialForm out = zero(s, degree);
  out.atom_[index] = RationalFunction::constant(out.space_->vars(), 1);
  return out;
}

DifferentialForm DifferentialForm::one_form(FormSpacePtr s,
                                            std::vector<RationalFunction> atom_coeffs) {
  DifferentialForm out = zero(s, 1);
  require(atom_coeffs.size() == out.space_->n1(), "InvalidData", "atom coefficient arity");
  out.atom_ = std::move(atom_coeffs);
  return out;
}

DifferentialForm DifferentialForm::from_q_vector(FormSpacePtr s, const VecQ& atoms, int degree) {
  DifferentialForm out = zero(std::move(s), degree);
  require(static_cast<size_t>(atoms.size()) == out.atom_.size(), "InvalidData", "atom arity");
  for (Eigen::Index i = 0; i < atoms.size(); ++i)
    out.atom_[static_cast<size_t>(i)] =
        RationalFunction::constant(out.space_->vars(), atoms(i));
  return out;
}

DifferentialForm DifferentialForm::coord_one_form(FormSpacePtr s, CoordOneForm c) {
  DifferentialForm out = zero(std::move(s), 1);
  require(c.c.size() == out.space_->vars().size(), "InvalidData", "coordinate arity");
  out.coord1_ = std::move(c);
  return out;
}

bool DifferentialForm::is_zero() const {
  if (degree_ == 0) return f0_.is_zero();
  if (degree_ == 1) {
    CoordOneForm coords;
    coords.c.assign(space_->vars().size(), RationalFunction::constant(space_->vars(), 0));
    for (size_t i = 0; i < atom_.size(); ++i) {
      if (atom_[i].is_zero()) continue;
      const auto& a = space_->one_atom(i);
      if (!a.backed()) {
        if (!atom_[i].is_zero()) return false;
        continue;
      }
      for (size_t v = 0; v < coords.c.size(); ++v)
        coords.c[v] += atom_[i] * a.coords[v];
    }
    for (size_t v = 0; v < coords.c.size(); ++v) coords.c[v] += coord1_.c[v];
    return coords.is_zero();
  }
  CoordTwoForm coords;
  for (size_t i = 0; i < atom_.size(); ++i) {
    if (atom_[i].is_zero()) continue;
    const auto& a = space_->two_atom(i);
    if (!a.backed) {
      if (!atom_[i].is_zero()) return false;
      continue;
    }
    for (auto& [k, f] : a.coords) coords.add(k.first, k.second, atom_[i] * f);
  }
  for (auto& [k, f] : coord2_.c) coords.add(k.first, k.second, f);
  return coords.is_zero();
}

DifferentialForm DifferentialForm::operator+(const DifferentialForm& o) const {
  require(space_ == o.space_ && degree_ == o.degree_, "SpecMismatch",
          "form addition needs matching space and degree");
  DifferentialForm out = *this;
  if (degree_ == 0) {
    out.f0_ += o.f0_;
    return out;
  }
  for (size_t i = 0; i < atom_.size(); ++i) out.atom_[i] += o.atom_[i];
  if (degree_ == 1)
    for (size_t v = 0; v < coord1_.c.size(); ++v) out.coord1_.c[v] += o.coord1_.c[v];
  else
    for (auto& [k, f] : o.coord2_.c) out.coord2_.add(k.first, k.second, f);
  return out;
}

DifferentialForm DifferentialForm::operator-(const DifferentialForm& o) const {
  return *this + o.scaled(RationalFunction::constant(space_->vars(), -1));
}

DifferentialForm DifferentialForm::scaled(const RationalFunction& f) const {
  DifferentialForm out = *this;
  if (degree_ == 0) {
    out.f0_ = out.f0_ * f;
    return out;
  }
  for (auto& c : out.atom_) c = c * f;
  if (degree_ == 1)
    for (auto& c : out.coord1_.c) c = c * f;
  else {
    CoordTwoForm scaled;
    for (auto& [k, g] : out.coord2_.c) scaled.add(k.first, k.second, g * f);
    out.coord2_ = std::move(scaled);
  }
  return out;
}

CoordOneForm DifferentialForm::coords_one() const {
  require(degree_ == 1, "InvalidData", "coords_one needs a one-form");
  CoordOneForm coords;
  coords.c.assign(space_->vars().size(), RationalFunction::constant(space_->vars(), 0));
  for (size_t i = 0; i < atom_.size(); ++i) {
    if (atom_[i].is_zero()) continue;
    const auto& a = space_->one_atom(i);
    require(a.backed(), "OutOfSpace", "atom '" + a.name + "' has no coordinate expression");
    for (size_t v = 0; v < coords.c.size(); ++v) coords.c[v] += atom_[i] * a.coords[v];
  }
  for (size_t v = 0; v < coords.c.size(); ++v) coords.c[v] += coord1_.c[v];
  return coords;
}

CoordTwoForm DifferentialForm::coords_two() const {
  require(degree_ == 2, "InvalidData", "coords_two needs a two-form");
  CoordTwoForm coords;
  for (size_t i = 0; i < atom_.size(); ++i) {
    if (atom_[i].is_zero()) continue;
    const auto& a = space_->two_atom(i);
    require(a.backed, "OutOfSpace", "two-atom '" + a.name + "' has no coordinate expression");
    for (auto& [k, f] : a.coords) coords.add(k.first, k.second, atom_[i] * f);
  }
  for (auto& [k, f] : coord2_.c) coords.add(k.first, k.second, f);
  return coords;
}

std::optional<VecQ> DifferentialForm::as_q_atoms() const {
  if (degree_ == 0) return std::nullopt;
  if (degree_ == 1 && !coord1_.is_zero()) return std::nullopt;
  if (degree_ == 2 && !coord2_.is_zero()) return std::nullopt;
  VecQ out(static_cast<Eigen::Index>(atom_.size()));
  for (size_t i = 0; i < atom_.size(); ++i) {
    if (!atom_[i].is_constant()) return std::nullopt;
    out(static_cast<Eigen::Index>(i)) = atom_[i].constant_value();
  }
  return out;
}

std::string DifferentialForm::str() const {
  std::ostringstream out;
  if (degree_ == 0) return f0_.str();
  bool first = true;
  auto emit = [&](const std::string& coeff, const std::string& name) {
    if (!first) out << " + ";
    first = false;
    out << "(" << coeff << ") " << name;
  };
  for (size_t i = 0; i < atom_.size(); ++i)
    if (!atom_[i].is_zero())
      emit(atom_[i].str(),
           degree_ == 1 ? space_->one_atom(i).name : space_->two_atom(i).name);
  if (degree_ == 1) {
    for (size_t v = 0; v < coord1_.c.size(); ++v)
      if (!coord1_.c[v].is_zero()) emit(coord1_.c[v].str(), "d" + space_->vars()[v]);
  } else {
    for (auto& [k, f] : coord2_.c)
      if (!f.is_zero())
        emit(f.str(), "d" + space_->vars()[k.first] + "^d" + space_->vars()[k.second]);
  }
  return first ? "0" : out.str();
}

DifferentialForm d(const DifferentialForm& form) {
  const auto& space = form.space_;
  const auto& vars = space->vars();
  if (form.degree_ == 0) {
    DifferentialForm out = DifferentialForm::zero(space, 1);
    for (size_t v = 0; v < vars.size(); ++v) out.coord1_.c[v] = form.f0_.derivative(v);
    return out;
  }
  require(form.degree_ == 1, "InvalidData", "d is defined on degrees 0 and 1");
  DifferentialForm out = DifferentialForm::zero(space, 2);
  for (size_t i = 0; i < form.atom_.size(); ++i) {
    const auto& c = form.atom_[i];
    if (c.is_zero()) continue;
    const auto& img = space->d_image(i);
    require(img.has_value(), "OutOfSpace",
            "derivative of atom '" + space->one_atom(i).name + "' leaves the declared span");
    // c * d(atom)
    for (Eigen::Index k = 0; k < img->size(); ++k)
      if ((*img)(k) != 0) out.atom_[static_cast<size_t>(k)] += c * (*img)(k);
    // dc ^ atom
    if (!c.is_constant()) {
      const auto& a = space->one_atom(i);
      require(a.backed(), "OutOfSpace",
              "nonconstant coefficient on abstract atom '" + a.name + "'");
      for (size_t v = 0; v < vars.size(); ++v) {
        RationalFunction dc = c.derivative(v);
        if (dc.is_zero()) continue;
        for (size_t u = 0; u < vars.size(); ++u) {
          if (u == v) continue;
          RationalFunction prod = dc * a.coords[u];
          if (!prod.is_zero()) out.coord2_.add(static_cast<int>(v), static_cast<int>(u), prod);
        }
      }
    }
  }
  // coordinate part: d(g dz_v) = dg ^ dz_v
  for (size_t v = 0; v < vars.size(); ++v) {
    const auto& g = form.coord1_.c[v];
    if (g.is_zero()) continue;
    for (size_t u = 0; u < vars.size(); ++u) {
      if (u == v) continue;
      RationalFunction dg = g.derivative(u);
      if (!dg.is_zero()) out.coord2_.add(static_cast<int>(u), static_cast<int>(v), dg);
    }
  }
  return out;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require(a.space_ == b.space_, "SpecMismatch", "wedge needs a common form space");
  require(a.degree_ == 1 && b.degree_ == 1, "InvalidData", "wedge is defined on one-forms");
  const auto& space = a.space_;
  const auto& vars = space->vars();
  DifferentialForm out = DifferentialForm::zero(space, 2);

  // atom x atom via the wedge table, with a coordinate fallback for backed
  // pairs whose product is not in the declared two-atom span
  for (size_t i = 0; i < a.atom_.size(); ++i) {
    if (a.atom_[i].is_zero()) continue;
    for (size_t j = 0; j < b.atom_.size(); ++j) {
      if (b.atom_[j].is_zero()) continue;
      RationalFunction coeff = a.atom_[i] * b.atom_[j];
      if (coeff.is_zero()) continue;
      auto img = space->wedge_image(i, j);
      if (img.has_value()) {
        for (Eigen::Index k = 0; k < img->size(); ++k)
          if ((*img)(k) != 0) out.atom_[static_cast<size_t>(k)] += coeff * (*img)(k);
        continue;
      }
      const auto& ai = space->one_atom(i);
      const auto& aj = space->one_atom(j);
      require(ai.backed() && aj.backed(), "OutOfSpace",
              "wedge of atoms '" + ai.name + "' and '" + aj.name +
                  "' leaves the declared span");
      for (size_t u = 0; u < vars.size(); ++u)
        for (size_t v = 0; v < vars.size(); ++v) {
          if (u == v) continue;
          RationalFunction prod = coeff * ai.coords[u] * aj.coords[v];
          if (!prod.is_zero()) out.coord2_.add(static_cast<int>(u), static_cast<int>(v), prod);
        }
    }
  }

  // contributions involving a coordinate part
  bool a_coord = !a.coord1_.is_zero();
  bool b_coord = !b.coord1_.is_zero();
  if (a_coord || b_coord) {
    auto atom_coords = [&](const DifferentialForm& f, size_t v) {
      RationalFunction acc = RationalFunction::constant(vars, 0);
      for (size_t i = 0; i < f.atom_.size(); ++i)
        if (!f.atom_[i].is_zero()) {
          const auto& at = space->one_atom(i);
          require(at.backed(), "OutOfSpace",
                  "nonzero coefficient on abstract atom '" + at.name + "' in a mixed wedge");
          acc += f.atom_[i] * at.coords[v];
        }
      return acc;
    };
    for (size_t u = 0; u < vars.size(); ++u)
      for (size_t v = 0; v < vars.size(); ++v) {
        if (u == v) continue;
        // atom(a) ^ coord(b) + coord(a) ^ atom(b) + coord(a) ^ coord(b)
        RationalFunction prod = atom_coords(a, u) * b.coord1_.c[v] +
                                a.coord1_.c[u] * atom_coords(b, v) +
                                a.coord1_.c[u] * b.coord1_.c[v];
        if (!prod.is_zero()) out.coord2_.add(static_cast<int>(u), static_cast<int>(v), prod);
      }
  }
  return out;
}

bool SeriesOneForm::is_zero() const {
  for (auto& s : comps)
    if (!s.is_zero()) return false;
  return true;
}

size_t SeriesOneForm::nonzero_coefficients() const {
  size_t n = 0;
  for (auto& s : comps)
    for (auto& [e, c] : s.terms())
      if (c != 0) ++n;
  return n;
}

SeriesOneForm jet_expand_form(const DifferentialForm& form, const std::vector<Rational>& base,
                              unsigned order) {
  require(form.degree() == 1, "InvalidData", "jets of one-forms only");
  CoordOneForm coords = form.coords_one();
  SeriesOneForm out;
  for (auto& f : coords.c) out.comps.push_back(jet_expand(f, base, order));
  return out;
}

}  // namespace kim::forms
