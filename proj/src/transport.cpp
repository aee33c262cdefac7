#include "kim/transport.hpp"

#include <algorithm>

#include "kim/error.hpp"

namespace kim::transport {

using lie::LieElement;
using lie::UEAElement;
using lie::Word;

namespace {

std::vector<TruncSeries> omega_series(const conn::ReducedConnection& universal,
                                      const std::vector<Rational>& base, unsigned order,
                                      size_t coord, const std::vector<std::string>& tvars) {
  // coefficient of dz_coord in omega_g, expanded at the base point
  std::vector<TruncSeries> out;
  for (int g = 0; g < universal.fiber->gens(); ++g) {
    forms::CoordOneForm coords = universal.omega[static_cast<size_t>(g)].coords_one();
    TruncSeries s = jet_expand(coords.c[coord], base, order);
    require(s.vars() == tvars, "InvalidData", "shifted variable bookkeeping");
    out.push_back(std::move(s));
  }
  return out;
}

UEAElement<TruncSeries> left_mult_omega(const conn::ReducedConnection& universal,
                                        const std::vector<std::vector<TruncSeries>>& f,
                                        const UEAElement<TruncSeries>& e, size_t coord) {
  // (sum_g e_g f[coord][g]) * E
  UEAElement<TruncSeries> out = UEAElement<TruncSeries>::zero(e.ctx);
  size_t cls = static_cast<size_t>(e.ctx->cls());
  for (int g = 0; g < e.ctx->gens(); ++g) {
    const TruncSeries& fg = f[coord][static_cast<size_t>(g)];
    if (fg.is_zero()) continue;
    for (auto& [w, c] : e.terms) {
      if (w.size() + 1 > cls) continue;
      Word nw;
      nw.reserve(w.size() + 1);
      nw.push_back(static_cast<uint8_t>(g));
      nw.insert(nw.end(), w.begin(), w.end());
      out.add(nw, c * fg);
    }
  }
  out.reduce();
  return out;
}

}  // namespace

HorizontalLog solve_j(const conn::ReducedConnection& universal, const std::vector<Rational>& base,
                      unsigned order) {
  require(universal.fiber != nullptr, "InvalidData", "universal connection data required");
  require(order >= 2, "InvalidData", "series order must be at least 2");
  const auto& zvars = universal.lambda.space->vars();
  require(base.size() == zvars.size(), "InvalidData", "base point arity mismatch");
  // pole-free base: every omega coefficient must expand
  auto tvars = shifted_var_names(zvars);

  std::vector<std::vector<TruncSeries>> f(zvars.size());
  for (size_t a = 0; a < zvars.size(); ++a) f[a] = omega_series(universal, base, order, a, tvars);

  auto ctx = universal.fiber;
  TruncSeries one(tvars, order, 1);
  UEAElement<TruncSeries> e = UEAElement<TruncSeries>::one(ctx, one);

  for (unsigned s = 0; s + 1 < order; ++s) {
    // RHS_a = (omega . E)_a, homogeneous degree-s part; Euler integration
    std::map<Word, TruncSeries> increment;
    for (size_t a = 0; a < zvars.size(); ++a) {
      UEAElement<TruncSeries> rhs = left_mult_omega(universal, f, e, a);
      TruncSeries ta = TruncSeries::variable(tvars, a, order);
      for (auto& [w, c] : rhs.terms) {
        TruncSeries part = c.homogeneous_part(s);
        if (part.is_zero()) continue;
        TruncSeries contrib = (ta * part) * Rational(Integer(1), Integer(s + 1));
        auto it = increment.find(w);
        if (it == increment.end())
          increment.emplace(w, contrib);
        else
          it->second += contrib;
      }
    }
    for (auto& [w, c] : increment) e.add(w, c);
  }

  HorizontalLog h;
  h.ctx = ctx;
  h.base = base;
  h.depth = universal.depth;
  h.order = order;
  h.exp_j = e;
  h.j = lie::uea_log(e, one);
  return h;
}

size_t lie_ode_cross_check(const conn::ReducedConnection& universal, const HorizontalLog& h) {
  // dJ and (ad_J/(e^{ad_J}-1))(omega) compared coefficient-wise. omega is
  // promoted to a Lie element with one-form-component series coefficients,
  // handled one chart direction at a time.
  const auto& zvars = universal.lambda.space->vars();
  auto tvars = shifted_var_names(zvars);
  size_t mismatches = 0;
  for (size_t a = 0; a < zvars.size(); ++a) {
    LieElement<TruncSeries> omega_a = LieElement<TruncSeries>::zero(h.ctx);
    for (int g = 0; g < h.ctx->gens(); ++g) {
      forms::CoordOneForm coords = universal.omega[static_cast<size_t>(g)].coords_one();
      TruncSeries s = jet_expand(coords.c[a], h.base, h.order);
      if (!s.is_zero()) omega_a.add(g, s);
    }
    LieElement<TruncSeries> rhs =
        lie::ad_series_apply(lie::AdSeriesKind::TOverExpm1, h.j, omega_a);
    // dJ/d t_a
    LieElement<TruncSeries> lhs = LieElement<TruncSeries>::zero(h.ctx);
    for (auto& [i, c] : h.j.coords) {
      TruncSeries dc = c.derivative(a);
      if (!dc.is_zero()) lhs.add(i, dc);
    }
    LieElement<TruncSeries> diff = lhs - rhs;
    for (auto& [i, c] : diff.coords)
      for (auto& [e, v] : c.truncate(h.order - 1).terms())
        if (v != 0) ++mismatches;
  }
  return mismatches;
}

size_t verify_grouplike(const lie::UEAElement<TruncSeries>& u) {
  auto defect = lie::grouplike_defect(u);
  size_t n = 0;
  for (auto& [k, c] : defect.terms)
    for (auto& [e, v] : c.terms())
      if (v != 0) ++n;
  return n;
}

size_t verify_grouplike(const HorizontalLog& h) { return verify_grouplike(h.exp_j); }

size_t verify_horizontality(const conn::ReducedConnection& universal, const HorizontalLog& h) {
  const auto& zvars = universal.lambda.space->vars();
  auto tvars = shifted_var_names(zvars);
  std::vector<std::vector<TruncSeries>> f(zvars.size());
  for (size_t a = 0; a < zvars.size(); ++a)
    f[a] = omega_series(universal, h.base, h.order, a, tvars);
  size_t bad = 0;
  for (size_t a = 0; a < zvars.size(); ++a) {
    UEAElement<TruncSeries> rhs = left_mult_omega(universal, f, h.exp_j, a);
    UEAElement<TruncSeries> lhs = UEAElement<TruncSeries>::zero(h.ctx);
    for (auto& [w, c] : h.exp_j.terms) {
      TruncSeries dc = c.derivative(a);
      if (!dc.is_zero()) lhs.add(w, dc);
    }
    UEAElement<TruncSeries> diff = lhs - rhs;
    for (auto& [w, c] : diff.terms)
      for (auto& [e, v] : c.truncate(h.order - 1).terms())
        if (v != 0) ++bad;
  }
  return bad;
}

bool MixedOneForm::is_zero() const {
  for (auto& f : c)
    if (!f.is_zero()) return false;
  return true;
}

void MixedTwoForm::add(int i, int j, const RationalFunction& v) {
  if (v.is_zero() || i == j) return;
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

bool MixedTwoForm::is_zero() const {
  for (auto& [k, f] : c)
    if (!f.is_zero()) return false;
  return true;
}

ThetaSystem compute_theta(const conn::ReducedConnection& universal) {
  require(universal.fiber != nullptr, "InvalidData", "universal connection data required");
  auto ctx = universal.fiber;
  auto space = universal.lambda.space;
  const auto& zvars = space->vars();
  int r = ctx->dim();

  ThetaSystem ts;
  ts.ctx = ctx;
  ts.space = space;
  ts.lie_dim = static_cast<size_t>(r);
  for (int k = 0; k < r; ++k) ts.vars.push_back("t" + std::to_string(k + 1));
  for (auto& v : zvars) ts.vars.push_back(v);
  size_t nd = ts.lie_dim + zvars.size();

  auto zero_rf = RationalFunction::constant(ts.vars, 0);
  auto zero_form = MixedOneForm{std::vector<RationalFunction>(nd, zero_rf)};

  // B_s = (ad_t)^s (dt) as Lie-valued mixed one-forms: per basis index k a
  // mixed one-form whose coefficients are polynomial in t.
  std::vector<MixedOneForm> b(static_cast<size_t>(r), zero_form);
  for (int k = 0; k < r; ++k)
    b[static_cast<size_t>(k)].c[static_cast<size_t>(k)] = RationalFunction::constant(ts.vars, 1);

  ts.theta.assign(static_cast<size_t>(r), zero_form);
  auto coeffs = lie::ad_series_coefficients(lie::AdSeriesKind::Expm1OverT,
                                            static_cast<unsigned>(ctx->cls()));
  auto add_scaled = [&](std::vector<MixedOneForm>& acc, const std::vector<MixedOneForm>& src,
                        const Rational& q) {
    for (size_t k = 0; k < acc.size(); ++k)
      for (size_t dcomp = 0; dcomp < nd; ++dcomp)
        acc[k].c[dcomp] += src[k].c[dcomp] * q;
  };
  add_scaled(ts.theta, b, coeffs[0]);
  for (size_t s = 1; s < coeffs.size(); ++s) {
    // b <- [t, b]
    std::vector<MixedOneForm> nb(static_cast<size_t>(r), zero_form);
    bool any = false;
    for (int i = 0; i < r; ++i) {
      RationalFunction ti = RationalFunction::variable(ts.vars, static_cast<size_t>(i));
      for (int k = 0; k < r; ++k) {
        if (b[static_cast<size_t>(k)].is_zero()) continue;
        for (auto& [l, q] : ctx->bracket(i, k)) {
          for (size_t dcomp = 0; dcomp < nd; ++dcomp) {
            if (b[static_cast<size_t>(k)].c[dcomp].is_zero()) continue;
            nb[static_cast<size_t>(l)].c[dcomp] +=
                ti * b[static_cast<size_t>(k)].c[dcomp] * q;
            any = true;
          }
        }
      }
    }
    b = std::move(nb);
    if (!any) break;
    add_scaled(ts.theta, b, coeffs[s]);
  }

  // subtract omega
  ts.omega.assign(static_cast<size_t>(r), zero_form);
  for (int k = 0; k < r; ++k) {
    forms::CoordOneForm coords = universal.omega[static_cast<size_t>(k)].coords_one();
    for (size_t a = 0; a < zvars.size(); ++a) {
      if (coords.c[a].is_zero()) continue;
      RationalFunction lifted = coords.c[a].with_vars(ts.vars);
      ts.omega[static_cast<size_t>(k)].c[ts.lie_dim + a] = lifted;
      ts.theta[static_cast<size_t>(k)].c[ts.lie_dim + a] -= lifted;
    }
  }
  return ts;
}

namespace {

MixedTwoForm mixed_d(const ThetaSystem& ts, const MixedOneForm& w) {
  MixedTwoForm out;
  for (size_t comp = 0; comp < w.c.size(); ++comp) {
    if (w.c[comp].is_zero()) continue;
    for (size_t v = 0; v < ts.vars.size(); ++v) {
      RationalFunction df = w.c[comp].derivative(v);
      if (!df.is_zero()) out.add(static_cast<int>(v), static_cast<int>(comp), df);
    }
  }
  return out;
}

MixedTwoForm mixed_wedge(const MixedOneForm& a, const MixedOneForm& b) {
  MixedTwoForm out;
  for (size_t u = 0; u < a.c.size(); ++u) {
    if (a.c[u].is_zero()) continue;
    for (size_t v = 0; v < b.c.size(); ++v) {
      if (v == u || b.c[v].is_zero()) continue;
      out.add(static_cast<int>(u), static_cast<int>(v), a.c[u] * b.c[v]);
    }
  }
  return out;
}

}  // namespace

std::vector<MixedTwoForm> theta_identity_residual(const ThetaSystem& ts) {
  int r = static_cast<int>(ts.lie_dim);
  std::vector<MixedTwoForm> out(static_cast<size_t>(r));
  for (int k = 0; k < r; ++k) out[static_cast<size_t>(k)] = mixed_d(ts, ts.theta[static_cast<size_t>(k)]);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const auto& br = ts.ctx->bracket(i, j);
      if (br.empty()) continue;
      // theta_i ^ (1/2 theta_j + omega_j)
      MixedOneForm half = ts.omega[static_cast<size_t>(j)];
      for (size_t comp = 0; comp < half.c.size(); ++comp)
        half.c[comp] += ts.theta[static_cast<size_t>(j)].c[comp] * Rational(1, 2);
      MixedTwoForm w = mixed_wedge(ts.theta[static_cast<size_t>(i)], half);
      for (auto& [k, q] : br)
        for (auto& [key, f] : w.c) out[static_cast<size_t>(k)].add(key.first, key.second, -(f * q));
    }
  return out;
}

size_t mixed_nonzero_count(const std::vector<MixedTwoForm>& residual) {
  size_t n = 0;
  for (auto& r : residual)
    for (auto& [k, f] : r.c)
      if (!f.is_zero()) ++n;
  return n;
}

std::vector<forms::SeriesOneForm> pullback_theta_along_graph(const ThetaSystem& ts,
                                                             const HorizontalLog& h) {
  const auto& zvars = ts.space->vars();
  auto tvars = shifted_var_names(zvars);
  unsigned order = h.order;
  size_t r = ts.lie_dim;

  // substitution arguments: t_k -> J_k, z_a -> base_a + t_a
  std::vector<TruncSeries> args;
  for (size_t k = 0; k < r; ++k) {
    auto it = h.j.coords.find(static_cast<int>(k));
    args.push_back(it == h.j.coords.end() ? TruncSeries(tvars, order) : it->second);
  }
  for (size_t a = 0; a < zvars.size(); ++a)
    args.push_back(TruncSeries::variable(tvars, a, order) +
                   TruncSeries(tvars, order, h.base[a]));

  // differentials of the substitution: d(arg_comp) = sum_a d(arg)/dt_a dt_a
  std::vector<std::vector<TruncSeries>> darg;
  for (auto& s : args) {
    std::vector<TruncSeries> row;
    for (size_t a = 0; a < zvars.size(); ++a) row.push_back(s.derivative(a));
    darg.push_back(std::move(row));
  }

  auto eval_rf = [&](const RationalFunction& f) {
    TruncSeries num = TruncSeries::from_polynomial(
                          f.num(), order + f.num().degree() + 1)
                          .substitute(args)
                          .truncate(order);
    TruncSeries den = TruncSeries::from_polynomial(
                          f.den(), order + f.den().degree() + 1)
                          .substitute(args)
                          .truncate(order);
    require(den.constant_term() != 0, "PoleOnV", "coefficient has a pole along the graph");
    return num * den.inverse();
  };

  std::vector<forms::SeriesOneForm> out;
  for (size_t k = 0; k < r; ++k) {
    forms::SeriesOneForm pb;
    pb.comps.assign(zvars.size(), TruncSeries(tvars, order));
    for (size_t comp = 0; comp < ts.theta[k].c.size(); ++comp) {
      const auto& coeff = ts.theta[k].c[comp];
      if (coeff.is_zero()) continue;
      TruncSeries val = eval_rf(coeff);
      for (size_t a = 0; a < zvars.size(); ++a) {
        TruncSeries term = val * darg[comp][a];
        if (!term.is_zero()) pb.comps[a] += term;
      }
    }
    // the identity is exact only below the truncation order
    for (auto& s : pb.comps) s = s.truncate(order - 1);
    out.push_back(std::move(pb));
  }
  return out;
}

lie::UEAElement<TruncSeries> uea_series_inverse(const lie::UEAElement<TruncSeries>& u) {
  // (1 - n)^{-1} with n = 1 - u; n has positive word length or positive
  // series valuation everywhere, so the Neumann sum terminates.
  auto ctx = u.ctx;
  const TruncSeries* c0 = u.find(Word{});
  require(c0 != nullptr && c0->constant_term() != 0, "NotUnipotent",
          "element is not invertible");
  unsigned order = c0->order();
  TruncSeries one(c0->vars(), order, 1);
  UEAElement<TruncSeries> n = UEAElement<TruncSeries>::one(ctx, one) - u;
  UEAElement<TruncSeries> acc = UEAElement<TruncSeries>::one(ctx, one);
  UEAElement<TruncSeries> power = UEAElement<TruncSeries>::one(ctx, one);
  size_t bound = static_cast<size_t>(ctx->cls()) + order;
  for (size_t k = 1; k <= bound; ++k) {
    power = power * n;
    if (power.is_zero()) break;
    acc = acc + power;
  }
  return acc;
}

lie::UEAElement<TruncSeries> albanese_local(const HorizontalLog& h,
                                            const lie::UEAElement<TruncSeries>& f_section) {
  require(verify_grouplike(f_section) == 0, "NotGroupLike",
          "the Hodge section must be group-like");
  const TruncSeries* c0 = f_section.find(Word{});
  bool base_one = c0 != nullptr && c0->constant_term() == 1;
  if (base_one)
    for (auto& [w, c] : f_section.terms)
      if (!w.empty() && c.constant_term() != 0) base_one = false;
  require(base_one, "NotGroupLike", "the Hodge section must equal 1 at the base point");
  return h.exp_j * uea_series_inverse(f_section);
}

}  // namespace kim::transport
