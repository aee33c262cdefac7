#include "kim/intersect.hpp"

#include <algorithm>
#include <sstream>

#include "kim/error.hpp"

namespace kim::intersect {

using forms::DifferentialForm;
using forms::SeriesOneForm;

std::vector<Rational> FormalSubvariety::base_z() const {
  std::vector<Rational> zero(params.size(), Rational(0));
  std::vector<Rational> out;
  for (auto& f : z_param) out.push_back(f.eval(zero));
  return out;
}

std::vector<TruncSeries> FormalSubvariety::z_series(unsigned ord) const {
  std::vector<Rational> zero(params.size(), Rational(0));
  std::vector<TruncSeries> out;
  for (auto& f : z_param) out.push_back(jet_expand(f, zero, ord));
  return out;
}

std::vector<TruncSeries> FormalSubvariety::t_series(unsigned ord) const {
  std::vector<Rational> zero(params.size(), Rational(0));
  std::vector<TruncSeries> out;
  for (auto& f : t_param) out.push_back(jet_expand(f, zero, ord));
  return out;
}

void FormalSubvariety::validate() const {
  for (auto& f : z_param)
    require(f.vars() == params, "InvalidData", "parameterization variable mismatch");
  for (auto& f : t_param)
    require(f.vars() == params, "InvalidData", "parameterization variable mismatch");
  std::vector<Rational> zero(params.size(), Rational(0));
  for (auto& f : z_param) f.eval(zero);  // raises PoleAtBase when s = 0 is a pole
  if (!ideal.empty()) {
    // generators are polynomials in (t_1..t_r, z_1..z_k); substitute
    std::vector<RationalFunction> args;
    for (auto& f : t_param) args.push_back(f);
    for (auto& f : z_param) args.push_back(f);
    for (auto& g : ideal) {
      require(g.vars().size() == args.size(), "InvalidData", "ideal variable arity mismatch");
      RationalFunction val = g.eval_rational(args);
      require(val.is_zero(), "InvalidData",
              "parameterization does not satisfy the declared ideal");
    }
  }
}

namespace {

// d(arg)/ds_j for every parameterization component.
std::vector<std::vector<RationalFunction>> param_differentials(
    const std::vector<RationalFunction>& comps, const std::vector<std::string>& params) {
  std::vector<std::vector<RationalFunction>> out;
  for (auto& f : comps) {
    std::vector<RationalFunction> row;
    for (size_t j = 0; j < params.size(); ++j) row.push_back(f.derivative(j));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<TruncSeries> shifted_param_series(const FormalSubvariety& v, unsigned order) {
  auto svars = shifted_var_names(v.params);
  std::vector<TruncSeries> out;
  for (size_t j = 0; j < v.params.size(); ++j)
    out.push_back(TruncSeries::variable(svars, j, order));
  return out;
}

}  // namespace

std::vector<std::vector<RationalFunction>> restrict_forms_symbolic(
    const std::vector<DifferentialForm>& ws, const FormalSubvariety& v) {
  v.validate();
  auto dz = param_differentials(v.z_param, v.params);
  std::vector<std::vector<RationalFunction>> out;
  for (auto& w : ws) {
    forms::CoordOneForm coords = w.coords_one();
    std::vector<RationalFunction> row(v.params.size(),
                                      RationalFunction::constant(v.params, 0));
    for (size_t a = 0; a < coords.c.size(); ++a) {
      if (coords.c[a].is_zero()) continue;
      RationalFunction num = coords.c[a].num().eval_rational(v.z_param);
      RationalFunction den = coords.c[a].den().eval_rational(v.z_param);
      require(!den.is_zero(), "PoleOnV",
              "coefficient denominator vanishes along the subvariety");
      RationalFunction val = num / den;
      for (size_t j = 0; j < v.params.size(); ++j)
        if (!dz[a][j].is_zero()) row[j] += val * dz[a][j];
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::vector<SeriesOneForm> series_from_symbolic(
    const std::vector<std::vector<RationalFunction>>& sym, const std::vector<std::string>& params,
    unsigned order) {
  std::vector<Rational> zero(params.size(), Rational(0));
  std::vector<SeriesOneForm> out;
  for (auto& row : sym) {
    SeriesOneForm f;
    for (auto& c : row) f.comps.push_back(jet_expand(c, zero, order));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

std::vector<SeriesOneForm> restrict_forms(const std::vector<DifferentialForm>& ws,
                                          const FormalSubvariety& v, unsigned order) {
  return series_from_symbolic(restrict_forms_symbolic(ws, v), v.params, order);
}

std::vector<std::vector<RationalFunction>> restrict_theta_symbolic(const ThetaSystem& ts,
                                                                   const FormalSubvariety& v) {
  v.validate();
  require(v.t_param.size() == ts.lie_dim, "InvalidData",
          "theta restriction needs the Lie coordinate parameterization");
  std::vector<RationalFunction> args;
  for (auto& f : v.t_param) args.push_back(f);
  for (auto& f : v.z_param) args.push_back(f);
  auto dargs = param_differentials(args, v.params);

  std::vector<std::vector<RationalFunction>> out;
  for (auto& theta : ts.theta) {
    std::vector<RationalFunction> row(v.params.size(),
                                      RationalFunction::constant(v.params, 0));
    for (size_t comp = 0; comp < theta.c.size(); ++comp) {
      if (theta.c[comp].is_zero()) continue;
      RationalFunction num = theta.c[comp].num().eval_rational(args);
      RationalFunction den = theta.c[comp].den().eval_rational(args);
      require(!den.is_zero(), "PoleOnV", "theta coefficient has a pole along the subvariety");
      RationalFunction val = num / den;
      for (size_t j = 0; j < v.params.size(); ++j)
        if (!dargs[comp][j].is_zero()) row[j] += val * dargs[comp][j];
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SeriesOneForm> restrict_theta(const ThetaSystem& ts, const FormalSubvariety& v,
                                          unsigned order) {
  return series_from_symbolic(restrict_theta_symbolic(ts, v), v.params, order);
}

JetRankResult jet_rank(const std::vector<SeriesOneForm>& restricted, unsigned order) {
  require(order >= 2, "InvalidData", "jet order must be at least 2");
  // columns: (component, monomial) pairs present anywhere
  std::map<std::pair<size_t, Exps>, size_t> col;
  for (auto& f : restricted)
    for (size_t j = 0; j < f.comps.size(); ++j)
      for (auto& [e, c] : f.comps[j].terms())
        if (total_degree(e) < order) col.emplace(std::make_pair(j, e), 0);
  size_t nc = 0;
  for (auto& [k, idx] : col) idx = nc++;
  MatQ m(static_cast<Eigen::Index>(restricted.size()), static_cast<Eigen::Index>(nc));
  m.setConstant(Rational(0));
  for (size_t r = 0; r < restricted.size(); ++r)
    for (size_t j = 0; j < restricted[r].comps.size(); ++j)
      for (auto& [e, c] : restricted[r].comps[j].terms())
        if (total_degree(e) < order)
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col.at({j, e}))) = c;
  JetRankResult out;
  out.order = order;
  out.rank = linalg::rank(m);
  // relation space: left kernel, one row per rational relation among the forms
  MatQ k = linalg::kernel_basis(MatQ(m.transpose()));
  out.relations = MatQ(k.transpose());
  return out;
}

long long symbolic_q_rank(const std::vector<std::vector<RationalFunction>>& restricted) {
  if (restricted.empty()) return 0;
  size_t p = restricted[0].size();
  // clear denominators per component and match monomials over Q
  std::map<std::pair<size_t, Exps>, size_t> col;
  std::vector<std::vector<Polynomial>> nums(restricted.size());
  for (size_t slot = 0; slot < p; ++slot) {
    Polynomial den = Polynomial::constant(restricted[0][slot].vars(), 1);
    for (auto& row : restricted) den = den * row[slot].den();
    for (size_t r = 0; r < restricted.size(); ++r) {
      Polynomial q(den.vars());
      require(den.divide_exact(restricted[r][slot].den(), q), "InvalidData",
              "denominator bookkeeping");
      nums[r].push_back(restricted[r][slot].num() * q);
      for (auto& [e, c] : nums[r].back().terms()) col.emplace(std::make_pair(slot, e), 0);
    }
  }
  size_t nc = 0;
  for (auto& [k, idx] : col) idx = nc++;
  MatQ m(static_cast<Eigen::Index>(restricted.size()), static_cast<Eigen::Index>(nc));
  m.setConstant(Rational(0));
  for (size_t r = 0; r < restricted.size(); ++r)
    for (size_t slot = 0; slot < p; ++slot)
      for (auto& [e, c] : nums[r][slot].terms())
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col.at({slot, e}))) = c;
  return linalg::rank(m);
}

namespace {

using RFMat = Eigen::Matrix<RationalFunction, Eigen::Dynamic, Eigen::Dynamic>;
using RFVec = Eigen::Matrix<RationalFunction, Eigen::Dynamic, 1>;

bool all_constant(const std::vector<RationalFunction>& fs) {
  for (auto& f : fs)
    if (!f.is_constant()) return false;
  return true;
}

// Membership of target in the function-field span of the rows: solves
// rows^T x = target over the rational function field.
std::optional<RFVec> in_function_span(const std::vector<std::vector<RationalFunction>>& rows,
                                      const std::vector<RationalFunction>& target) {
  if (rows.empty()) return std::nullopt;
  size_t p = target.size();
  RFMat a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(rows.size()));
  RFVec b(static_cast<Eigen::Index>(p));
  for (size_t j = 0; j < p; ++j) {
    for (size_t r = 0; r < rows.size(); ++r) a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(r)) = rows[r][j];
    b(static_cast<Eigen::Index>(j)) = target[j];
  }
  return linalg::solve(a, b);
}

}  // namespace

DependencyCertificate descent_depth1(const ThetaSystem& ts,
                                     const std::vector<RationalFunction>& relation,
                                     const FormalSubvariety& v) {
  require(ts.ctx->cls() == 1, "InvalidData", "descent_depth1 needs a depth-one theta system");
  require(relation.size() == ts.lie_dim, "InvalidData", "relation arity mismatch");
  auto theta_v = restrict_theta_symbolic(ts, v);

  DependencyCertificate cert;
  cert.relation = relation;

  std::vector<RationalFunction> a;
  for (auto& f : relation) a.push_back(f.vars() == v.params ? f : f.with_vars(v.params));

  auto verify = [&](const std::vector<RationalFunction>& coeffs) {
    std::vector<RationalFunction> acc(v.params.size(), RationalFunction::constant(v.params, 0));
    for (size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i].is_zero()) continue;
      for (size_t j = 0; j < v.params.size(); ++j) acc[j] += coeffs[i] * theta_v[i][j];
    }
    for (auto& f : acc)
      if (!f.is_zero()) return false;
    return true;
  };
  require(verify(a), "NotARelation", "the coefficients do not annihilate theta on V");
  bool nonzero = false;
  for (auto& f : a) nonzero |= !f.is_zero();
  require(nonzero, "NotARelation", "the zero relation carries no information");

  int guard = static_cast<int>(ts.lie_dim) + 1;
  while (guard-- > 0) {
    // normalize: divide by the first nonzero coefficient
    size_t i0 = 0;
    while (a[i0].is_zero()) ++i0;
    if (!(a[i0].is_constant() && a[i0].constant_value() == 1)) {
      RationalFunction inv = RationalFunction::constant(v.params, 1) / a[i0];
      for (auto& f : a) f = f * inv;
    }

    if (all_constant(a)) {
      // (a) constant relation: exhibit the kernel class and its witness
      cert.kind = DependencyCertificate::Kind::ConstantRelation;
      cert.constant_coeffs = VecQ(static_cast<Eigen::Index>(a.size()));
      for (size_t i = 0; i < a.size(); ++i)
        cert.constant_coeffs(static_cast<Eigen::Index>(i)) = a[i].constant_value();
      // witness h = sum a_i t_i restricted to V with dh = pullback of sum a_i omega_i
      RationalFunction h = RationalFunction::constant(v.params, 0);
      for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero()) h += v.t_param[i] * a[i].constant_value();
      cert.exactness_witness = h;
      cert.trace.push_back("constant relation; kernel-class witness recorded");
      cert.relation = a;
      return cert;
    }

    // differentials of the nonconstant coefficients
    std::vector<std::vector<RationalFunction>> da(a.size());
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < v.params.size(); ++j) da[i].push_back(a[i].derivative(j));

    // (b) every nonzero da_i lies in the function-field theta span
    bool all_in = true;
    size_t witness = a.size();
    std::optional<RFVec> witness_lambda;
    for (size_t i = 0; i < a.size(); ++i) {
      bool dzero = true;
      for (auto& f : da[i]) dzero &= f.is_zero();
      if (dzero) continue;
      auto lam = in_function_span(theta_v, da[i]);
      if (!lam) {
        all_in = false;
        witness = i;
        break;
      }
      if (witness == a.size()) {
        witness = i;
        witness_lambda = lam;
      }
    }
    if (all_in) {
      cert.kind = DependencyCertificate::Kind::FunctionRelation;
      cert.h1 = RationalFunction::constant(v.params, 1);
      cert.h2 = a[witness];
      cert.lambda.assign(ts.lie_dim, RationalFunction::constant(v.params, 0));
      for (Eigen::Index r = 0; r < witness_lambda->size(); ++r)
        cert.lambda[static_cast<size_t>(r)] = (*witness_lambda)(r);
      cert.trace.push_back("function relation; d a_" + std::to_string(witness + 1) +
                           " lies in the theta span");
      cert.relation = a;
      return cert;
    }

    // (c) derivation annihilating the thetas but not da_{witness}
    size_t p = v.params.size();
    RFMat thetas(static_cast<Eigen::Index>(ts.lie_dim), static_cast<Eigen::Index>(p));
    for (size_t i = 0; i < ts.lie_dim; ++i)
      for (size_t j = 0; j < p; ++j)
        thetas(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = theta_v[i][j];
    RFMat kernel = linalg::kernel_basis(thetas);
    std::optional<RFVec> derivation;
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      RationalFunction pairing = RationalFunction::constant(v.params, 0);
      for (size_t j = 0; j < p; ++j) pairing += kernel(static_cast<Eigen::Index>(j), c) * da[witness][j];
      if (!pairing.is_zero()) {
        derivation = kernel.col(c);
        break;
      }
    }
    require(derivation.has_value(), "NotARelation",
            "no derivation separates the offending differential");
    size_t before = 0;
    for (auto& f : a) before += !f.is_zero();
    std::vector<RationalFunction> next;
    for (size_t i = 0; i < a.size(); ++i) {
      RationalFunction val = RationalFunction::constant(v.params, 0);
      for (size_t j = 0; j < p; ++j) val += (*derivation)(static_cast<Eigen::Index>(j)) * da[i][j];
      next.push_back(val);
    }
    size_t after = 0;
    for (auto& f : next) after += !f.is_zero();
    require(after < before, "InvalidData", "descent support did not shrink");
    require(verify(next), "InvalidData", "derived relation failed verification");
    cert.trace.push_back("derivation step: support " + std::to_string(before) + " -> " +
                         std::to_string(after));
    a = std::move(next);
  }
  fail("InvalidData", "descent did not terminate");
}

bool verify_certificate(const ThetaSystem& ts, const DependencyCertificate& cert,
                        const FormalSubvariety& v, unsigned order) {
  // the relation re-verifies at twice the detection jet order
  auto theta_series = restrict_theta(ts, v, 2 * order);
  std::vector<Rational> zero(v.params.size(), Rational(0));
  auto svars = shifted_var_names(v.params);
  SeriesOneForm acc;
  acc.comps.assign(v.params.size(), TruncSeries(svars, 2 * order));
  for (size_t i = 0; i < cert.relation.size(); ++i) {
    if (cert.relation[i].is_zero()) continue;
    TruncSeries ci = jet_expand(cert.relation[i], zero, 2 * order);
    for (size_t j = 0; j < v.params.size(); ++j)
      acc.comps[j] += ci * theta_series[i].comps[j];
  }
  if (acc.nonzero_coefficients() != 0) return false;

  if (cert.kind == DependencyCertificate::Kind::ConstantRelation) {
    // dh = pullback of sum a_i omega_i
    std::vector<RationalFunction> args;
    for (auto& f : v.t_param) args.push_back(f);
    for (auto& f : v.z_param) args.push_back(f);
    auto dargs = param_differentials(args, v.params);
    for (size_t j = 0; j < v.params.size(); ++j) {
      RationalFunction pullback_j = RationalFunction::constant(v.params, 0);
      for (size_t i = 0; i < ts.lie_dim; ++i) {
        Rational ai = cert.constant_coeffs(static_cast<Eigen::Index>(i));
        if (ai == 0) continue;
        for (size_t comp = 0; comp < ts.omega[i].c.size(); ++comp) {
          if (ts.omega[i].c[comp].is_zero()) continue;
          RationalFunction num = ts.omega[i].c[comp].num().eval_rational(args);
          RationalFunction den = ts.omega[i].c[comp].den().eval_rational(args);
          pullback_j += (num / den) * dargs[comp][j] * ai;
        }
      }
      if (!(cert.exactness_witness.derivative(j) == pullback_j)) return false;
    }
    return !cert.constant_coeffs.isZero();
  }
  if (cert.kind == DependencyCertificate::Kind::FunctionRelation) {
    // h1 dh2 nonzero, and dh2 = sum lambda_j theta_j on V
    if (cert.h2.is_constant()) return false;
    auto theta_v = restrict_theta_symbolic(ts, v);
    for (size_t j = 0; j < v.params.size(); ++j) {
      RationalFunction rhs = RationalFunction::constant(v.params, 0);
      for (size_t i = 0; i < ts.lie_dim; ++i)
        if (!cert.lambda[i].is_zero()) rhs += cert.lambda[i] * theta_v[i][j];
      if (!(cert.h2.derivative(j) == rhs)) return false;
    }
    return true;
  }
  return true;
}

LocusResult colinearity_locus(const DifferentialForm& a, const DifferentialForm& b) {
  forms::CoordOneForm ca = a.coords_one();
  forms::CoordOneForm cb = b.coords_one();
  LocusResult out;
  std::vector<Polynomial> gens;
  bool any_nonzero_minor = false;
  for (size_t i = 0; i < ca.c.size(); ++i)
    for (size_t j = i + 1; j < ca.c.size(); ++j) {
      RationalFunction minor = ca.c[i] * cb.c[j] - ca.c[j] * cb.c[i];
      if (minor.is_zero()) continue;
      any_nonzero_minor = true;
      Polynomial num = minor.num();
      Rational content = num.content();
      if (content != 0 && content != 1) num *= 1 / content;
      bool dup = false;
      for (auto& g : gens) dup |= (g == num);
      if (!dup) gens.push_back(num);
    }
  // one-variable charts: a single component, every pair colinear
  if (ca.c.size() < 2) {
    out.kind = LocusResult::Kind::ZeroIdeal;
    return out;
  }
  if (!any_nonzero_minor) {
    out.kind = LocusResult::Kind::ZeroIdeal;
    return out;
  }
  for (auto& g : gens)
    if (g.is_constant()) {
      out.kind = LocusResult::Kind::UnitIdeal;
      return out;
    }
  out.kind = LocusResult::Kind::Proper;
  out.generators = std::move(gens);
  return out;
}

UnlikelyReport unlikely_report(const conn::ReducedConnection& universal,
                               const FormalSubvariety& v, unsigned order) {
  UnlikelyReport report;
  auto ts = transport::compute_theta(universal);
  report.chart_dim = static_cast<int>(universal.lambda.space->vars().size());
  report.ambient_dim = static_cast<int>(ts.lie_dim) + report.chart_dim;
  report.v_dim = static_cast<int>(v.dim());
  report.v_codim = report.ambient_dim - report.v_dim;
  report.theta_count = static_cast<long long>(ts.lie_dim);

  if (v.dim() == 0) {
    report.degenerate = true;
    return report;
  }
  v.validate();

  auto restricted = restrict_theta(ts, v, order);
  auto jr = jet_rank(restricted, order);
  report.theta_rank = jr.rank;
  report.relations = jr.relations;
  report.rank_deficient = jr.rank < static_cast<long long>(ts.lie_dim);

  // W candidate: zero locus of t_i - J_i along V, dimension via the jets of
  // the differentials.
  auto h = transport::solve_j(universal, v.base_z(), order);
  auto tser = v.t_series(order);
  auto zser = v.z_series(order);
  auto base = v.base_z();
  // substitute chart shifts into J
  std::vector<TruncSeries> shift_args;
  for (size_t a = 0; a < zser.size(); ++a)
    shift_args.push_back(zser[a] - TruncSeries(zser[a].vars(), order, base[a]));
  std::vector<SeriesOneForm> dg;
  for (size_t i = 0; i < ts.lie_dim; ++i) {
    TruncSeries gi = tser[i];
    auto it = h.j.coords.find(static_cast<int>(i));
    if (it != h.j.coords.end()) gi -= it->second.substitute(shift_args);
    SeriesOneForm f;
    for (size_t j = 0; j < v.params.size(); ++j) f.comps.push_back(gi.derivative(j));
    dg.push_back(std::move(f));
  }
  auto gr = jet_rank(dg, order - 1);
  report.w_dim = static_cast<long long>(v.dim()) - gr.rank;
  report.w_codim_in_graph = report.chart_dim - report.w_dim;
  report.unlikely = report.w_codim_in_graph < report.v_codim;

  if (report.rank_deficient && universal.depth == 1) {
    for (Eigen::Index r = 0; r < report.relations.rows(); ++r) {
      std::vector<RationalFunction> rel;
      for (Eigen::Index i = 0; i < report.relations.cols(); ++i)
        rel.push_back(RationalFunction::constant(v.params, report.relations(r, i)));
      report.certificates.push_back(descent_depth1(ts, rel, v));
    }
  }
  return report;
}

}  // namespace kim::intersect
