#include "kim/connection.hpp"

#include <algorithm>

#include "kim/error.hpp"
#include "kim/uea.hpp"

namespace kim::conn {

int FormMatrix::dim() const {
  int n = 0;
  for (int d : block_dims) n += d;
  return n;
}

int FormMatrix::block_of(int index) const {
  int acc = 0;
  for (size_t b = 0; b < block_dims.size(); ++b) {
    acc += block_dims[b];
    if (index < acc) return static_cast<int>(b);
  }
  fail("InvalidData", "index outside the block structure");
}

int FormMatrix::block_start(int block) const {
  int acc = 0;
  for (int b = 0; b < block; ++b) acc += block_dims[static_cast<size_t>(b)];
  return acc;
}

FormMatrix FormMatrix::zero(FormSpacePtr space, std::vector<int> block_dims) {
  FormMatrix m;
  m.space = space;
  m.block_dims = std::move(block_dims);
  int n = m.dim();
  m.entries.assign(static_cast<size_t>(n),
                   std::vector<DifferentialForm>(static_cast<size_t>(n),
                                                 DifferentialForm::zero(space, 1)));
  return m;
}

bool FormMatrix::strictly_block_lower() const {
  int n = dim();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (block_of(r) <= block_of(c) &&
          !entries[static_cast<size_t>(r)][static_cast<size_t>(c)].is_zero())
        return false;
  return true;
}

GaugeTransform GaugeTransform::identity(const std::vector<std::string>& vars,
                                        std::vector<int> block_dims) {
  GaugeTransform g;
  g.block_dims = std::move(block_dims);
  int n = 0;
  for (int d : g.block_dims) n += d;
  g.m.assign(static_cast<size_t>(n),
             std::vector<RationalFunction>(static_cast<size_t>(n),
                                           RationalFunction::constant(vars, 0)));
  return g;
}

bool GaugeTransform::is_identity() const {
  for (auto& row : m)
    for (auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

std::vector<MatQ> build_s_chain(const FormSpacePtr& space, const MatQ& s1_rows, int depth) {
  require(depth >= 1, "InvalidData", "depth must be at least 1");
  size_t n1 = space->n1();
  require(static_cast<size_t>(s1_rows.cols()) == n1, "InvalidData", "S_1 arity mismatch");

  // Every d-image must live in the declared span for the recursion to work.
  for (size_t i = 0; i < n1; ++i)
    require(space->d_image(i).has_value(), "NotClosedUnderD",
            "derivative of atom '" + space->one_atom(i).name +
                "' is not expressible in the declared two-form span");

  MatQ d_matrix(static_cast<Eigen::Index>(space->n2()), static_cast<Eigen::Index>(n1));
  d_matrix.setConstant(Rational(0));
  for (size_t i = 0; i < n1; ++i) d_matrix.col(static_cast<Eigen::Index>(i)) = *space->d_image(i);

  // S_1 rows must be closed.
  for (Eigen::Index r = 0; r < s1_rows.rows(); ++r) {
    VecQ dv = d_matrix * s1_rows.row(r).transpose();
    require(dv.isZero(), "InvalidData", "S_1 must consist of closed forms");
  }

  std::vector<MatQ> chain;
  chain.push_back(s1_rows);
  MatQ exact = space->exact_atom_rows();

  for (int i = 2; i <= depth; ++i) {
    // wedge span of S_j (x) S_k over j + k = i
    std::vector<RowQ> wedge_rows;
    for (int j = 1; j < i; ++j) {
      int k = i - j;
      const MatQ& sj = chain[static_cast<size_t>(j - 1)];
      const MatQ& sk = chain[static_cast<size_t>(k - 1)];
      for (Eigen::Index a = 0; a < sj.rows(); ++a)
        for (Eigen::Index b = 0; b < sk.rows(); ++b) {
          RowQ w = RowQ::Constant(1, static_cast<Eigen::Index>(space->n2()), Rational(0));
          for (size_t p = 0; p < n1; ++p) {
            if (sj(a, static_cast<Eigen::Index>(p)) == 0) continue;
            for (size_t q = 0; q < n1; ++q) {
              if (sk(b, static_cast<Eigen::Index>(q)) == 0) continue;
              auto img = space->wedge_image(p, q);
              require(img.has_value(), "NotClosedUnderD",
                      "wedge of atoms '" + space->one_atom(p).name + "' and '" +
                          space->one_atom(q).name + "' is not in the declared span");
              w += (sj(a, static_cast<Eigen::Index>(p)) * sk(b, static_cast<Eigen::Index>(q))) *
                   img->transpose();
            }
          }
          wedge_rows.push_back(w);
        }
    }
    MatQ wedge_span(static_cast<Eigen::Index>(wedge_rows.size()),
                    static_cast<Eigen::Index>(space->n2()));
    for (size_t r = 0; r < wedge_rows.size(); ++r)
      wedge_span.row(static_cast<Eigen::Index>(r)) = wedge_rows[r];

    // d^{-1}(wedge span): kernel of [d | -W^T] projected to the atom part.
    MatQ sys(static_cast<Eigen::Index>(space->n2()),
             static_cast<Eigen::Index>(n1) + wedge_span.rows());
    sys.leftCols(static_cast<Eigen::Index>(n1)) = d_matrix;
    sys.rightCols(wedge_span.rows()) = -wedge_span.transpose();
    MatQ ker = linalg::kernel_basis(sys);
    MatQ u(ker.cols(), static_cast<Eigen::Index>(n1));
    for (Eigen::Index c = 0; c < ker.cols(); ++c)
      u.row(c) = ker.col(c).head(static_cast<Eigen::Index>(n1)).transpose();

    // Exact part inside U_i, then the echelon complement.
    // intersection of row spaces: pairs (a, b) with a^T U = b^T E
    MatQ inter;
    {
      MatQ stacked(u.rows() + exact.rows(), u.cols());
      if (u.rows() > 0) stacked.topRows(u.rows()) = u;
      if (exact.rows() > 0) stacked.bottomRows(exact.rows()) = exact;
      // x in both row spaces <=> x = a^T u and stacked rank arguments; compute by
      // kernel of [u^T  -exact^T]
      MatQ sys2(static_cast<Eigen::Index>(n1), u.rows() + exact.rows());
      if (u.rows() > 0) sys2.leftCols(u.rows()) = u.transpose();
      if (exact.rows() > 0) sys2.rightCols(exact.rows()) = -exact.transpose();
      MatQ k2 = linalg::kernel_basis(sys2);
      inter = MatQ(k2.cols(), static_cast<Eigen::Index>(n1));
      for (Eigen::Index c = 0; c < k2.cols(); ++c)
        inter.row(c) = (u.transpose() * k2.col(c).head(u.rows())).transpose();
    }
    chain.push_back(linalg::complement_rows(inter, u));
  }
  return chain;
}

std::vector<std::vector<DifferentialForm>> flatness_residual(const FormMatrix& lambda) {
  int n = lambda.dim();
  std::vector<std::vector<DifferentialForm>> res(
      static_cast<size_t>(n), std::vector<DifferentialForm>(
                                  static_cast<size_t>(n),
                                  DifferentialForm::zero(lambda.space, 2)));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      DifferentialForm acc = forms::d(lambda.entries[static_cast<size_t>(r)][static_cast<size_t>(c)]);
      for (int k = 0; k < n; ++k) {
        const auto& a = lambda.entries[static_cast<size_t>(r)][static_cast<size_t>(k)];
        const auto& b = lambda.entries[static_cast<size_t>(k)][static_cast<size_t>(c)];
        if (a.is_zero() || b.is_zero()) continue;
        acc = acc + forms::wedge(a, b);
      }
      res[static_cast<size_t>(r)][static_cast<size_t>(c)] = acc;
    }
  return res;
}

bool is_flat(const FormMatrix& lambda) {
  auto res = flatness_residual(lambda);
  for (auto& row : res)
    for (auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

size_t residual_entry_count(const std::vector<std::vector<DifferentialForm>>& residual) {
  size_t n = 0;
  for (auto& row : residual)
    for (auto& e : row)
      if (!e.is_zero()) ++n;
  return n;
}

namespace {

// (1+M)^{-1} = 1 - M + M^2 - ... ; M is nilpotent.
std::vector<std::vector<RationalFunction>> unipotent_inverse(
    const std::vector<std::vector<RationalFunction>>& m, const std::vector<std::string>& vars) {
  size_t n = m.size();
  auto mat_mul = [&](const std::vector<std::vector<RationalFunction>>& a,
                     const std::vector<std::vector<RationalFunction>>& b) {
    std::vector<std::vector<RationalFunction>> out(
        n, std::vector<RationalFunction>(n, RationalFunction::constant(vars, 0)));
    for (size_t r = 0; r < n; ++r)
      for (size_t k = 0; k < n; ++k) {
        if (a[r][k].is_zero()) continue;
        for (size_t c = 0; c < n; ++c) {
          if (b[k][c].is_zero()) continue;
          out[r][c] += a[r][k] * b[k][c];
        }
      }
    return out;
  };
  std::vector<std::vector<RationalFunction>> inv(
      n, std::vector<RationalFunction>(n, RationalFunction::constant(vars, 0)));
  for (size_t i = 0; i < n; ++i) inv[i][i] = RationalFunction::constant(vars, 1);
  std::vector<std::vector<RationalFunction>> power = m;
  int sign = -1;
  for (size_t k = 1; k <= n; ++k) {
    bool zero = true;
    for (auto& row : power)
      for (auto& e : row) zero &= e.is_zero();
    if (zero) break;
    for (size_t r = 0; r < n; ++r)
      for (size_t c = 0; c < n; ++c)
        inv[r][c] += power[r][c] * Rational(sign);
    power = mat_mul(power, m);
    sign = -sign;
  }
  return inv;
}

}  // namespace

FormMatrix apply_gauge(const GaugeTransform& g, const FormMatrix& lambda) {
  require(g.block_dims == lambda.block_dims, "SpecMismatch", "gauge block structure mismatch");
  const auto& vars = lambda.space->vars();
  size_t n = static_cast<size_t>(lambda.dim());
  auto inv = unipotent_inverse(g.m, vars);
  // full matrices: G = 1 + M, Ginv = inv
  auto gm = g.m;
  for (size_t i = 0; i < n; ++i) gm[i][i] += RationalFunction::constant(vars, 1);

  // A = G * Lambda  (0-form times 1-form entries)
  FormMatrix a = FormMatrix::zero(lambda.space, lambda.block_dims);
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) {
      DifferentialForm acc = DifferentialForm::zero(lambda.space, 1);
      for (size_t k = 0; k < n; ++k) {
        if (gm[r][k].is_zero() || lambda.entries[k][c].is_zero()) continue;
        acc = acc + lambda.entries[k][c].scaled(gm[r][k]);
      }
      a.entries[r][c] = acc;
    }
  // B = A * Ginv - dG * Ginv
  FormMatrix out = FormMatrix::zero(lambda.space, lambda.block_dims);
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) {
      DifferentialForm acc = DifferentialForm::zero(lambda.space, 1);
      for (size_t k = 0; k < n; ++k) {
        if (!a.entries[r][k].is_zero() && !inv[k][c].is_zero())
          acc = acc + a.entries[r][k].scaled(inv[k][c]);
        if (!g.m[r][k].is_zero() && !inv[k][c].is_zero()) {
          DifferentialForm dm = forms::d(DifferentialForm::function(lambda.space, g.m[r][k]));
          acc = acc - dm.scaled(inv[k][c]);
        }
      }
      out.entries[r][c] = acc;
    }
  return out;
}

GaugeTransform compose(const GaugeTransform& g2, const GaugeTransform& g1) {
  require(g2.block_dims == g1.block_dims, "SpecMismatch", "gauge block structure mismatch");
  size_t n = g1.m.size();
  GaugeTransform out = g1;
  // (1+M2)(1+M1) = 1 + M1 + M2 + M2 M1
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) {
      out.m[r][c] += g2.m[r][c];
      for (size_t k = 0; k < n; ++k)
        if (!g2.m[r][k].is_zero() && !g1.m[k][c].is_zero()) out.m[r][c] += g2.m[r][k] * g1.m[k][c];
    }
  return out;
}

namespace {

// Q-linear solve: target = sum_k c_k basis_k as coordinate one-forms, by
// clearing denominators per slot and matching monomial coefficients.
std::optional<VecQ> solve_q_combination(const std::vector<std::string>& vars,
                                        const std::vector<forms::CoordOneForm>& basis,
                                        const forms::CoordOneForm& target) {
  std::vector<RowQ> rows;
  std::vector<Rational> rhs;
  for (size_t slot = 0; slot < vars.size(); ++slot) {
    Polynomial den = Polynomial::constant(vars, 1);
    for (auto& b : basis) den = den * b.c[slot].den();
    den = den * target.c[slot].den();
    std::vector<Polynomial> nums;
    for (auto& b : basis) {
      Polynomial q(vars);
      require(den.divide_exact(b.c[slot].den(), q), "InvalidData", "denominator bookkeeping");
      nums.push_back(b.c[slot].num() * q);
    }
    Polynomial qt(vars);
    require(den.divide_exact(target.c[slot].den(), qt), "InvalidData", "denominator bookkeeping");
    Polynomial tnum = target.c[slot].num() * qt;
    std::map<Exps, size_t> mono;
    for (auto& p : nums)
      for (auto& [e, c] : p.terms()) mono.emplace(e, 0);
    for (auto& [e, c] : tnum.terms()) mono.emplace(e, 0);
    size_t mi = 0;
    for (auto& [e, idx] : mono) idx = mi++;
    size_t base_row = rows.size();
    rows.resize(base_row + mono.size(),
                RowQ::Constant(1, static_cast<Eigen::Index>(basis.size()), Rational(0)));
    rhs.resize(base_row + mono.size(), Rational(0));
    for (size_t k = 0; k < nums.size(); ++k)
      for (auto& [e, c] : nums[k].terms())
        rows[base_row + mono[e]](static_cast<Eigen::Index>(k)) = c;
    for (auto& [e, c] : tnum.terms()) rhs[base_row + mono[e]] = c;
  }
  MatQ a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(basis.size()));
  VecQ b(static_cast<Eigen::Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = rows[r];
    b(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  return linalg::solve(a, b);
}

std::vector<forms::CoordOneForm> s_row_coords(const FormSpacePtr& space, const MatQ& s_rows) {
  const auto& vars = space->vars();
  std::vector<forms::CoordOneForm> out;
  for (Eigen::Index r = 0; r < s_rows.rows(); ++r) {
    std::vector<RationalFunction> coeffs(space->n1(), RationalFunction::constant(vars, 0));
    for (size_t i = 0; i < space->n1(); ++i)
      coeffs[i] = RationalFunction::constant(vars, s_rows(r, static_cast<Eigen::Index>(i)));
    out.push_back(DifferentialForm::one_form(space, coeffs).coords_one());
  }
  return out;
}

// Membership of a one-form in the Q-span of S rows, up to representation.
std::optional<VecQ> s_membership(const FormSpacePtr& space, const DifferentialForm& eta,
                                 const MatQ& s_rows) {
  auto basis = s_row_coords(space, s_rows);
  auto sol = solve_q_combination(space->vars(), basis, eta.coords_one());
  if (!sol) return std::nullopt;
  VecQ sigma(static_cast<Eigen::Index>(space->n1()));
  sigma.setConstant(Rational(0));
  for (Eigen::Index r = 0; r < s_rows.rows(); ++r) sigma += (*sol)(r)*s_rows.row(r).transpose();
  return sigma;
}

}  // namespace

std::vector<bool> certify_blocks(const FormMatrix& lambda, const std::vector<MatQ>& s_chain) {
  int blocks = static_cast<int>(lambda.block_dims.size());
  std::vector<bool> cert(static_cast<size_t>(blocks), true);
  for (int r = 0; r < lambda.dim(); ++r)
    for (int c = 0; c < lambda.dim(); ++c) {
      const auto& e = lambda.entries[static_cast<size_t>(r)][static_cast<size_t>(c)];
      if (e.is_zero()) continue;
      int nil = lambda.block_of(r) - lambda.block_of(c);
      bool ok = nil >= 1 && nil <= static_cast<int>(s_chain.size()) &&
                s_membership(lambda.space, e, s_chain[static_cast<size_t>(nil - 1)]).has_value();
      if (!ok && nil >= 1 && nil <= blocks) cert[static_cast<size_t>(nil)] = false;
    }
  return cert;
}

namespace {

// Candidate 0-forms f for solving eta = sigma + df: atom primitives, monomials
// up to one past the polynomial degrees seen in eta, and inverse powers of the
// chart's puncture factors up to one below the pole orders seen in eta.
std::vector<RationalFunction> candidate_functions(const FormSpacePtr& space,
                                                  const DifferentialForm& eta) {
  const auto& vars = space->vars();
  std::vector<RationalFunction> out;
  for (size_t i = 0; i < space->n1(); ++i)
    if (space->one_atom(i).primitive) out.push_back(*space->one_atom(i).primitive);

  forms::CoordOneForm coords = eta.coords_one();
  uint32_t maxdeg = 0;
  for (auto& f : coords.c) maxdeg = std::max(maxdeg, f.num().degree());
  auto mono_exps = [&](unsigned total) {
    std::vector<Exps> acc;
    Exps cur(vars.size(), 0);
    std::function<void(size_t, unsigned)> rec = [&](size_t v, unsigned left) {
      if (v + 1 == vars.size()) {
        cur[v] = left;
        acc.push_back(cur);
        return;
      }
      for (unsigned k = 0; k <= left; ++k) {
        cur[v] = k;
        rec(v + 1, left - k);
      }
    };
    rec(0, total);
    return acc;
  };
  for (unsigned t = 1; t <= maxdeg + 1; ++t)
    for (auto& e : mono_exps(t)) {
      Polynomial p(vars);
      p.set_term(e, 1);
      out.push_back(RationalFunction(p));
    }

  // inverse powers of puncture factors present in denominators
  for (size_t f = 0; f < space->chart().factors.size(); ++f)
    for (auto& p : space->chart().factors[f].punctures) {
      Polynomial lin = Polynomial::variable(vars, f) - Polynomial::constant(vars, p);
      unsigned max_power = 0;
      for (auto& c : coords.c) {
        Polynomial den = c.den();
        unsigned k = 0;
        Polynomial q(vars);
        while (den.divide_exact(lin, q)) {
          den = q;
          ++k;
        }
        max_power = std::max(max_power, k);
      }
      for (unsigned k = 1; k + 1 <= max_power; ++k) {
        Polynomial den = Polynomial::constant(vars, 1);
        for (unsigned e = 0; e < k; ++e) den = den * lin;
        out.push_back(RationalFunction(Polynomial::constant(vars, 1), den));
      }
    }
  return out;
}

// Solves eta = sum_s q_s S_row_s + sum_u c_u d(cand_u) over Q by polynomial
// coefficient matching in coordinates. Returns (sigma as Q-atom vector, f).
std::optional<std::pair<VecQ, RationalFunction>> solve_block_entry(
    const FormSpacePtr& space, const DifferentialForm& eta, const MatQ& s_rows) {
  const auto& vars = space->vars();
  auto cands = candidate_functions(space, eta);

  std::vector<forms::CoordOneForm> basis = s_row_coords(space, s_rows);
  for (auto& f : cands)
    basis.push_back(forms::d(DifferentialForm::function(space, f)).coords_one());

  auto sol = solve_q_combination(vars, basis, eta.coords_one());
  if (!sol) return std::nullopt;
  VecQ sigma(static_cast<Eigen::Index>(space->n1()));
  sigma.setConstant(Rational(0));
  for (Eigen::Index r = 0; r < s_rows.rows(); ++r) sigma += (*sol)(r)*s_rows.row(r).transpose();
  RationalFunction f = RationalFunction::constant(vars, 0);
  for (size_t u = 0; u < cands.size(); ++u) {
    Rational c = (*sol)(s_rows.rows() + static_cast<Eigen::Index>(u));
    if (c != 0) f += cands[u] * c;
  }
  return std::make_pair(sigma, f);
}

}  // namespace

std::pair<ReducedConnection, GaugeTransform> reduce_to_reduced_form(
    const FormMatrix& lambda, const std::vector<MatQ>& s_chain) {
  require(lambda.strictly_block_lower(), "InvalidData",
          "connection matrix must be strictly block lower triangular");
  require(is_flat(lambda), "NotFlat", "connection is not flat");
  const auto& vars = lambda.space->vars();
  int blocks = static_cast<int>(lambda.block_dims.size());
  require(static_cast<int>(s_chain.size()) >= blocks - 1, "InvalidData", "S chain too short");

  FormMatrix cur = lambda;
  GaugeTransform total = GaugeTransform::identity(vars, lambda.block_dims);

  for (int r = 1; r < blocks; ++r) {
    for (int c = r - 1; c >= 0; --c) {
      int nil = r - c;
      const MatQ& s = s_chain[static_cast<size_t>(nil - 1)];
      GaugeTransform step = GaugeTransform::identity(vars, lambda.block_dims);
      bool any = false;
      for (int a = 0; a < lambda.block_dims[static_cast<size_t>(r)]; ++a)
        for (int b = 0; b < lambda.block_dims[static_cast<size_t>(c)]; ++b) {
          int row = lambda.block_start(r) + a;
          int col = lambda.block_start(c) + b;
          const DifferentialForm& eta = cur.entries[static_cast<size_t>(row)][static_cast<size_t>(col)];
          if (s_membership(lambda.space, eta, s).has_value()) continue;  // already reduced
          auto sol = solve_block_entry(lambda.space, eta, s);
          require(sol.has_value(), "NotReducible",
                  "no d-preimage in the declared span for block (" + std::to_string(r) + "," +
                      std::to_string(c) + ")");
          if (!sol->second.is_zero()) {
            step.m[static_cast<size_t>(row)][static_cast<size_t>(col)] = sol->second;
            any = true;
          }
        }
      if (any) {
        cur = apply_gauge(step, cur);
        total = compose(step, total);
      }
    }
  }

  // Canonicalize: every block entry must now be a Q-combination of its S_l
  // basis; store that representation.
  for (int row = 0; row < cur.dim(); ++row)
    for (int col = 0; col < cur.dim(); ++col) {
      auto& e = cur.entries[static_cast<size_t>(row)][static_cast<size_t>(col)];
      if (e.is_zero()) continue;
      int nil = cur.block_of(row) - cur.block_of(col);
      require(nil >= 1 && nil <= static_cast<int>(s_chain.size()), "NotReducible",
              "entry outside the nilpotent band");
      auto sigma = s_membership(lambda.space, e, s_chain[static_cast<size_t>(nil - 1)]);
      require(sigma.has_value(), "NotReducible",
              "block entries escaped S_" + std::to_string(nil) + " after reduction");
      DifferentialForm canon = DifferentialForm::from_q_vector(lambda.space, *sigma, 1);
      require((canon - e).is_zero(), "InvalidData", "canonicalization changed the entry");
      e = canon;
    }

  ReducedConnection out;
  out.lambda = cur;
  out.s_chain = s_chain;
  auto cert = certify_blocks(cur, s_chain);
  out.certified.assign(cert.begin() + 1, cert.end());
  return {out, total};
}

lie::LieAlgebraSpec chart_lie_spec(const Chart& chart, int depth) {
  std::vector<int> gens_per_factor;
  int total = 0;
  for (size_t f = 0; f < chart.factors.size(); ++f) {
    gens_per_factor.push_back(static_cast<int>(chart.factors[f].punctures.size()));
    total += gens_per_factor.back();
  }
  lie::LieAlgebraSpec spec = lie::LieAlgebraSpec::free_nilpotent(total, depth);
  int base_a = 0;
  for (size_t fa = 0; fa < chart.factors.size(); ++fa) {
    int base_b = base_a + gens_per_factor[fa];
    for (size_t fb = fa + 1; fb < chart.factors.size(); ++fb) {
      for (int i = 0; i < gens_per_factor[fa]; ++i)
        for (int j = 0; j < gens_per_factor[static_cast<size_t>(fb)]; ++j)
          spec.custom_ideal.push_back("[x" + std::to_string(base_a + i + 1) + ",x" +
                                      std::to_string(base_b + j + 1) + "]");
      base_b += gens_per_factor[static_cast<size_t>(fb)];
    }
    base_a += gens_per_factor[fa];
  }
  return spec;
}

ReducedConnection build_universal(const Chart& chart, int depth) {
  require(depth >= 1, "InvalidData", "depth must be at least 1");
  if (depth >= 2)
    for (size_t f = 0; f < chart.factors.size(); ++f)
      require(chart.puncture_count(f) >= 3, "UnsupportedChart",
              "factor " + std::to_string(f + 1) +
                  " is not hyperbolic (fewer than 3 punctures); depth must be 1");

  auto space = forms::FormSpace::for_chart(chart);
  auto ctx = lie::LieContext::make(chart_lie_spec(chart, depth));
  require(static_cast<size_t>(ctx->gens()) == space->n1(), "InvalidData",
          "generator/atom mismatch");

  // Block structure: reduced words of each length.
  std::vector<int> block_dims;
  for (int l = 0; l <= depth; ++l)
    block_dims.push_back(static_cast<int>(ctx->reduced_words(static_cast<size_t>(l)).size()));

  FormMatrix lambda = FormMatrix::zero(space, block_dims);
  // Lambda = -Lmult(omega): left concatenation with generator g carries the
  // one-form -omega_g.
  for (int l = 0; l < depth; ++l) {
    const auto& cols = ctx->reduced_words(static_cast<size_t>(l));
    const auto& rows = ctx->reduced_words(static_cast<size_t>(l) + 1);
    std::map<size_t, int> row_index;
    for (size_t r = 0; r < rows.size(); ++r) row_index[rows[r]] = static_cast<int>(r);
    for (size_t cidx = 0; cidx < cols.size(); ++cidx) {
      for (int g = 0; g < ctx->gens(); ++g) {
        // word e_g * w, reduced
        lie::WordVec v{{static_cast<size_t>(g) * ctx->word_count(static_cast<size_t>(l)) +
                            cols[cidx],
                        Rational(1)}};
        ctx->reduce_words(static_cast<size_t>(l) + 1, v);
        for (auto& [code, coeff] : v) {
          int row = lambda.block_start(l + 1) + row_index.at(code);
          int col = lambda.block_start(l) + static_cast<int>(cidx);
          auto& entry = lambda.entries[static_cast<size_t>(row)][static_cast<size_t>(col)];
          entry = entry + DifferentialForm::atom(space, static_cast<size_t>(g))
                              .scaled(RationalFunction::constant(space->vars(), -coeff));
        }
      }
    }
  }

  MatQ s1 = MatQ::Identity(static_cast<Eigen::Index>(space->n1()),
                           static_cast<Eigen::Index>(space->n1()));
  ReducedConnection out;
  out.lambda = std::move(lambda);
  out.s_chain = build_s_chain(space, s1, depth);
  auto cert = certify_blocks(out.lambda, out.s_chain);
  out.certified.assign(cert.begin() + 1, cert.end());
  out.fiber = ctx;
  out.depth = depth;
  out.omega.assign(static_cast<size_t>(ctx->dim()), DifferentialForm::zero(space, 1));
  for (int g = 0; g < ctx->gens(); ++g)
    out.omega[static_cast<size_t>(g)] = DifferentialForm::atom(space, static_cast<size_t>(g));
  return out;
}

}  // namespace kim::conn
