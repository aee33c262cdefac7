#include "kim/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kim/error.hpp"

namespace kim::io {

std::string digest_hex(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "InvalidData", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RationalFunction parse_ratfun(const std::vector<std::string>& vars, const std::string& text) {
  // "(num) / (den)" with the outer parentheses exactly as emitted, else a
  // plain polynomial
  auto strip = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };
  std::string t = strip(text);
  if (!t.empty() && t.front() == '(') {
    // find the matching close of the first group
    int depth = 0;
    size_t close = std::string::npos;
    for (size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '(') ++depth;
      if (t[i] == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
    require(close != std::string::npos, "InvalidData", "unbalanced parentheses in '" + text + "'");
    std::string rest = strip(t.substr(close + 1));
    if (!rest.empty() && rest.front() == '/') {
      std::string den = strip(rest.substr(1));
      require(den.size() >= 2 && den.front() == '(' && den.back() == ')', "InvalidData",
              "expected '(den)' in '" + text + "'");
      return RationalFunction(parse_polynomial(vars, t.substr(1, close - 1)),
                              parse_polynomial(vars, den.substr(1, den.size() - 2)));
    }
    if (rest.empty()) return RationalFunction(parse_polynomial(vars, t.substr(1, close - 1)));
  }
  return RationalFunction(parse_polynomial(vars, t));
}

lie::LieAlgebraSpec lie_spec_from_json(const json& j) {
  lie::LieAlgebraSpec spec;
  spec.gens = j.at("generators").get<int>();
  spec.cls = j.at("class").get<int>();
  if (j.contains("quotient")) {
    const json& q = j.at("quotient");
    if (q.is_string()) {
      std::string s = q.get<std::string>();
      if (s == "metabelian")
        spec.metabelian = true;
      else
        require(s == "free", "InvalidData", "unknown quotient '" + s + "'");
    } else {
      if (q.contains("surface")) spec.surface_genus = q.at("surface").get<int>();
      if (q.contains("metabelian")) spec.metabelian = q.at("metabelian").get<bool>();
      if (q.contains("ideal"))
        for (auto& g : q.at("ideal")) spec.custom_ideal.push_back(g.get<std::string>());
    }
  }
  if (j.contains("involution")) {
    lie::Involution inv;
    for (auto& v : j.at("involution")) {
      long long image = v.get<long long>();
      require(image != 0, "InvalidData", "involution images are signed 1-based indices");
      inv.images.emplace_back(static_cast<int>(std::abs(image)) - 1, image > 0 ? 1 : -1);
    }
    spec.involution = inv;
  }
  return spec;
}

json lie_spec_to_json(const lie::LieAlgebraSpec& spec) {
  json j;
  j["generators"] = spec.gens;
  j["class"] = spec.cls;
  if (spec.surface_genus || !spec.custom_ideal.empty()) {
    json q = json::object();
    if (spec.surface_genus) q["surface"] = *spec.surface_genus;
    if (spec.metabelian) q["metabelian"] = true;
    if (!spec.custom_ideal.empty()) q["ideal"] = spec.custom_ideal;
    j["quotient"] = q;
  } else {
    j["quotient"] = spec.metabelian ? "metabelian" : "free";
  }
  if (spec.involution) {
    json inv = json::array();
    for (auto& [g, s] : spec.involution->images) inv.push_back((g + 1) * s);
    j["involution"] = inv;
  }
  return j;
}

criteria::CurveData curve_from_json(const json& j) {
  criteria::CurveData c;
  c.label = j.value("label", "");
  c.genus = j.at("genus").get<long long>();
  c.degree = j.at("degree").get<long long>();
  c.r1 = j.at("r1").get<long long>();
  c.r2 = j.at("r2").get<long long>();
  c.mw_rank = j.value("mw_rank", 0LL);
  c.h1f = j.value("h1f", -1LL);
  c.ns_rank = j.value("ns_rank", 1LL);
  c.hom_vanishing = j.value("hom_vanishing", false);
  c.jk_padic_dense = j.value("jk_padic_dense", false);
  if (j.contains("covers"))
    for (auto& cj : j.at("covers")) {
      criteria::CoverRecord cov;
      cov.label = cj.value("label", "");
      cov.subfield_degree = cj.value("subfield_degree", 1LL);
      cov.quotient_genus = cj.value("quotient_genus", 0LL);
      cov.quotient_rank = cj.value("quotient_rank", -1LL);
      cov.prym_rank = cj.value("prym_rank", -1LL);
      cov.quotient_padic_dense = cj.value("quotient_padic_dense", false);
      cov.prym_padic_dense = cj.value("prym_padic_dense", false);
      c.covers.push_back(cov);
    }
  if (j.contains("models"))
    for (auto& mj : j.at("models")) {
      criteria::ModelRecord m;
      m.label = mj.value("label", "");
      m.field_degree = mj.at("field_degree").get<long long>();
      m.genus = mj.at("genus").get<long long>();
      m.rank = mj.at("rank").get<long long>();
      c.models.push_back(m);
    }
  if (j.contains("annotations"))
    for (auto& [k, v] : j.at("annotations").items()) c.annotations[k] = v.get<std::string>();
  c.validate();
  return c;
}

json curve_to_json(const criteria::CurveData& c) {
  json j;
  j["label"] = c.label;
  j["genus"] = c.genus;
  j["degree"] = c.degree;
  j["r1"] = c.r1;
  j["r2"] = c.r2;
  j["mw_rank"] = c.mw_rank;
  if (c.h1f >= 0) j["h1f"] = c.h1f;
  j["ns_rank"] = c.ns_rank;
  j["hom_vanishing"] = c.hom_vanishing;
  j["jk_padic_dense"] = c.jk_padic_dense;
  return j;
}

cohom::RepDescriptor rep_from_json(const json& j) {
  cohom::RepDescriptor r;
  r.label = j.value("label", "");
  r.dimension = j.at("dimension").get<long long>();
  r.tate_weight = j.value("weight", 0LL);
  r.r1 = j.value("r1", 0LL);
  r.r2 = j.value("r2", 0LL);
  r.h0 = j.value("h0", 0LL);
  r.h2 = j.value("h2", 0LL);
  r.soule = j.value("soule", false);
  if (j.contains("real_places"))
    for (auto& p : j.at("real_places"))
      r.real_places.emplace_back(p.at(0).get<long long>(), p.at(1).get<long long>());
  if (j.contains("induced_from")) r.induced_from_degree = j.at("induced_from").get<long long>();
  r.validate();
  return r;
}

cohom::SubspaceData subspaces_from_json(const json& j) {
  cohom::SubspaceData s;
  s.ambient = j.at("ambient").get<long long>();
  auto load = [&](const json& rows) {
    MatQ m(static_cast<Eigen::Index>(rows.size()), s.ambient);
    m.setConstant(Rational(0));
    Eigen::Index r = 0;
    for (auto& row : rows) {
      require(static_cast<long long>(row.size()) == s.ambient, "DimensionMismatch",
              "row length must equal the ambient dimension");
      Eigen::Index c = 0;
      for (auto& v : row)
        m(r, c++) = v.is_string() ? parse_rational(v.get<std::string>())
                                  : Rational(v.get<long long>());
      ++r;
    }
    return m;
  };
  s.a_rows = load(j.at("a"));
  s.b_rows = load(j.at("b"));
  return s;
}

intersect::FormalSubvariety subvariety_from_json(const json& j,
                                                 const std::vector<std::string>& ambient_vars) {
  intersect::FormalSubvariety v;
  for (auto& p : j.at("params")) v.params.push_back(p.get<std::string>());
  for (auto& f : j.at("z")) v.z_param.push_back(parse_ratfun(v.params, f.get<std::string>()));
  if (j.contains("t"))
    for (auto& f : j.at("t")) v.t_param.push_back(parse_ratfun(v.params, f.get<std::string>()));
  if (j.contains("ideal"))
    for (auto& g : j.at("ideal"))
      v.ideal.push_back(parse_polynomial(ambient_vars, g.get<std::string>()));
  v.order = j.value("order", 8u);
  return v;
}

namespace {

json form_to_json(const forms::DifferentialForm& f) {
  json terms = json::array();
  const auto& space = f.space();
  for (size_t i = 0; i < f.atom_coeffs().size(); ++i)
    if (!f.atom_coeffs()[i].is_zero())
      terms.push_back({{"on", space->one_atom(i).name}, {"coeff", f.atom_coeffs()[i].str()}});
  if (f.degree() == 1)
    for (size_t v = 0; v < f.coord1().c.size(); ++v)
      if (!f.coord1().c[v].is_zero())
        terms.push_back({{"on", "d" + space->vars()[v]}, {"coeff", f.coord1().c[v].str()}});
  return terms;
}

forms::DifferentialForm form_from_json(const forms::FormSpacePtr& space, const json& terms) {
  auto out = forms::DifferentialForm::zero(space, 1);
  std::vector<RationalFunction> atoms(space->n1(),
                                      RationalFunction::constant(space->vars(), 0));
  forms::CoordOneForm coords;
  coords.c.assign(space->vars().size(), RationalFunction::constant(space->vars(), 0));
  for (auto& t : terms) {
    std::string on = t.at("on").get<std::string>();
    RationalFunction coeff = parse_ratfun(space->vars(), t.at("coeff").get<std::string>());
    bool matched = false;
    for (size_t i = 0; i < space->n1(); ++i)
      if (space->one_atom(i).name == on) {
        atoms[i] += coeff;
        matched = true;
        break;
      }
    if (!matched)
      for (size_t v = 0; v < space->vars().size(); ++v)
        if ("d" + space->vars()[v] == on) {
          coords.c[v] += coeff;
          matched = true;
          break;
        }
    require(matched, "InvalidData", "unknown differential '" + on + "'");
  }
  out = forms::DifferentialForm::one_form(space, atoms) +
        forms::DifferentialForm::coord_one_form(space, coords);
  return out;
}

}  // namespace

json connection_to_json(const conn::ReducedConnection& c) {
  json j;
  j["chart"] = c.lambda.space->chart().name();
  j["blocks"] = c.lambda.block_dims;
  json atoms = json::array();
  for (size_t i = 0; i < c.lambda.space->n1(); ++i)
    atoms.push_back(c.lambda.space->one_atom(i).name);
  j["atoms"] = atoms;
  json entries = json::array();
  for (int r = 0; r < c.lambda.dim(); ++r)
    for (int col = 0; col < c.lambda.dim(); ++col) {
      const auto& e = c.lambda.entries[static_cast<size_t>(r)][static_cast<size_t>(col)];
      if (e.is_zero()) continue;
      entries.push_back({{"row", r}, {"col", col}, {"form", form_to_json(e)}});
    }
  j["entries"] = entries;
  json chain = json::array();
  for (auto& s : c.s_chain) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index cc = 0; cc < s.cols(); ++cc) row.push_back(to_string(s(r, cc)));
      rows.push_back(row);
    }
    chain.push_back(rows);
  }
  j["s_chain"] = chain;
  if (!c.s_chain.empty()) j["s1"] = chain[0];
  j["certified"] = c.certified;
  if (c.fiber) {
    j["depth"] = c.depth;
    json omega = json::array();
    for (size_t i = 0; i < c.omega.size(); ++i)
      if (!c.omega[i].is_zero())
        omega.push_back({{"basis", c.fiber->basis().basis_name(static_cast<int>(i))},
                         {"form", form_to_json(c.omega[i])}});
    j["omega"] = omega;
  }
  return j;
}

std::pair<conn::FormMatrix, std::vector<MatQ>> connection_from_json(const json& j) {
  forms::Chart chart = forms::Chart::parse(j.at("chart").get<std::string>());
  bool coordinate_atoms = j.value("coordinate_atoms", false);
  bool plain_wedges = j.value("plain_wedges", false);
  auto space = (coordinate_atoms || plain_wedges)
                   ? forms::FormSpace::for_chart_extended(chart, coordinate_atoms, plain_wedges)
                   : forms::FormSpace::for_chart(chart);
  std::vector<int> blocks = j.at("blocks").get<std::vector<int>>();
  conn::FormMatrix lambda = conn::FormMatrix::zero(space, blocks);
  for (auto& e : j.at("entries")) {
    int r = e.at("row").get<int>();
    int c = e.at("col").get<int>();
    lambda.entries[static_cast<size_t>(r)][static_cast<size_t>(c)] =
        form_from_json(space, e.at("form"));
  }
  std::vector<MatQ> chain;
  if (j.contains("s1")) {
    MatQ s1(static_cast<Eigen::Index>(j.at("s1").size()), static_cast<Eigen::Index>(space->n1()));
    s1.setConstant(Rational(0));
    Eigen::Index r = 0;
    for (auto& row : j.at("s1")) {
      Eigen::Index c = 0;
      for (auto& v : row)
        s1(r, c++) = v.is_string() ? parse_rational(v.get<std::string>())
                                   : Rational(v.get<long long>());
      ++r;
    }
    chain = conn::build_s_chain(space, s1, static_cast<int>(blocks.size()) - 1);
  }
  return {lambda, chain};
}

json gauge_to_json(const conn::GaugeTransform& g) {
  json entries = json::array();
  for (size_t r = 0; r < g.m.size(); ++r)
    for (size_t c = 0; c < g.m.size(); ++c)
      if (!g.m[r][c].is_zero())
        entries.push_back({{"row", r}, {"col", c}, {"value", g.m[r][c].str()}});
  json j;
  j["blocks"] = g.block_dims;
  j["entries"] = entries;
  return j;
}

}  // namespace kim::io
