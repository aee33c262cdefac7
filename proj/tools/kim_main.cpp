// kim: exact-arithmetic toolkit for unipotent connections, iterated-integral
// transport, jet-level intersection certificates and finiteness criteria.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "kim/formalgroup.hpp"
#include "kim/io.hpp"
#include "kim/transport.hpp"
#include "kim/uea.hpp"

using namespace kim;
using nlohmann::json;

namespace {

struct Output {
  bool as_json = false;
  json payload = json::object();

  void header(const std::string& command, const std::string& flags, const std::string& digest) {
    if (as_json) {
      payload["command"] = command;
      payload["flags"] = flags;
      payload["input_digest"] = digest;
    } else {
      std::cout << "# kim " << command << " | flags: " << (flags.empty() ? "-" : flags)
                << " | input: " << (digest.empty() ? "-" : digest) << "\n";
    }
  }
  void finish() {
    if (as_json) std::cout << payload.dump(2) << "\n";
  }
};

std::string flag_string(const std::vector<std::pair<std::string, std::string>>& flags) {
  std::string out;
  for (auto& [k, v] : flags) {
    if (!out.empty()) out += " ";
    out += "--" + k + "=" + v;
  }
  return out;
}

lie::LieAlgebraSpec spec_from_cli(const std::string& spec_file, int gens, int cls,
                                  const std::string& quotient) {
  if (!spec_file.empty()) {
    json j = json::parse(io::read_file(spec_file));
    return io::lie_spec_from_json(j);
  }
  lie::LieAlgebraSpec spec;
  spec.gens = gens;
  spec.cls = cls;
  if (quotient == "free") {
  } else if (quotient == "metabelian") {
    spec.metabelian = true;
  } else if (quotient.rfind("surface:", 0) == 0) {
    spec.surface_genus = std::stoi(quotient.substr(8));
  } else if (quotient.rfind("surface-metabelian:", 0) == 0) {
    spec.surface_genus = std::stoi(quotient.substr(19));
    spec.metabelian = true;
  } else {
    fail("InvalidData", "unknown quotient '" + quotient + "'");
  }
  return spec;
}

std::vector<Rational> parse_base(const std::string& text) {
  std::vector<Rational> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(parse_rational(tok));
  return out;
}

formalgroup::WeierstrassCurve parse_curve(const std::string& text) {
  auto coeffs = parse_base(text);
  require(coeffs.size() == 5, "InvalidData", "--curve wants a1,a2,a3,a4,a6");
  return {coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]};
}

int run_lie(const std::string& sub, const std::string& spec_file, int gens, int cls,
            const std::string& quotient, const std::string& v_text, int lo, int hi, Output& out) {
  auto spec = spec_from_cli(spec_file, gens, cls, quotient);
  std::string digest = spec_file.empty() ? "" : io::digest_hex(io::read_file(spec_file));
  out.header("lie " + sub,
             flag_string({{"gens", std::to_string(spec.gens)},
                          {"class", std::to_string(spec.cls)},
                          {"quotient", quotient}}),
             digest);
  auto ctx = lie::LieContext::make(spec);
  if (sub == "dims") {
    auto dims = ctx->graded_dims();
    if (out.as_json) {
      out.payload["dims"] = dims;
    } else {
      for (size_t i = 0; i < dims.size(); ++i) std::cout << (i ? " " : "") << dims[i];
      std::cout << "\n";
    }
    return 0;
  }
  if (sub == "basis") {
    json rows = json::array();
    for (int i = 0; i < ctx->dim(); ++i) {
      if (out.as_json)
        rows.push_back({{"index", i + 1},
                        {"degree", ctx->basis().degree_of(i)},
                        {"word", ctx->basis().basis_name(i)}});
      else
        std::cout << i + 1 << "\t" << ctx->basis().degree_of(i) << "\t"
                  << ctx->basis().basis_name(i) << "\n";
    }
    if (out.as_json) out.payload["basis"] = rows;
    return 0;
  }
  if (sub == "ihara") {
    auto rep = lie::ihara_module_check(ctx);
    json rows = json::array();
    for (auto& row : rep.rows) {
      if (out.as_json)
        rows.push_back({{"degree", row.degree},
                        {"syzygy", row.syzygy_dim},
                        {"commutator", row.commutator_dim},
                        {"match", row.match}});
      else
        std::cout << "degree " << row.degree << ": syzygy " << row.syzygy_dim << " commutator "
                  << row.commutator_dim << (row.match ? " match" : " MISMATCH") << "\n";
    }
    if (out.as_json) {
      out.payload["rows"] = rows;
      out.payload["all_match"] = rep.all_match;
    } else {
      std::cout << (rep.all_match ? "all degrees match" : "MISMATCH FOUND") << "\n";
    }
    return rep.all_match ? 0 : 1;
  }
  if (sub == "ad-injectivity") {
    std::vector<Rational> v = parse_base(v_text);
    auto rep = lie::ad_injectivity_check(ctx, v, lo, hi);
    for (auto& row : rep.rows) {
      if (!out.as_json)
        std::cout << "degree " << row.degree << ": rank " << row.rank << "/" << row.domain_dim
                  << (row.injective ? " injective" : " NOT injective") << "\n";
    }
    if (out.as_json) out.payload["all_injective"] = rep.all_injective;
    return rep.all_injective ? 0 : 1;
  }
  fail("InvalidData", "unknown lie subcommand");
}

json certificate_to_json(const intersect::DependencyCertificate& cert) {
  json j;
  switch (cert.kind) {
    case intersect::DependencyCertificate::Kind::FullRank: j["kind"] = "full-rank"; break;
    case intersect::DependencyCertificate::Kind::ConstantRelation:
      j["kind"] = "constant-relation";
      break;
    case intersect::DependencyCertificate::Kind::FunctionRelation:
      j["kind"] = "function-relation";
      break;
  }
  json rel = json::array();
  for (auto& f : cert.relation) rel.push_back(f.str());
  j["relation"] = rel;
  if (cert.kind == intersect::DependencyCertificate::Kind::ConstantRelation) {
    json coeffs = json::array();
    for (Eigen::Index i = 0; i < cert.constant_coeffs.size(); ++i)
      coeffs.push_back(to_string(cert.constant_coeffs(i)));
    j["kernel_class_coefficients"] = coeffs;
    j["exactness_witness"] = cert.exactness_witness.str();
  }
  if (cert.kind == intersect::DependencyCertificate::Kind::FunctionRelation) {
    j["h1"] = cert.h1.str();
    j["h2"] = cert.h2.str();
    json lam = json::array();
    for (auto& f : cert.lambda) lam.push_back(f.str());
    j["lambda"] = lam;
  }
  j["trace"] = cert.trace;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Chabauty--Kim desk toolkit"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  // lie ----------------------------------------------------------------
  auto* lie_cmd = app.add_subcommand("lie", "Hall bases, quotients and dimension reports");
  lie_cmd->require_subcommand(1);
  std::string spec_file, quotient = "free", v_text = "1";
  int gens = 2, cls = 4, lo = 2, hi = 3;
  for (auto name : {"dims", "basis", "ihara", "ad-injectivity"}) {
    auto* sub = lie_cmd->add_subcommand(name);
    sub->add_option("--spec", spec_file, "JSON spec file");
    sub->add_option("--gens", gens);
    sub->add_option("--class", cls);
    sub->add_option("--quotient", quotient,
                    "free | metabelian | surface:g | surface-metabelian:g");
    if (std::string(name) == "ad-injectivity") {
      sub->add_option("--v", v_text, "degree-one vector, comma separated");
      sub->add_option("--from", lo);
      sub->add_option("--to", hi);
    }
  }

  // connection -----------------------------------------------------------
  auto* conn_cmd = app.add_subcommand("connection", "universal connections and reduced form");
  conn_cmd->require_subcommand(1);
  std::string chart_text = "p1(0,1,inf)", conn_file, out_file;
  int depth = 2;
  auto* conn_universal = conn_cmd->add_subcommand("universal");
  conn_universal->add_option("--chart", chart_text);
  conn_universal->add_option("--depth", depth);
  conn_universal->add_option("--out", out_file);
  auto* conn_flat = conn_cmd->add_subcommand("flatness");
  conn_flat->add_option("file", conn_file)->required();
  auto* conn_reduce = conn_cmd->add_subcommand("reduce");
  conn_reduce->add_option("file", conn_file)->required();
  conn_reduce->add_option("--out", out_file);

  // transport -------------------------------------------------------------
  auto* trans_cmd = app.add_subcommand("transport", "horizontal-section solver and verifiers");
  trans_cmd->require_subcommand(1);
  std::string base_text = "1/2";
  unsigned order = 10;
  int tdepth = 4;
  for (auto name : {"solve", "verify"}) {
    auto* sub = trans_cmd->add_subcommand(name);
    sub->add_option("--chart", chart_text);
    sub->add_option("--base", base_text);
    sub->add_option("--depth", tdepth);
    sub->add_option("--order", order);
  }

  // intersect ---------------------------------------------------------------
  auto* inter_cmd = app.add_subcommand("intersect", "jet-level intersection analysis");
  inter_cmd->require_subcommand(1);
  std::string v_file, demo_name = "p1-cross";
  unsigned jet_order = 8;
  int idepth = 1;
  auto* inter_analyze = inter_cmd->add_subcommand("analyze");
  inter_analyze->add_option("file", v_file)->required();
  inter_analyze->add_option("--order", jet_order);
  auto* inter_demo = inter_cmd->add_subcommand("demo");
  inter_demo->add_option("name", demo_name);
  (void)idepth;

  // cohom ----------------------------------------------------------------
  auto* cohom_cmd = app.add_subcommand("cohom", "dimension-level Galois cohomology");
  cohom_cmd->require_subcommand(1);
  std::string rep_file;
  long long twist = 2;
  int degrees = 6;
  auto* cohom_euler = cohom_cmd->add_subcommand("euler");
  cohom_euler->add_option("file", rep_file)->required();
  auto* cohom_at = cohom_cmd->add_subcommand("artin-tate");
  cohom_at->add_option("file", rep_file)->required();
  cohom_at->add_option("--twist", twist);
  auto* cohom_ledger = cohom_cmd->add_subcommand("ledger");
  cohom_ledger->add_option("file", rep_file)->required();
  cohom_ledger->add_option("--degrees", degrees);
  auto* cohom_inter = cohom_cmd->add_subcommand("intersection");
  cohom_inter->add_option("file", rep_file)->required();

  // criteria ----------------------------------------------------------------
  auto* crit_cmd = app.add_subcommand("criteria", "finiteness criteria auditor");
  crit_cmd->require_subcommand(1);
  std::string curve_file, criterion = "all";
  bool modified_selmer = false;
  auto* crit_check = crit_cmd->add_subcommand("check");
  crit_check->add_option("file", curve_file)->required();
  crit_check->add_option("--criterion", criterion, "depth1|qc2|imquad|siksek|growth|all");
  crit_check->add_flag("--modified-selmer", modified_selmer);

  // formalgroup ---------------------------------------------------------------
  auto* fg_cmd = app.add_subcommand("formalgroup", "formal group log and exp");
  fg_cmd->require_subcommand(1);
  std::string curve_text = "0,0,0,1,0";
  unsigned fg_order = 20;
  for (auto name : {"log", "exp", "check"}) {
    auto* sub = fg_cmd->add_subcommand(name);
    sub->add_option("--curve", curve_text, "a1,a2,a3,a4,a6");
    sub->add_option("--order", fg_order);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Output out;
  out.as_json = as_json;

  try {
    if (lie_cmd->parsed()) {
      auto* sub = lie_cmd->get_subcommands().at(0);
      return run_lie(sub->get_name(), spec_file, gens, cls, quotient, v_text, lo, hi, out)
                 ? 1
                 : (out.finish(), 0);
    }

    if (conn_cmd->parsed()) {
      if (conn_universal->parsed()) {
        out.header("connection universal",
                   flag_string({{"chart", chart_text}, {"depth", std::to_string(depth)}}), "");
        auto chart = forms::Chart::parse(chart_text);
        auto uni = conn::build_universal(chart, depth);
        json j = io::connection_to_json(uni);
        j["flat"] = conn::is_flat(uni.lambda);
        if (!out_file.empty()) {
          std::ofstream f(out_file);
          f << j.dump(2) << "\n";
          if (!as_json) std::cout << "written: " << out_file << "\n";
        }
        if (as_json) {
          out.payload["connection"] = j;
        } else {
          std::cout << "blocks:";
          for (int b : uni.lambda.block_dims) std::cout << " " << b;
          std::cout << "\nflat: " << (conn::is_flat(uni.lambda) ? "yes" : "no") << "\n";
          for (size_t i = 0; i < uni.omega.size(); ++i)
            if (!uni.omega[i].is_zero())
              std::cout << "omega[" << uni.fiber->basis().basis_name(static_cast<int>(i))
                        << "] = " << uni.omega[i].str() << "\n";
        }
        out.finish();
        return 0;
      }
      std::string bytes = io::read_file(conn_file);
      json j = json::parse(bytes);
      auto [lambda, chain] = io::connection_from_json(j);
      if (conn_flat->parsed()) {
        out.header("connection flatness", "", io::digest_hex(bytes));
        auto residual = conn::flatness_residual(lambda);
        size_t nonzero = conn::residual_entry_count(residual);
        if (as_json) {
          out.payload["residual_entries"] = nonzero;
          out.payload["flat"] = (nonzero == 0);
        } else {
          std::cout << "residual entries: " << nonzero << "\n"
                    << "flat: " << (nonzero == 0 ? "yes" : "no") << "\n";
        }
        out.finish();
        return 0;
      }
      // reduce
      out.header("connection reduce", "", io::digest_hex(bytes));
      require(!chain.empty(), "InvalidData", "reduction needs s1 rows in the file");
      auto [reduced, gauge] = conn::reduce_to_reduced_form(lambda, chain);
      json rj = io::connection_to_json(reduced);
      rj["gauge"] = io::gauge_to_json(gauge);
      if (!out_file.empty()) {
        std::ofstream f(out_file);
        f << rj.dump(2) << "\n";
      }
      if (as_json) {
        out.payload["reduced"] = rj;
      } else {
        std::cout << "reduced; certified:";
        for (bool c : reduced.certified) std::cout << " " << (c ? "yes" : "no");
        std::cout << "\ngauge entries: " << rj["gauge"]["entries"].size() << "\n";
      }
      out.finish();
      return 0;
    }

    if (trans_cmd->parsed()) {
      auto* sub = trans_cmd->get_subcommands().at(0);
      auto chart = forms::Chart::parse(chart_text);
      auto base = parse_base(base_text);
      out.header("transport " + sub->get_name(),
                 flag_string({{"chart", chart_text},
                              {"base", base_text},
                              {"depth", std::to_string(tdepth)},
                              {"order", std::to_string(order)}}),
                 "");
      auto universal = conn::build_universal(chart, tdepth);
      auto h = transport::solve_j(universal, base, order);
      if (sub->get_name() == "solve") {
        if (as_json) {
          json coords = json::object();
          for (auto& [i, c] : h.j.coords)
            coords[h.ctx->basis().basis_name(i)] = c.str();
          out.payload["J"] = coords;
        } else {
          for (auto& [i, c] : h.j.coords)
            std::cout << "J[" << h.ctx->basis().basis_name(i) << "] = " << c.str() << "\n";
        }
        out.finish();
        return 0;
      }
      size_t horiz = transport::verify_horizontality(universal, h);
      size_t group = transport::verify_grouplike(h);
      auto ts = transport::compute_theta(universal);
      size_t theta = transport::mixed_nonzero_count(transport::theta_identity_residual(ts));
      size_t pullback = 0;
      for (auto& f : transport::pullback_theta_along_graph(ts, h))
        pullback += f.nonzero_coefficients();
      if (as_json) {
        out.payload["horizontality_residual"] = horiz;
        out.payload["grouplike_residual"] = group;
        out.payload["theta_identity_residual"] = theta;
        out.payload["theta_pullback_residual"] = pullback;
      } else {
        std::cout << "horizontality residual: " << horiz << "\n"
                  << "grouplike residual: " << group << "\n"
                  << "theta identity residual: " << theta << "\n"
                  << "theta pullback residual: " << pullback << "\n";
      }
      out.finish();
      return (horiz || group || theta || pullback) ? 1 : 0;
    }

    if (inter_cmd->parsed()) {
      if (inter_demo->parsed()) {
        require(demo_name == "p1-cross", "InvalidData", "unknown demo '" + demo_name + "'");
        out.header("intersect demo", flag_string({{"name", demo_name}}), "");
        auto chart = forms::Chart::parse("p1(0,1,inf)^2");
        auto space = forms::FormSpace::for_chart(chart);
        auto a = forms::DifferentialForm::atom(space, 0) - forms::DifferentialForm::atom(space, 2);
        auto b = forms::DifferentialForm::atom(space, 1) - forms::DifferentialForm::atom(space, 3);
        auto locus = intersect::colinearity_locus(a, b);
        if (as_json) {
          json gens = json::array();
          for (auto& g : locus.generators) gens.push_back(g.str());
          out.payload["locus"] = gens;
          out.payload["paper_form"] = "z1*(z2 - 1) = z2*(z1 - 1)";
        } else {
          std::cout << "forms: dz1/z1 - dz2/z2 and dz1/(1-z1) - dz2/(1-z2)\n";
          for (auto& g : locus.generators) std::cout << "locus generator: " << g.str() << "\n";
          std::cout << "equivalently: z1*(z2 - 1) = z2*(z1 - 1)\n";
        }
        out.finish();
        return 0;
      }
      std::string bytes = io::read_file(v_file);
      json j = json::parse(bytes);
      std::string vchart = j.value("chart", std::string("p1(0,1,inf)^2"));
      int vdepth = j.value("depth", 1);
      out.header("intersect analyze",
                 flag_string({{"order", std::to_string(jet_order)}}), io::digest_hex(bytes));
      auto chart = forms::Chart::parse(vchart);
      auto universal = conn::build_universal(chart, vdepth);
      auto ts = transport::compute_theta(universal);
      std::vector<std::string> ambient = ts.vars;
      auto v = io::subvariety_from_json(j, ambient);
      auto report = intersect::unlikely_report(universal, v, jet_order);
      json rj;
      rj["ambient_dim"] = report.ambient_dim;
      rj["v_dim"] = report.v_dim;
      rj["v_codim"] = report.v_codim;
      rj["theta_rank"] = report.theta_rank;
      rj["theta_count"] = report.theta_count;
      rj["rank_deficient"] = report.rank_deficient;
      rj["w_dim"] = report.w_dim;
      rj["w_codim_in_graph"] = report.w_codim_in_graph;
      rj["unlikely"] = report.unlikely;
      rj["degenerate"] = report.degenerate;
      json rels = json::array();
      for (Eigen::Index r = 0; r < report.relations.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < report.relations.cols(); ++c)
          row.push_back(to_string(report.relations(r, c)));
        rels.push_back(row);
      }
      rj["relations"] = rels;
      json certs = json::array();
      for (auto& cert : report.certificates) certs.push_back(certificate_to_json(cert));
      rj["certificates"] = certs;
      if (as_json) {
        out.payload["report"] = rj;
      } else {
        std::cout << rj.dump(2) << "\n";
      }
      out.finish();
      return 0;
    }

    if (cohom_cmd->parsed()) {
      std::string bytes = io::read_file(rep_file);
      json j = json::parse(bytes);
      if (cohom_inter->parsed()) {
        out.header("cohom intersection", "", io::digest_hex(bytes));
        auto s = io::subspaces_from_json(j);
        auto r = cohom::intersection_codim(s);
        if (as_json) {
          out.payload["dim_a"] = r.dim_a;
          out.payload["dim_b"] = r.dim_b;
          out.payload["dim_intersection"] = r.dim_intersection;
          out.payload["codim_in_a"] = r.codim_in_a;
        } else {
          std::cout << "dim A = " << r.dim_a << ", dim B = " << r.dim_b
                    << ", dim(A^B) = " << r.dim_intersection << ", codim_A = " << r.codim_in_a
                    << "\n";
        }
        out.finish();
        return 0;
      }
      auto rep = io::rep_from_json(j);
      if (cohom_euler->parsed()) {
        out.header("cohom euler", "", io::digest_hex(bytes));
        long long h1 = cohom::euler_h1(rep);
        if (as_json)
          out.payload["h1"] = h1;
        else
          std::cout << "h1 = " << h1 << "\n";
        out.finish();
        return 0;
      }
      if (cohom_at->parsed()) {
        out.header("cohom artin-tate", flag_string({{"twist", std::to_string(twist)}}),
                   io::digest_hex(bytes));
        long long h1 = cohom::artin_tate_h1(rep, twist);
        if (as_json)
          out.payload["h1"] = h1;
        else
          std::cout << "h1(W(" << twist << ")) = " << h1 << "\n";
        out.finish();
        return 0;
      }
      // ledger
      out.header("cohom ledger", flag_string({{"degrees", std::to_string(degrees)}}),
                 io::digest_hex(bytes));
      json rows = json::array();
      if (!as_json) std::cout << "twist  h1  local-vanishing\n";
      for (long long n = 2; n <= degrees; ++n) {
        long long h1 = cohom::artin_tate_h1(rep, n);
        bool vanish = cohom::local_h1_vanishing(n);
        if (as_json)
          rows.push_back({{"twist", n}, {"h1", h1}, {"local_vanishing", vanish}});
        else
          std::cout << n << "      " << h1 << "   " << (vanish ? "yes" : "no") << "\n";
      }
      if (as_json) out.payload["ledger"] = rows;
      out.finish();
      return 0;
    }

    if (crit_cmd->parsed()) {
      std::string bytes = io::read_file(curve_file);
      json j = json::parse(bytes);
      auto curve = io::curve_from_json(j);
      out.header("criteria check",
                 flag_string({{"criterion", criterion},
                              {"modified-selmer", modified_selmer ? "true" : "false"}}),
                 io::digest_hex(bytes));
      json results = json::object();
      auto emit_report = [&](const criteria::CriterionReport& rep) {
        json rr;
        rr["verdict"] = criteria::verdict_name(rep.verdict);
        rr["value"] = rep.value;
        rr["bound"] = rep.bound;
        if (rep.obstruction) rr["obstruction"] = rep.obstruction->label;
        rr["notes"] = rep.notes;
        results[rep.criterion] = rr;
        if (!as_json) {
          std::cout << rep.criterion << ": " << criteria::verdict_name(rep.verdict) << " (value "
                    << rep.value << ", bound " << rep.bound << ")";
          if (rep.obstruction) std::cout << " witness: " << rep.obstruction->label;
          std::cout << "\n";
          for (auto& n : rep.notes) std::cout << "  - " << n << "\n";
        }
      };
      bool all = criterion == "all";
      auto emit_or_skip = [&](const std::string& name, auto&& check) {
        if (!all) {
          emit_report(check());
          return;
        }
        try {
          emit_report(check());
        } catch (const Error& e) {
          results[name] = {{"skipped", e.kind()}};
          if (!as_json) std::cout << name << ": skipped (" << e.kind() << ")\n";
        }
      };
      if (all || criterion == "depth1")
        emit_or_skip("depth1", [&] { return criteria::depth1_check(curve); });
      if (all || criterion == "qc2")
        emit_or_skip("qc2", [&] { return criteria::qc_depth2_check(curve, modified_selmer); });
      if ((all && curve.r1 == 0 && curve.r2 == 1) || criterion == "imquad")
        emit_or_skip("imquad", [&] { return criteria::imag_quadratic_check(curve); });
      if (all || criterion == "siksek") {
        auto rep = criteria::siksek_question_audit(curve);
        json rr;
        rr["condition_satisfied"] = rep.condition_satisfied;
        rr["obstruction_present"] = rep.obstruction_present;
        json rows = json::array();
        for (auto& row : rep.rows)
          rows.push_back({{"model", row.label},
                          {"rank", row.rank},
                          {"bound", row.bound},
                          {"satisfied", row.satisfied}});
        rr["models"] = rows;
        if (rep.witness) rr["witness"] = rep.witness->label;
        results["siksek"] = rr;
        if (!as_json) {
          for (auto& row : rep.rows)
            std::cout << "model " << row.label << ": rank " << row.rank << " <= " << row.bound
                      << (row.satisfied ? " ok" : " VIOLATED") << "\n";
          std::cout << "siksek condition: "
                    << (rep.condition_satisfied ? "satisfied" : "violated") << "\n";
          if (rep.obstruction_present)
            std::cout << "verdict: obstructed: base-change Prym (witness: "
                      << rep.witness->label << ")\n";
        }
      }
      if (criterion == "growth") {
        criteria::GrowthParams params;
        params.soule = j.value("soule", true);
        params.iwasawa_torsion = j.value("iwasawa_torsion", true);
        params.gens = j.value("gens", 2);
        int n = j.value("growth_depth", 8);
        auto rep = criteria::growth_deficit(j.value("growth_case", 1), params, n);
        json dj = json::array();
        for (auto& d : rep.deficit) dj.push_back(to_string(d));
        results["growth"] = {{"deficit", dj},
                             {"nondecreasing", rep.nondecreasing},
                             {"first_positive", rep.first_positive}};
        if (!as_json) {
          std::cout << "deficit:";
          for (auto& d : rep.deficit) std::cout << " " << to_string(d);
          std::cout << "\nfirst positive depth: " << rep.first_positive << "\n";
        }
      }
      if (as_json) out.payload["results"] = results;
      out.finish();
      return 0;
    }

    if (fg_cmd->parsed()) {
      auto* sub = fg_cmd->get_subcommands().at(0);
      auto curve = parse_curve(curve_text);
      out.header("formalgroup " + sub->get_name(),
                 flag_string({{"curve", curve_text}, {"order", std::to_string(fg_order)}}), "");
      if (sub->get_name() == "log") {
        auto log = formalgroup::formal_log(curve, fg_order);
        if (as_json)
          out.payload["log"] = log.str();
        else
          std::cout << "log = " << log.str() << "\n";
      } else if (sub->get_name() == "exp") {
        auto pair = formalgroup::formal_log_pair(curve, fg_order);
        if (as_json)
          out.payload["exp"] = pair.exp.str();
        else
          std::cout << "exp = " << pair.exp.str() << "\n";
      } else {
        auto pair = formalgroup::formal_log_pair(curve, fg_order);
        TruncSeries t = TruncSeries::variable({"t"}, 0, fg_order);
        bool ok = pair.log.substitute({pair.exp}) == t && pair.exp.substitute({pair.log}) == t;
        if (as_json)
          out.payload["roundtrip"] = ok;
        else
          std::cout << "log/exp roundtrip at order " << fg_order << ": "
                    << (ok ? "exact" : "FAILED") << "\n";
        out.finish();
        return ok ? 0 : 1;
      }
      out.finish();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: InvalidData: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
