// Single-binary front end.  Every command prints one document -- JSON by
// default, flat key = value lines with --table -- echoing its configuration
// so a run can be reproduced from its own output.  Exit status: 0 clean,
// 1 numeric failure, 2 usage or invalid input.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rmlab/acceptance.hpp"
#include "rmlab/numerics.hpp"
#include "rmlab/pseudolattice.hpp"
#include "rmlab/qexp.hpp"
#include "rmlab/qtorus.hpp"
#include "rmlab/quadfield.hpp"
#include "rmlab/rmtheta.hpp"
#include "rmlab/starkzeta.hpp"

using nlohmann::ordered_json;
using namespace rmlab;

namespace {

struct RunConfig {
  double tol = 1e-9;
  long trunc = -1;  // -1 keeps each command's default
  bool table = false;
  unsigned seed = 12345;
  int precision = 17;
};

int g_precision = 17;

void print_table(const ordered_json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_table(v, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array()) {
    int i = 0;
    for (const auto& v : j) print_table(v, prefix + "[" + std::to_string(i++) + "]");
  } else if (j.is_number_float()) {
    std::printf("%-36s = %.*g\n", prefix.c_str(), g_precision, j.get<double>());
  } else {
    std::printf("%-36s = %s\n", prefix.c_str(), j.dump().c_str());
  }
}

void emit(const ordered_json& doc, const RunConfig& cfg) {
  if (cfg.table) {
    g_precision = cfg.precision;
    print_table(doc, "");
  } else {
    std::cout << doc.dump(2) << "\n";
  }
}

ordered_json base_doc(const std::string& cmd, const RunConfig& cfg, long eff_trunc) {
  ordered_json doc;
  doc["command"] = cmd;
  doc["config"] = {{"tol", cfg.tol},
                   {"trunc", eff_trunc},
                   {"format", cfg.table ? "table" : "json"},
                   {"seed", cfg.seed},
                   {"precision", cfg.precision}};
  doc["result"] = ordered_json::object();
  doc["metadata"] = {{"truncation", eff_trunc},
                     {"iterations", 0},
                     {"residuals", ordered_json::object()}};
  return doc;
}

ordered_json cplx_json(Cplx z) { return ordered_json::array({z.real(), z.imag()}); }

std::string ivec_key(const IVec& h) {
  std::string s;
  for (size_t i = 0; i < h.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(h[i]);
  }
  return s;
}

Mat2 parse_mat(const std::string& text) {
  Mat2 m;
  long v[4];
  char comma;
  std::istringstream is(text);
  for (int i = 0; i < 4; ++i) {
    if (i && !(is >> comma && comma == ','))
      throw std::domain_error("matrix must be given as a,b,c,d");
    if (!(is >> v[i])) throw std::domain_error("matrix must be given as a,b,c,d");
  }
  m.a = v[0];
  m.b = v[1];
  m.c = v[2];
  m.d = v[3];
  return m;
}

// Shared fixtures, matching the library defaults used throughout the suite.
ThetaSpec fixture_theta() {
  Pseudolattice L(QuadElem(5, 0, 3), QuadElem(0, 5, 3));
  return ThetaSpec(L, QuadElem(1, 0, 3), QuadElem(0, 0, 3), Cplx{1.0, 0.0},
                   QuadElem(26, 15, 3));
}

LatticeThetaSpec fixture_plane(double t) {
  QuadElem one(1, 0, 5), phi(Rat(1, 2), Rat(1, 2), 5);
  QuadElem l0(Rat(1, 2), Rat(0), 5), m0(Rat(1, 3), Rat(0), 5);
  return LatticeThetaSpec(lattice_lift(one, t), lattice_lift(phi, t), lattice_lift(l0, t),
                          lattice_lift(m0, t), Cplx{1.0, 0.0});
}

StarkInput fixture_stark() {
  Pseudolattice L(QuadElem(5, 0, 3), QuadElem(0, 5, 3));
  return make_stark_input(L, QuadElem(1, 0, 3));
}

EmbeddedLattice fixture_lattice() {
  Eigen::MatrixXd B(2, 2);
  B << std::sqrt(2.0) - 1.0, 0.0, 0.0, 1.0;
  return EmbeddedLattice(1, B);
}

SiegelPoint fixture_siegel() {
  Eigen::MatrixXcd t(1, 1);
  t(0, 0) = Cplx{0.0, 1.0};
  return SiegelPoint(t);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  if (const char* p = std::getenv("RMLAB_PRECISION")) {
    int v = std::atoi(p);
    if (v >= 1 && v <= 17) cfg.precision = v;
  }

  CLI::App app{"real multiplication laboratory"};
  app.require_subcommand(1);
  app.add_option("--tol", cfg.tol, "target tolerance");
  app.add_option("--trunc", cfg.trunc, "truncation override (norm bound or box radius)");
  app.add_option("--seed", cfg.seed, "seed for randomized sweeps");
  app.add_flag("--table", cfg.table, "flat key = value output");
  app.add_flag("--json", "JSON output (default)");

  int rc = 0;

  // ---- exact layer -------------------------------------------------------
  std::string theta_text = "0 1 2";
  auto* c_reduce = app.add_subcommand("reduce", "continued fraction of a quadratic slope");
  c_reduce->add_option("--theta", theta_text, "slope, \"a b d /q\"")->required();
  c_reduce->callback([&] {
    ContinuedFraction cf = continued_fraction(parse_quad(theta_text));
    ordered_json doc = base_doc("reduce", cfg, long(cf.preperiod.size() + cf.period.size()));
    doc["result"]["cf"] = to_string(cf);
    ordered_json pre = ordered_json::array(), per = ordered_json::array();
    for (const Int& a : cf.preperiod) pre.push_back(a.str());
    for (const Int& a : cf.period) per.push_back(a.str());
    doc["result"]["preperiod"] = pre;
    doc["result"]["period"] = per;
    doc["result"]["cycle_start"] = cf.cycle_start;
    emit(doc, cfg);
  });

  long unit_d = 5;
  auto* c_unit = app.add_subcommand("unit", "fundamental unit of the maximal order");
  c_unit->add_option("-d,--d", unit_d, "squarefree d > 1")->required();
  c_unit->callback([&] {
    FundamentalUnit fu = fundamental_unit(unit_d);
    ordered_json doc = base_doc("unit", cfg, 0);
    doc["result"]["unit"] = to_string(fu.unit);
    doc["result"]["norm"] = fu.norm;
    doc["result"]["totally_positive"] = to_string(fu.totally_positive);
    emit(doc, cfg);
  });

  std::string l1_text = "1 0 5", l2_text = "1 1 5 /2";
  auto add_lattice_opts = [&](CLI::App* c) {
    c->add_option("--l1", l1_text, "first basis vector");
    c->add_option("--l2", l2_text, "second basis vector");
  };
  auto* c_dual = app.add_subcommand("dual", "trace-dual basis of a pseudolattice");
  add_lattice_opts(c_dual);
  c_dual->callback([&] {
    Pseudolattice L(parse_quad(l1_text), parse_quad(l2_text));
    Pseudolattice M = L.dual();
    ordered_json doc = base_doc("dual", cfg, 0);
    doc["result"]["l1"] = to_string(M.l1);
    doc["result"]["l2"] = to_string(M.l2);
    doc["result"]["delta"] = to_string(M.delta());
    doc["result"]["delta_product"] = to_string(L.delta() * M.delta());
    emit(doc, cfg);
  });

  auto* c_delta = app.add_subcommand("delta", "covolume element of a pseudolattice");
  add_lattice_opts(c_delta);
  c_delta->callback([&] {
    Pseudolattice L(parse_quad(l1_text), parse_quad(l2_text));
    ordered_json doc = base_doc("delta", cfg, 0);
    doc["result"]["delta"] = to_string(L.delta());
    doc["result"]["dual_delta"] = to_string(L.dual().delta());
    doc["result"]["product"] = to_string(L.delta() * L.dual().delta());
    emit(doc, cfg);
  });

  auto* c_stab = app.add_subcommand("stab", "hyperbolic stabilizer of a slope");
  c_stab->add_option("--theta", theta_text, "slope, \"a b d /q\"")->required();
  c_stab->callback([&] {
    QuadElem t = parse_quad(theta_text);
    Mat2 g = cf_stabilizer(t);
    QuadElem lam = Rat(g.c) * t + QuadElem(Rat(g.d), Rat(0), t.d);
    ordered_json doc = base_doc("stab", cfg, 0);
    doc["result"]["matrix"] = to_string(g);
    doc["result"]["eigenvalue"] = to_string(lam);
    doc["result"]["eigenvalue_norm"] = to_string(lam.norm());
    doc["result"]["det"] = det(g).str();
    emit(doc, cfg);
  });

  // ---- theta layer -------------------------------------------------------
  double v_re = 0.0, v_im = 1.0, lift_t = 0.0;
  auto add_v_opts = [&](CLI::App* c) {
    c->add_option("--v-re", v_re, "Re v");
    c->add_option("--v-im", v_im, "Im v (positive)");
  };

  auto* c_trm = app.add_subcommand("theta-rm", "unit-averaged coset theta sum");
  add_v_opts(c_trm);
  c_trm->callback([&] {
    Cplx val = theta_rm(fixture_theta(), {v_re, v_im}, cfg.tol);
    ordered_json doc = base_doc("theta-rm", cfg, 0);
    doc["result"]["value"] = cplx_json(val);
    emit(doc, cfg);
  });

  auto* c_tlat = app.add_subcommand("theta-lattice", "plane lattice theta of the lifted basis");
  add_v_opts(c_tlat);
  c_tlat->add_option("--t", lift_t, "geodesic time of the lift");
  c_tlat->callback([&] {
    Cplx val = theta_lattice(fixture_plane(lift_t), {v_re, v_im}, cfg.tol);
    ordered_json doc = base_doc("theta-lattice", cfg, 0);
    doc["result"]["value"] = cplx_json(val);
    emit(doc, cfg);
  });

  auto* c_avg = app.add_subcommand("hecke-avg", "geodesic average against the direct sum");
  add_v_opts(c_avg);
  c_avg->callback([&] {
    ThetaSpec spec = fixture_theta();
    Cplx direct = theta_rm(spec, {v_re, v_im}, cfg.tol);
    Cplx avg = hecke_average(spec, {v_re, v_im}, cfg.tol);
    ordered_json doc = base_doc("hecke-avg", cfg, 0);
    doc["result"]["direct"] = cplx_json(direct);
    doc["result"]["average"] = cplx_json(avg);
    doc["result"]["residual"] = std::abs(direct - avg);
    doc["metadata"]["residuals"]["avg_vs_direct"] = std::abs(direct - avg);
    emit(doc, cfg);
  });

  std::string fe_side = "rm";
  auto* c_fe = app.add_subcommand("fe-check", "functional equation residual");
  add_v_opts(c_fe);
  c_fe->add_option("--side", fe_side, "rm or lattice")
      ->check(CLI::IsMember({"rm", "lattice"}));
  c_fe->add_option("--t", lift_t, "geodesic time (lattice side)");
  c_fe->callback([&] {
    double r = (fe_side == "rm") ? fe_rm_residual(fixture_theta(), {v_re, v_im}, cfg.tol)
                                 : fe_lattice_residual(fixture_plane(lift_t), {v_re, v_im}, cfg.tol);
    ordered_json doc = base_doc("fe-check", cfg, 0);
    doc["result"]["side"] = fe_side;
    doc["result"]["residual"] = r;
    doc["metadata"]["residuals"]["fe"] = r;
    emit(doc, cfg);
  });

  // ---- zeta layer --------------------------------------------------------
  double s_re = 2.0, s_im = 0.0;
  std::string zeta_method = "mellin";
  auto* c_zeta = app.add_subcommand("zeta", "partial zeta of the shifted coset");
  c_zeta->add_option("--s-re", s_re, "Re s");
  c_zeta->add_option("--s-im", s_im, "Im s");
  c_zeta->add_option("--method", zeta_method, "direct or mellin")
      ->check(CLI::IsMember({"direct", "mellin"}));
  c_zeta->callback([&] {
    StarkInput in = fixture_stark();
    long nb = cfg.trunc > 0 ? cfg.trunc : 100000;
    ZetaValue z = (zeta_method == "direct") ? zeta_direct(in, {s_re, s_im}, Int(nb))
                                            : zeta_mellin(in, {s_re, s_im}, cfg.tol);
    ordered_json doc = base_doc("zeta", cfg, nb);
    doc["result"]["value"] = cplx_json(z.value);
    doc["result"]["method"] = z.method;
    doc["metadata"]["truncation"] = z.truncation.str();
    doc["metadata"]["iterations"] = z.terms;
    emit(doc, cfg);
  });

  auto* c_stark = app.add_subcommand("stark", "derivative at zero and its exponential");
  c_stark->callback([&] {
    StarkResult st = stark_number(fixture_stark(), std::min(cfg.tol, 1e-9));
    ordered_json doc = base_doc("stark", cfg, 0);
    doc["result"]["zeta_prime_0"] = st.zeta_prime_at_0;
    doc["result"]["S0"] = st.S0;
    emit(doc, cfg);
  });

  double probe_x = 0.0;
  int probe_deg = 3;
  long probe_height = 40;
  auto* c_probe = app.add_subcommand("probe", "first integer polynomial nearly vanishing at x");
  c_probe->add_option("--x", probe_x, "point to probe")->required();
  c_probe->add_option("--max-deg", probe_deg, "largest degree tried");
  c_probe->add_option("--max-height", probe_height, "largest coefficient tried");
  c_probe->callback([&] {
    auto found = algebraicity_probe(probe_x, probe_deg, probe_height, cfg.tol);
    ordered_json doc = base_doc("probe", cfg, probe_height);
    doc["result"]["found"] = found.has_value();
    if (found) {
      ordered_json cs = ordered_json::array();
      for (const Int& c : found->coeffs) cs.push_back(c.str());
      doc["result"]["coeffs"] = cs;
      doc["result"]["residual"] = found->residual;
    }
    emit(doc, cfg);
  });

  // ---- torus layer -------------------------------------------------------
  bool dual_side = false;
  auto* c_qt = app.add_subcommand("qtheta", "quantum theta coefficient dump");
  c_qt->add_flag("--dual", dual_side, "coefficients over the dual lattice");
  c_qt->callback([&] {
    int R = cfg.trunc > 0 ? int(cfg.trunc) : 4;
    QuantumThetaSeries s = dual_side ? qtheta_coeffs_dual(fixture_lattice(), fixture_siegel(), R)
                                     : qtheta_coeffs(fixture_lattice(), fixture_siegel(), R);
    ordered_json doc = base_doc("qtheta", cfg, R);
    ordered_json cs = ordered_json::object();
    for (const auto& [h, c] : s.coeffs) cs[ivec_key(h)] = cplx_json(c);
    doc["result"]["alpha_sign"] = s.alpha_sign;
    doc["result"]["coeffs"] = cs;
    doc["metadata"]["truncation"] = R;
    emit(doc, cfg);
  });

  auto* c_qfe = app.add_subcommand("qtheta-fe", "coefficient functional equation residuals");
  c_qfe->callback([&] {
    int R = cfg.trunc > 0 ? int(cfg.trunc) : 8;
    QuantumThetaSeries s = qtheta_coeffs(fixture_lattice(), fixture_siegel(), R);
    ordered_json doc = base_doc("qtheta-fe", cfg, R);
    double worst = 0.0;
    ordered_json rs = ordered_json::object();
    for (IVec shift : {IVec{1, 0}, IVec{0, 1}, IVec{1, 1}, IVec{2, -1}}) {
      double r = qtheta_fe_residual(s, shift);
      rs[ivec_key(shift)] = r;
      worst = std::max(worst, r);
    }
    doc["result"]["max_residual"] = worst;
    doc["metadata"]["truncation"] = R;
    doc["metadata"]["residuals"] = rs;
    emit(doc, cfg);
  });

  double newton_tol = 1e-13;
  auto* c_boca = app.add_subcommand("boca-proj", "idempotent from the inverse square root");
  c_boca->add_option("--newton-tol", newton_tol, "iteration exit residual");
  c_boca->callback([&] {
    int R = cfg.trunc > 0 ? int(cfg.trunc) : 6;
    BocaReport r = boca_projection(fixture_lattice(), fixture_siegel(), R, newton_tol);
    ordered_json doc = base_doc("boca-proj", cfg, R);
    doc["result"]["idem_residual"] = r.idem_residual;
    doc["result"]["selfadj_residual"] = r.selfadj_residual;
    doc["result"]["trace"] = r.trace;
    doc["result"]["min_eig"] = r.theta_min_eig;
    doc["metadata"]["truncation"] = R;
    doc["metadata"]["iterations"] = r.newton_iters;
    doc["metadata"]["residuals"]["newton"] = r.newton_residual;
    doc["metadata"]["residuals"]["dropped"] = r.dropped_mass;
    emit(doc, cfg);
  });

  std::string mat_text = "2,1,1,1", theta2_text = "-1 1 2";
  double bx = 5.0;
  int bpoints = 64;
  auto* c_bim = app.add_subcommand("bimodule-check", "cusp action relations with measured phases");
  c_bim->add_option("--g", mat_text, "matrix a,b,c,d");
  c_bim->add_option("--theta", theta2_text, "slope, \"a b d /q\"");
  c_bim->add_option("--extent", bx, "sample half-width");
  c_bim->add_option("--points", bpoints, "samples per orbit");
  c_bim->callback([&] {
    MoritaMatrix m = morita_act(parse_mat(mat_text), parse_quad(theta2_text));
    BimoduleReport r = bimodule_action_residual(m, bx, bpoints);
    ordered_json doc = base_doc("bimodule-check", cfg, bpoints);
    doc["result"]["right_relation_residual"] = r.right_relation_residual;
    doc["result"]["left_relation_residual"] = r.left_relation_residual;
    doc["result"]["commutation_residual"] = r.commutation_residual;
    doc["result"]["right_phase"] = cplx_json(r.right_phase);
    doc["result"]["left_phase"] = cplx_json(r.left_phase);
    doc["metadata"]["residuals"]["right"] = r.right_relation_residual;
    doc["metadata"]["residuals"]["left"] = r.left_relation_residual;
    emit(doc, cfg);
  });

  std::string mat2_text = "1, 1, 0, 1";
  auto* c_mor = app.add_subcommand("morita", "compose two slope rescalings");
  c_mor->add_option("--g", mat_text, "outer matrix a,b,c,d");
  c_mor->add_option("--k", mat2_text, "inner matrix a,b,c,d");
  c_mor->add_option("--theta", theta2_text, "slope, \"a b d /q\"");
  c_mor->callback([&] {
    QuadElem t = parse_quad(theta2_text);
    MoritaMatrix inner = morita_act(parse_mat(mat2_text), t);
    MoritaMatrix outer = morita_act(parse_mat(mat_text), inner.target);
    MoritaMatrix both = morita_compose(outer, inner);
    ordered_json doc = base_doc("morita", cfg, 0);
    doc["result"]["target"] = to_string(both.target);
    doc["result"]["j_inner"] = to_string(inner.j);
    doc["result"]["j_outer"] = to_string(outer.j);
    doc["result"]["j_composed"] = to_string(both.j);
    doc["result"]["multiplicative"] = (both.j == outer.j * inner.j);
    emit(doc, cfg);
  });

  // ---- q-series layer ----------------------------------------------------
  int ndeg = 4, qdeg = 24;
  std::string mu_text = "q";
  auto* c_pent = app.add_subcommand("pentagon", "pentagon identity residual");
  c_pent->add_option("--ndeg", ndeg, "total-degree cutoff");
  c_pent->add_option("--qdeg", qdeg, "q-degree cutoff");
  c_pent->add_option("--mu", mu_text, "middle scaling: q or 1")
      ->check(CLI::IsMember({"q", "1"}));
  c_pent->callback([&] {
    QSeriesParams p;
    p.ndeg = ndeg;
    p.qdeg = qdeg;
    p.mu_qpow = (mu_text == "q") ? 1 : 0;
    NCPoly r = pentagon_check(p);
    ordered_json doc = base_doc("pentagon", cfg, qdeg);
    doc["result"]["residual"] = nc_worst_coeff(r).to_string();
    doc["result"]["is_zero"] = nc_is_zero(r);
    doc["metadata"]["truncation"] = ordered_json{{"ndeg", ndeg}, {"qdeg", qdeg}};
    emit(doc, cfg);
  });

  double rx = 0.5, ry = 0.5;
  auto* c_rog = app.add_subcommand("rogers", "five-term dilogarithm defect");
  c_rog->add_option("--x", rx, "x in (0,1)")->required();
  c_rog->add_option("--y", ry, "y in (0,1)")->required();
  c_rog->callback([&] {
    double r = rogers_numeric(rx, ry);
    ordered_json doc = base_doc("rogers", cfg, 0);
    doc["result"]["residual"] = r;
    doc["metadata"]["residuals"]["five_term"] = r;
    emit(doc, cfg);
  });

  double at = 1.0, ay = 0.01;
  auto* c_asym = app.add_subcommand("dilog-asym", "product-log tail against the dilogarithm");
  c_asym->add_option("--t", at, "argument t > 0")->required();
  c_asym->add_option("--y", ay, "scale y > 0, q = e^{-2 pi y}")->required();
  c_asym->callback([&] {
    double r = dilog_asymptotic(at, ay);
    ordered_json doc = base_doc("dilog-asym", cfg, 0);
    doc["result"]["residual"] = r;
    doc["result"]["q"] = std::exp(-2.0 * 3.14159265358979323846 * ay);
    doc["metadata"]["residuals"]["tail"] = r;
    emit(doc, cfg);
  });

  // ---- the whole gate ----------------------------------------------------
  auto* c_self = app.add_subcommand("selftest", "run every verification criterion");
  c_self->callback([&] {
    std::vector<Criterion> crits = run_acceptance(cfg.seed);
    ordered_json doc = base_doc("selftest", cfg, 0);
    ordered_json list = ordered_json::array();
    int passed = 0;
    double worst = 0.0;
    for (const Criterion& c : crits) {
      list.push_back({{"id", c.id},
                      {"name", c.name},
                      {"pass", c.pass},
                      {"worst", c.worst},
                      {"bound", c.bound},
                      {"detail", c.detail}});
      passed += c.pass;
      worst = std::max(worst, c.worst);
      if (cfg.table) std::puts(format_criterion(c).c_str());
    }
    doc["result"]["criteria"] = list;
    doc["result"]["passed"] = passed;
    doc["result"]["total"] = int(crits.size());
    doc["metadata"]["residuals"]["worst"] = worst;
    if (!cfg.table) emit(doc, cfg);
    if (passed != int(crits.size())) rc = 1;
  });

  for (CLI::App* s : app.get_subcommands([](CLI::App*) { return true; }))
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
