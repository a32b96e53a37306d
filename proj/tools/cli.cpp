/*
   Copyright 2026 The ncert Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "ncert/cli.hpp"
#include "ncert/io.hpp"

namespace ncert {

namespace {

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> P;
  std::string pencil_file;
  std::string point_file;
  std::vector<std::string> x;
  std::vector<std::string> u;
  int delta_max = 3;
  std::uint64_t seed = 0;
  std::vector<int> sizes;
  int samples = 200;
  int trials = 20;
  int count = 5;
  int n = 2;
  double sdp_tol = 1e-8;
  double accept_residual = 1e-6;
  double equiv_tol = 1e-8;
  double pos_tol = 1e-8;
  double verify_tol = 1e-6;
  std::string output;
  bool json = false;

  Json to_json() const {
    return Json{{"command", command},
                {"inputs", inputs},
                {"P", P},
                {"pencil", pencil_file},
                {"point", point_file},
                {"x", x},
                {"u", u},
                {"delta_max", delta_max},
                {"seed", seed},
                {"sizes", sizes},
                {"samples", samples},
                {"trials", trials},
                {"count", count},
                {"n", n},
                {"sdp_tol", sdp_tol},
                {"accept_residual", accept_residual},
                {"equiv_tol", equiv_tol},
                {"pos_tol", pos_tol},
                {"verify_tol", verify_tol},
                {"output", output}};
  }
};

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Outcome {
  Json report;
  int code = kExitOk;
};

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
  if (dynamic_cast<const NotInDomain*>(&e)) return "NotInDomain";
  if (dynamic_cast<const ShapeError*>(&e)) return "ShapeError";
  if (dynamic_cast<const SamplingExhausted*>(&e)) return "SamplingExhausted";
  if (dynamic_cast<const NoCommonPoints*>(&e)) return "NoCommonPoints";
  if (dynamic_cast<const NonMonicPencil*>(&e)) return "NonMonicPencil";
  if (dynamic_cast<const ClosureOverflow*>(&e)) return "ClosureOverflow";
  if (dynamic_cast<const SolverStalled*>(&e)) return "SolverStalled";
  if (dynamic_cast<const DegreeTooSmall*>(&e)) return "DegreeTooSmall";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
  return "Error";
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json strings(const std::vector<MatPoly>& ps) {
  Json a = Json::array();
  for (const MatPoly& p : ps) a.push_back(p.str());
  return a;
}

Json substitution_json(const Bindings& b) {
  Json out = Json::object();
  for (const auto& [k, v] : b) out[print(k)] = print(v);
  return out;
}

std::vector<MatPoly> parse_P(const RunConfig& cfg) {
  std::vector<MatPoly> out;
  for (const std::string& s : cfg.P) out.push_back(expand(parse(s)));
  return out;
}

int arity_of(const std::vector<MatPoly>& P, const MatRatExpr* e) {
  int d = e ? e->max_x_index() : 0;
  for (const MatPoly& p : P) d = std::max(d, p.max_x_index());
  return d;
}

DomainSpec domain(const RunConfig& cfg, const MatRatExpr* e) {
  if (!cfg.pencil_file.empty()) {
    if (!cfg.P.empty()) throw UsageError("give either --P or --pencil, not both");
    return DomainSpec::pencil(pencil_from_json(read_json_file(cfg.pencil_file)));
  }
  if (cfg.P.empty()) throw UsageError("a domain is required (--P or --pencil)");
  const std::vector<MatPoly> P = parse_P(cfg);
  return DomainSpec::poly_list(P, arity_of(P, e));
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions opt;
  opt.sizes = cfg.sizes;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.sdp_tol = cfg.sdp_tol;
  opt.accept_residual = cfg.accept_residual;
  return opt;
}

Json witness_json(const PositivityReport& r) {
  Json w{{"min_eigenvalue", r.min_eigenvalue}, {"evaluated", r.evaluated}};
  if (r.witness) w["point"] = point_to_json(ExtendedPoint(*r.witness));
  return w;
}

Outcome not_certified(const NotCertified& e) {
  Json attempts = Json::array();
  for (const DeltaAttempt& a : e.attempts())
    attempts.push_back({{"delta", a.delta}, {"margin", finite_or_null(a.margin)}, {"note", a.note}});
  Json r{{"status", "not_certified"}, {"message", e.what()}, {"delta_max", e.delta_max()}, {"attempts", attempts}};
  if (e.witness()) r["witness"] = witness_json(*e.witness());
  return {r, kExitInconclusive};
}

// ---------------------------------------------------------------- commands

Outcome cmd_parse(const RunConfig& cfg) {
  const MatRatExpr e = parse(cfg.inputs.at(0));
  Json inv = Json::array();
  for (const RatExpr& g : inverse_subterms(e)) inv.push_back(print(g));
  Json r{{"status", "ok"},
         {"printed", print(e)},
         {"rows", e.rows()},
         {"cols", e.cols()},
         {"inversion_count", inversion_count(e)},
         {"inverse_subterms", inv}};
  if (inversion_count(e) == 0) r["expanded"] = expand(e).str();
  return {r, kExitOk};
}

Outcome cmd_eval(const RunConfig& cfg) {
  const MatRatExpr e = parse(cfg.inputs.at(0));
  ExtendedPoint p;
  if (!cfg.point_file.empty()) {
    if (!cfg.x.empty() || !cfg.u.empty()) throw UsageError("give either --point or --x/--u");
    p = point_from_json(read_json_file(cfg.point_file));
  } else {
    Json j{{"X", Json::array()}, {"U", Json::array()}};
    for (const std::string& s : cfg.x) j["X"].push_back(Json::parse(s));
    for (const std::string& s : cfg.u) j["U"].push_back(Json::parse(s));
    p = point_from_json(j);
  }
  const Matrix v = eval_expr(e, p);
  return {Json{{"status", "ok"}, {"n", p.n()}, {"value", matrix_to_json(v)}}, kExitOk};
}

Outcome cmd_equiv(const RunConfig& cfg) {
  const MatRatExpr a = parse(cfg.inputs.at(0));
  const MatRatExpr b = parse(cfg.inputs.at(1));
  const EquivalenceVerdict v = test_equivalence(a, b, cfg.sizes, cfg.trials, cfg.equiv_tol, cfg.seed);
  Json r{{"status", "ok"},
         {"verdict", v.distinguished ? "distinguished" : "equivalent-so-far"},
         {"evaluated", v.evaluated},
         {"skipped", v.skipped},
         {"distinguishing_trials", v.distinguishing_trials},
         {"max_deviation", v.max_deviation}};
  if (v.witness) {
    r["witness"] = point_to_json(*v.witness);
    r["witness_deviation"] = v.witness_deviation;
  }
  return {r, v.distinguished ? kExitInconclusive : kExitOk};
}

Outcome cmd_sample_domain(const RunConfig& cfg) {
  const DomainSpec dom = domain(cfg, nullptr);
  Json pts = Json::array();
  for (const MatrixPoint& x : sample_domain(dom, cfg.n, cfg.count, cfg.seed)) {
    Json pj = point_to_json(ExtendedPoint(x));
    pj["margin"] = in_domain(dom, x).margin;
    pts.push_back(std::move(pj));
  }
  return {Json{{"status", "ok"}, {"points", pts}}, kExitOk};
}

Outcome cmd_lift(const RunConfig& cfg) {
  const MatRatExpr e = parse(cfg.inputs.at(0));
  const LiftResult l = build_hat(e);
  Json g = Json::array();
  Json go = Json::array();
  for (const RatExpr& x : l.g_list) g.push_back(print(x));
  for (const RatExpr& x : l.g_original) go.push_back(print(x));
  Json r{{"status", "ok"},         {"hat_q", l.hat_q.str()},   {"hat_q_sa", l.hat_q_sa.str()},
         {"g", g},                 {"g_original", go},         {"substitution", substitution_json(l.back_substitution())}};
  if (!cfg.P.empty()) {
    const std::vector<MatPoly> P = parse_P(cfg);
    const DomainSpec dom = DomainSpec::poly_list(P, arity_of(P, &e));
    std::vector<double> D;
    for (std::size_t j = 1; j <= l.g_list.size(); ++j)
      D.push_back(estimate_D(l.g_list, static_cast<int>(j), dom, cfg.sizes, cfg.samples, cfg.seed).D);
    const AugmentedSet O = build_O(P, l, D);
    Json oj = Json::array();
    for (const OElement& o : O.O) oj.push_back({{"label", o.label()}, {"poly", o.poly.str()}});
    r["D"] = D;
    r["O"] = oj;
  }
  return {r, kExitOk};
}

Outcome cmd_certify(const RunConfig& cfg) {
  const MatRatExpr q = parse(cfg.inputs.at(0));
  const CertifyOptions opt = certify_options(cfg);
  try {
    if (!cfg.pencil_file.empty()) {
      if (!cfg.P.empty()) throw UsageError("give either --P or --pencil, not both");
      const LinearPencil L = pencil_from_json(read_json_file(cfg.pencil_file));
      const PencilCertificate pc = certify_pencil_rational(q, L, cfg.delta_max, opt);
      Json rel = Json::array();
      for (const Relation& m : pc.Mr) rel.push_back(m.m.str());
      Json sos = Json::array();
      Json w = Json::array();
      for (const MatRatExpr& s : pc.sos) sos.push_back(print(s));
      for (const MatRatExpr& x : pc.weighted) w.push_back(print(x));
      Json r{{"status", "certified"},
             {"certificate",
              certificate_to_json(pc.cert, pc.lift.hat_q_sa, {L.to_matpoly()}, pc.lift.back_substitution())},
             {"pencil", pencil_to_json(L)},
             {"relations", rel},
             {"back_substituted", {{"sos", sos}, {"weighted", w}}},
             {"agreement", pc.agreement},
             {"ideal_defect", pc.ideal_defect},
             {"zr_defect", finite_or_null(pc.zr_defect)}};
      return {r, kExitOk};
    }
    if (cfg.P.empty()) throw UsageError("a domain is required (--P or --pencil)");
    const std::vector<MatPoly> P = parse_P(cfg);
    if (inversion_count(q) == 0) {
      const MatPoly qp = expand(q);
      const Certificate c = certify_polynomial(qp, P, cfg.delta_max, opt);
      return {Json{{"status", "certified"}, {"certificate", certificate_to_json(c, qp, P)}}, kExitOk};
    }
    const RationalCertificate rc = certify_rational(q, P, cfg.delta_max, opt);
    Json labels = Json::array();
    for (const OElement& o : rc.O.O) labels.push_back(o.label());
    Json r{{"status", "certified"},
           {"certificate", certificate_to_json(rc.cert, rc.lift.hat_q_sa, rc.O.polys(), rc.lift.back_substitution())},
           {"generator_labels", labels},
           {"D", rc.O.D},
           {"sampled_min", rc.sampled_min},
           {"agreement", rc.agreement},
           {"warnings", rc.warnings}};
    try {
      const AssembledCertificate ac = assemble_rational_certificate(rc, P, cfg.delta_max, opt);
      Json sos = Json::array();
      Json w = Json::array();
      for (const MatRatExpr& s : ac.sos) sos.push_back(print(s));
      for (const auto& [gen, x] : ac.weighted) w.push_back({{"gen", gen}, {"r", print(x)}});
      r["assembled"] = Json{{"generators", strings(P)},
                            {"sos", sos},
                            {"weighted", w},
                            {"relation_defect", ac.relation_defect},
                            {"agreement", ac.agreement},
                            {"recursive_targets", ac.recursive_targets}};
    } catch (const NotCertified& e) {
      r["assembled"] = Json{{"status", "not_certified"}, {"message", e.what()}};
      r["warnings"].push_back(std::string("assembly over x failed: ") + e.what());
    }
    return {r, kExitOk};
  } catch (const NotCertified& e) {
    return not_certified(e);
  }
}

Outcome cmd_verify(const RunConfig& cfg) {
  Json j = read_json_file(cfg.inputs.at(0));
  if (j.contains("certificate")) j = j["certificate"];
  const CertificateRecord rec = certificate_from_json(j);
  const double res = verify_certificate(rec.target, rec.cert, rec.generators);
  const bool ok = res <= cfg.verify_tol;
  Json r{{"status", ok ? "verified" : "rejected"},
         {"residual", res},
         {"claimed_residual", rec.cert.residual},
         {"tolerance", cfg.verify_tol}};
  return {r, ok ? kExitOk : kExitInconclusive};
}

Outcome cmd_check_pos(const RunConfig& cfg) {
  const MatRatExpr e = parse(cfg.inputs.at(0));
  const DomainSpec dom = domain(cfg, &e);
  const PositivityReport rep = check_positivity(e, dom, cfg.sizes, cfg.samples, cfg.seed);
  const bool ok = rep.min_eigenvalue >= -cfg.pos_tol;
  Json r = witness_json(rep);
  r["status"] = ok ? "nonnegative-on-samples" : "negative";
  return {r, ok ? kExitOk : kExitInconclusive};
}

// key: value lines for people; nested values stay compact JSON
std::string render_text(const Json& r) {
  std::ostringstream os;
  for (const auto& [k, v] : r.items()) {
    if (k == "config") continue;
    if (v.is_string()) {
      os << k << ": " << v.get<std::string>() << "\n";
    } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_string(); }) &&
               !v.empty()) {
      os << k << ":\n";
      for (const Json& x : v) os << "  " << x.get<std::string>() << "\n";
    } else if (v.is_object() && k == "certificate") {
      os << k << ":\n";
      for (const auto& [ck, cv] : v.items()) os << "  " << ck << ": " << cv.dump() << "\n";
    } else {
      os << k << ": " << v.dump() << "\n";
    }
  }
  return os.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"ncert: positivity certificates for noncommutative rational expressions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* c, bool with_domain) {
    c->add_flag("--json", cfg.json, "print the report as one line of JSON");
    c->add_option("--output,-o", cfg.output, "write the report to a file");
    c->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    c->add_option("--sizes", cfg.sizes, "matrix sizes to sample")->delimiter(',');
    if (with_domain) {
      c->add_option("--P", cfg.P, "domain generator (repeatable)")->allow_extra_args(false);
      c->add_option("--pencil", cfg.pencil_file, "JSON file {\"A0\": matrix, \"Ai\": [matrix, ...]}");
    }
  };

  CLI::App* parse_cmd = app.add_subcommand("parse", "parse and print an expression");
  parse_cmd->add_option("expr", cfg.inputs, "expression")->required()->expected(1)->allow_extra_args(false);
  common(parse_cmd, false);

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate at a matrix point");
  eval_cmd->add_option("expr", cfg.inputs, "expression")->required()->expected(1)->allow_extra_args(false);
  eval_cmd->add_option("--point", cfg.point_file, "JSON file {\"X\": [...], \"U\": [...]}");
  eval_cmd->add_option("--x", cfg.x, "JSON matrix for the next x letter (repeatable)")->allow_extra_args(false);
  eval_cmd->add_option("--u", cfg.u, "JSON matrix for the next u letter (repeatable)")->allow_extra_args(false);
  common(eval_cmd, false);

  CLI::App* equiv_cmd = app.add_subcommand("equiv", "randomized equivalence test");
  equiv_cmd->add_option("a", cfg.inputs, "expressions")->required()->expected(2)->allow_extra_args(false);
  equiv_cmd->add_option("--trials", cfg.trials, "trials per size")->capture_default_str();
  equiv_cmd->add_option("--tol", cfg.equiv_tol, "relative deviation threshold")->capture_default_str();
  common(equiv_cmd, false);

  CLI::App* sample_cmd = app.add_subcommand("sample-domain", "sample points of the positivity domain");
  sample_cmd->add_option("--n", cfg.n, "matrix size")->capture_default_str();
  sample_cmd->add_option("--count", cfg.count, "number of points")->capture_default_str();
  common(sample_cmd, true);

  CLI::App* lift_cmd = app.add_subcommand("lift", "replace inverses by fresh letters");
  lift_cmd->add_option("expr", cfg.inputs, "expression")->required()->expected(1)->allow_extra_args(false);
  lift_cmd->add_option("--samples", cfg.samples, "samples per size for the norm caps")->capture_default_str();
  common(lift_cmd, true);

  CLI::App* certify_cmd = app.add_subcommand("certify", "search for a positivity certificate");
  certify_cmd->add_option("expr", cfg.inputs, "expression")->required()->expected(1)->allow_extra_args(false);
  certify_cmd->add_option("--delta-max", cfg.delta_max, "largest degree bound tried")->capture_default_str();
  certify_cmd->add_option("--samples", cfg.samples, "samples per size for screening")->capture_default_str();
  certify_cmd->add_option("--sdp-tol", cfg.sdp_tol, "solver tolerance")->capture_default_str();
  certify_cmd->add_option("--accept-residual", cfg.accept_residual, "verifier acceptance")->capture_default_str();
  common(certify_cmd, true);

  CLI::App* verify_cmd = app.add_subcommand("verify", "re-verify a certificate JSON file");
  verify_cmd->add_option("file", cfg.inputs, "certificate or certify report")->required()->expected(1)->allow_extra_args(false);
  verify_cmd->add_option("--tol", cfg.verify_tol, "accepted residual")->capture_default_str();
  common(verify_cmd, false);

  CLI::App* pos_cmd = app.add_subcommand("check-pos", "minimum eigenvalue over domain samples");
  pos_cmd->add_option("expr", cfg.inputs, "expression")->required()->expected(1)->allow_extra_args(false);
  pos_cmd->add_option("--samples", cfg.samples, "samples per size")->capture_default_str();
  pos_cmd->add_option("--tol", cfg.pos_tol, "negativity threshold")->capture_default_str();
  common(pos_cmd, true);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (cfg.sizes.empty()) cfg.sizes = cfg.command == "equiv" ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{1, 2, 3};

  Outcome o;
  try {
    for (int s : cfg.sizes)
      if (s < 1) throw UsageError("sizes must be positive");
    if (cfg.command == "parse") o = cmd_parse(cfg);
    else if (cfg.command == "eval") o = cmd_eval(cfg);
    else if (cfg.command == "equiv") o = cmd_equiv(cfg);
    else if (cfg.command == "sample-domain") o = cmd_sample_domain(cfg);
    else if (cfg.command == "lift") o = cmd_lift(cfg);
    else if (cfg.command == "certify") o = cmd_certify(cfg);
    else if (cfg.command == "verify") o = cmd_verify(cfg);
    else o = cmd_check_pos(cfg);
  } catch (const Json::exception& e) {
    o = {Json{{"status", "error"}, {"error", "UsageError"}, {"message", e.what()}}, kExitError};
  } catch (const std::exception& e) {
    o = {Json{{"status", "error"}, {"error", error_kind(e)}, {"message", e.what()}}, kExitError};
  }
  o.report["config"] = cfg.to_json();
  if (o.code == kExitError) err << "ncert: " << o.report["message"].get<std::string>() << "\n";

  const std::string text = cfg.json ? o.report.dump() + "\n" : render_text(o.report);
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output);
    if (!f) {
      err << "ncert: cannot write " << cfg.output << "\n";
      return kExitError;
    }
    f << (cfg.json ? text : o.report.dump(2) + "\n");
  }
  return o.code;
}

}  // namespace ncert
