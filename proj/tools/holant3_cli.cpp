// Command-line front end: classify signature sets, evaluate closed grids,
// decompose ternaries, run gadget constructions, and run the self-test and
// acceptance suites.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holant3/acceptance.hpp"
#include "holant3/boolhol.hpp"
#include "holant3/classifier.hpp"
#include "holant3/evaluator.hpp"
#include "holant3/gadgetlab.hpp"
#include "holant3/json_io.hpp"
#include "holant3/tensorlab.hpp"

#ifndef HOLANT3_FIXTURE_DIR
#define HOLANT3_FIXTURE_DIR ""
#endif

namespace {

using namespace holant3;

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitResource = 4;

struct CliConfig {
  int workers = 1;
  int brute_cap = 16;
  std::string output = "human";
  long long seed = -1;
};

int exit_code_for(const HolantError& e) {
  switch (e.code) {
    case Err::ParseError:
      return kExitParse;
    case Err::TooLarge:
      return kExitResource;
    default:
      return kExitValidation;
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) fail(Err::ParseError, "cannot open " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) fail(Err::ParseError, path + " is not valid JSON");
  return doc;
}

std::string stem_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string cnum_str(const cplx& z) {
  return "[" + num(z.real()) + ", " + num(z.imag()) + "]";
}

void print_doc(const json& doc, const CliConfig& cfg) {
  if (cfg.output == "json") {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << doc.dump(2) << "\n";
  }
}

int cmd_classify(const std::vector<std::string>& paths, const CliConfig& cfg) {
  std::vector<NamedSig> sigs;
  for (const auto& p : paths)
    sigs.push_back({stem_of(p), sig_from_json(load_json(p))});
  Verdict v = classify_set(sigs);
  if (cfg.output == "json") {
    print_doc(verdict_to_json(v), cfg);
    return kExitOk;
  }
  if (v.status == Verdict::Status::Tractable) {
    std::cout << "tractable, class " << tract_class_name(*v.cls) << "\n";
    if (v.witness_T) {
      std::cout << "witness frame:\n";
      for (int r = 0; r < 3; ++r) {
        std::cout << " ";
        for (int c = 0; c < 3; ++c)
          std::cout << " " << num((*v.witness_T)(r, c).real());
        std::cout << "\n";
      }
    }
    for (const auto& e : v.evidence) std::cout << "  - " << e << "\n";
  } else {
    std::cout << "hard";
    if (v.hard) std::cout << " (" << v.hard->rule << ")";
    std::cout << "\n";
  }
  for (const auto& w : v.warnings) std::cout << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& path, const std::string& method, bool check,
             const CliConfig& cfg) {
  SignatureGrid g = grid_from_json(load_json(path));
  g.validate();
  if (!g.externals.empty())
    fail(Err::Validation, "eval expects a closed grid");

  EvalOptions opt;
  opt.brute_cap_edges = cfg.brute_cap;
  opt.workers = cfg.workers;

  auto classify_grid = [&]() -> Verdict {
    std::vector<NamedSig> sigs;
    for (const auto& [name, gs] : g.signatures) {
      if (gs.kind == GridSignature::Kind::Matrix) {
        if (!gs.mat.is_symmetric(kStructuralTol))
          fail(Err::Validation,
               "matrix signature " + name + " is not symmetric");
        sigs.push_back({name, mat_to_binary(gs.mat)});
      } else {
        sigs.push_back({name, gs.sym});
      }
    }
    return classify_set(sigs);
  };

  cplx value;
  EvalStats stats;
  std::string used;
  if (method == "brute") {
    value = eval_brute(g, opt, &stats);
    used = stats.method;
  } else {
    Verdict v = classify_grid();
    if (v.status == Verdict::Status::Tractable) {
      value = eval_tractable(g, v, &stats);
      used = stats.method;
    } else if (method == "auto") {
      value = eval_brute(g, opt, &stats);
      used = stats.method;
    } else {
      fail(Err::Validation, "signature set is hard; no class algorithm");
    }
  }
  if (check) {
    EvalStats bs;
    cplx ref = eval_brute(g, opt, &bs);
    double err = std::abs(value - ref) / std::max(1.0, std::abs(ref));
    if (err > 1e-6)
      fail(Err::VerdictMismatch,
           "methods disagree: " + cnum_str(value) + " vs " + cnum_str(ref));
  }
  if (cfg.output == "json") {
    print_doc(eval_report_to_json(value, used, stats.components), cfg);
  } else {
    std::cout << "value = " << cnum_str(value) << "  (" << used << ")\n";
  }
  return kExitOk;
}

int cmd_decompose(const std::string& path, const CliConfig& cfg) {
  SymSig f = sig_from_json(load_json(path));
  try {
    CanonicalResult cr = canonicalize(f);
    if (cfg.output == "json") {
      print_doc(canonical_to_json(cr), cfg);
    } else {
      const char* kind = cr.kind == DecompKind::DegenerateRank1
                             ? "degenerate-rank1"
                             : cr.kind == DecompKind::RealOrthogonal
                                   ? "real-orthogonal"
                                   : "conj-pair";
      std::cout << "form: " << kind << ", residual " << num(cr.residual)
                << "\n";
      for (const auto& t : cr.canonical_terms) {
        std::cout << "  coeff " << cnum_str(t.coeff) << "  direction [";
        for (int i = 0; i < 3; ++i)
          std::cout << (i ? ", " : "") << cnum_str(t.vec[static_cast<std::size_t>(i)]);
        std::cout << "]\n";
      }
    }
    return kExitOk;
  } catch (const HolantError& e) {
    if (e.code == Err::FormMismatch) {
      if (cfg.output == "json") {
        json doc;
        doc["status"] = "not-low-rank";
        doc["detail"] = e.what();
        print_doc(doc, cfg);
      } else {
        std::cout << "not-low-rank: " << e.what() << "\n";
      }
      return kExitOk;
    }
    throw;
  }
}

json boolgrid_to_json(const BoolGrid& g) {
  json doc;
  doc["domain"] = 2;
  json atoms = json::array();
  for (const auto& a : g.vsigs) {
    json ja;
    if (a.kind == BoolAtom::Kind::Symmetric) {
      ja["kind"] = "bool-symmetric";
      json vals = json::array();
      for (const auto& z : a.sym.f)
        vals.push_back(json::array({z.real(), z.imag()}));
      ja["values"] = vals;
    } else {
      ja["kind"] = "bool-matrix";
      ja["values"] = json::array(
          {json::array({json::array({a.mat(0, 0).real(), a.mat(0, 0).imag()}),
                        json::array({a.mat(0, 1).real(), a.mat(0, 1).imag()})}),
           json::array({json::array({a.mat(1, 0).real(), a.mat(1, 0).imag()}),
                        json::array({a.mat(1, 1).real(), a.mat(1, 1).imag()})})});
    }
    atoms.push_back(ja);
  }
  doc["vertices"] = atoms;
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back(json::array(
        {json::array({e.a.vertex, e.a.port}), json::array({e.b.vertex, e.b.port})}));
  doc["edges"] = edges;
  return doc;
}

int cmd_gadget(const std::string& sub, const std::vector<std::string>& args,
               const std::string& plane_name_arg, const CliConfig& cfg) {
  if (sub == "signature") {
    if (args.size() != 1) fail(Err::Validation, "gadget signature <grid.json>");
    SignatureGrid g = grid_from_json(load_json(args[0]));
    GadgetResult r = gadget_signature(g);
    if (cfg.output == "json") {
      json doc;
      doc["signature"] = sig_to_json(r.sig);
      doc["asym_error"] = r.asym_error;
      print_doc(doc, cfg);
    } else {
      std::cout << sig_to_json(r.sig).dump(2) << "\nasym_error = "
                << num(r.asym_error) << "\n";
    }
    return kExitOk;
  }
  if (sub == "apply-binary") {
    if (args.size() != 2)
      fail(Err::Validation, "gadget apply-binary <matrix.json> <sig.json>");
    GridSignature gm = gridsig_from_json(load_json(args[0]));
    Mat3 m = gm.kind == GridSignature::Kind::Matrix ? gm.mat
                                                    : binary_to_mat(gm.sym);
    SymSig f = sig_from_json(load_json(args[1]));
    print_doc(sig_to_json(apply_binary(m, f)), cfg);
    return kExitOk;
  }
  if (sub == "z4") {
    if (args.size() != 1) fail(Err::Validation, "gadget z4 <sig.json>");
    SymSig f = sig_from_json(load_json(args[0]));
    Z4Realization z = realize_z_arity4(f);
    json doc;
    doc["result"] = sig_to_json(z.result);
    doc["grid"] = grid_to_json(z.grid);
    print_doc(doc, cfg);
    return kExitOk;
  }
  if (sub == "coeffs") {
    if (args.size() != 4)
      fail(Err::Validation, "gadget coeffs <sig.json> <t1> <t2> <t3>");
    SymSig f = sig_from_json(load_json(args[0]));
    std::array<cplx, 3> target;
    for (int i = 0; i < 3; ++i)
      target[static_cast<std::size_t>(i)] =
          std::strtod(args[static_cast<std::size_t>(i + 1)].c_str(), nullptr);
    GeneqRealization r = realize_coeff_geneq(f, target);
    json doc;
    doc["result"] = sig_to_json(r.result);
    doc["grid"] = grid_to_json(r.grid);
    print_doc(doc, cfg);
    return kExitOk;
  }
  if (sub == "restrict") {
    if (args.size() != 1)
      fail(Err::Validation, "gadget restrict <grid.json> --plane P");
    SignatureGrid g = grid_from_json(load_json(args[0]));
    Plane p = Plane::BG;
    if (plane_name_arg == "BG")
      p = Plane::BG;
    else if (plane_name_arg == "BR")
      p = Plane::BR;
    else if (plane_name_arg == "GR")
      p = Plane::GR;
    else
      fail(Err::Validation, "plane must be BG, BR, or GR");
    print_doc(boolgrid_to_json(grid_to_boolean(g, p)), cfg);
    return kExitOk;
  }
  fail(Err::Validation, "unknown gadget subcommand " + sub);
}

int cmd_selftest(const std::string& filter, bool skip_acceptance) {
  std::vector<CheckResult> all = run_selftest(filter);
  if (!skip_acceptance) {
    std::string dir = HOLANT3_FIXTURE_DIR;
    for (auto& r : run_acceptance(dir, filter)) all.push_back(std::move(r));
  }
  bool ok = true;
  for (const auto& r : all) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.detail
              << "\n";
    ok = ok && r.pass;
  }
  if (all.empty()) {
    std::cout << "no checks matched filter\n";
    return kExitSelftest;
  }
  return ok ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holant dichotomy toolkit for ternary symmetric signatures"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand name too

  CliConfig cfg;
  app.add_option("--workers", cfg.workers, "worker threads for brute force");
  app.add_option("--brute-cap", cfg.brute_cap, "max edges for brute force");
  app.add_option("--output", cfg.output, "human or json")
      ->check(CLI::IsMember({"human", "json"}));
  app.add_option("--seed", cfg.seed, "override random seed");
  double tol_unused = 0;
  app.add_option("--tol", tol_unused, "tolerance override (informational)");

  std::vector<std::string> classify_paths;
  auto* sc_classify = app.add_subcommand("classify", "classify signature files");
  sc_classify->add_option("paths", classify_paths, "signature JSON files")
      ->required();

  std::string eval_path, eval_method = "auto";
  bool eval_check = false;
  auto* sc_eval = app.add_subcommand("eval", "evaluate a closed grid");
  sc_eval->add_option("grid", eval_path, "grid JSON file")->required();
  sc_eval->add_option("--method", eval_method, "auto, brute, or class")
      ->check(CLI::IsMember({"auto", "brute", "class"}));
  sc_eval->add_flag("--check", eval_check, "cross-check against brute force");

  std::string dec_path;
  auto* sc_dec = app.add_subcommand("decompose", "decompose a ternary signature");
  sc_dec->add_option("sig", dec_path, "signature JSON file")->required();

  std::string gadget_sub, gadget_plane = "BG";
  std::vector<std::string> gadget_args;
  auto* sc_gadget = app.add_subcommand("gadget", "gadget constructions");
  sc_gadget->add_option("sub", gadget_sub,
                        "signature|apply-binary|z4|coeffs|restrict")
      ->required();
  sc_gadget->add_option("args", gadget_args, "subcommand arguments");
  sc_gadget->add_option("--plane", gadget_plane, "restriction plane");

  std::string st_filter;
  bool st_skip_acceptance = false;
  auto* sc_st = app.add_subcommand("selftest", "run self-test and acceptance");
  sc_st->add_option("--filter", st_filter, "run only matching checks");
  sc_st->add_flag("--quick", st_skip_acceptance, "skip acceptance checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParse;  // --help exits 0, bad usage exits 2
  }

  if (cfg.seed >= 0) {
    setenv("HOLANT3_SEED", std::to_string(cfg.seed).c_str(), 1);
  }

  try {
    if (*sc_classify) return cmd_classify(classify_paths, cfg);
    if (*sc_eval) return cmd_eval(eval_path, eval_method, eval_check, cfg);
    if (*sc_dec) return cmd_decompose(dec_path, cfg);
    if (*sc_gadget)
      return cmd_gadget(gadget_sub, gadget_args, gadget_plane, cfg);
    if (*sc_st) return cmd_selftest(st_filter, st_skip_acceptance);
  } catch (const HolantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
