#pragma once

// Command-line front end. Every command builds one report object; it is
// printed either as "key: value" lines or, with --json, as JSON.
//
// Exit codes: 0 computed, 2 parse or usage error, 3 resource guard,
// 4 certification failure, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vcsp/algebra.hpp"
#include "vcsp/blp.hpp"
#include "vcsp/caps.hpp"
#include "vcsp/feasibility.hpp"
#include "vcsp/io.hpp"
#include "vcsp/lifting.hpp"
#include "vcsp/model.hpp"
#include "vcsp/opgraph.hpp"
#include "vcsp/oracle.hpp"

namespace vcsp::cli {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json labels_json(const std::set<Label>& s) { return Json(std::vector<Label>(s.begin(), s.end())); }

/// Objects flatten to dotted keys, scalar arrays join with spaces, nested
/// arrays get one indexed line per element, multi-line strings follow their key.
inline void render_text(std::ostream& out, const Json& j, const std::string& key) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_text(out, v, key.empty() ? k : key + "." + k);
    return;
  }
  if (j.is_array()) {
    bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
      return e.is_primitive() && !(e.is_string() && e.get_ref<const std::string&>().find(' ') != std::string::npos);
    });
    if (flat) {
      out << key << ":";
      for (const auto& e : j) out << " " << (e.is_string() ? e.get<std::string>() : e.dump());
      out << "\n";
    } else {
      for (std::size_t i = 0; i < j.size(); ++i) render_text(out, j[i], key + "[" + std::to_string(i) + "]");
    }
    return;
  }
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s.find('\n') != std::string::npos) {
      out << key << ":\n" << s;
      if (s.back() != '\n') out << "\n";
    } else {
      out << key << ": " << s << "\n";
    }
    return;
  }
  out << key << ": " << j.dump() << "\n";
}

struct Inputs {
  std::string lang_path;
  std::string inst_path;
};

inline std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

struct Loaded {
  Language lang{1};
  Instance inst;
};

inline Loaded load(const Inputs& in, Json& report, bool with_instance) {
  Loaded l;
  std::string lt = read_input(in.lang_path);
  report["inputs"]["language"] = in.lang_path;
  report["inputs"]["language_digest"] = digest(lt);
  l.lang = parse_language(lt, in.lang_path);
  if (with_instance) {
    std::string it = read_input(in.inst_path);
    report["inputs"]["instance"] = in.inst_path;
    report["inputs"]["instance_digest"] = digest(it);
    l.inst = parse_instance(it, &l.lang, in.inst_path);
  }
  return l;
}

inline Assignment parse_assignment_arg(const std::string& s) {
  Assignment x;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw UsageError("bad label '" + tok + "' in assignment");
    x.push_back(static_cast<Label>(v));
  }
  return x;
}

inline Json fracop_json(const FracOp& w) {
  Json arr = Json::array();
  for (const auto& [g, p] : w.support) arr.push_back(p.to_string() + " : " + g.to_string());
  return arr;
}

inline Json rationals_json(const std::vector<Rational>& v) {
  Json arr = Json::array();
  for (const auto& r : v) arr.push_back(r.to_string());
  return arr;
}

struct Options {
  Inputs in;
  bool json = false;
  unsigned threads = 1;
  std::string assignment;
  bool raw = false;
  int arity = 2;
  std::string op_class = "cyclic";
  bool max_support = false;
  std::string lang_out, inst_out, map_out;
  bool dump = false;
  bool lambda = false;
  int rounds = 8;
};

inline void cmd_eval(const Options& o, Json& r) {
  auto l = load(o.in, r, true);
  Assignment x = parse_assignment_arg(o.assignment);
  r["value"] = evaluate(l.lang, l.inst, x).to_string();
  r["assignment"] = print_assignment(x);
}

inline void cmd_opt(const Options& o, Json& r, const Caps& caps) {
  auto l = load(o.in, r, true);
  auto rep = brute_opt(l.lang, l.inst, caps);
  r["value"] = rep.value.to_string();
  r["optimal_count"] = rep.argmin.size();
  if (!rep.argmin.empty()) r["assignment"] = print_assignment(rep.argmin.front());
}

inline void cmd_feas(const Options& o, Json& r) {
  auto l = load(o.in, r, true);
  auto x = solve_csp(l.lang, l.inst);
  r["feasible"] = x.has_value();
  if (x) r["assignment"] = print_assignment(*x);
  Json sup = Json::array();
  for (const auto& s : supported_labels(l.lang, l.inst, o.threads)) sup.push_back(labels_json(s));
  r["supported"] = sup;
}

inline void cmd_minimize(const Options& o, Json& r) {
  auto l = load(o.in, r, true);
  auto mi = one_infty_minimize(l.lang, l.inst, o.threads);
  Json sup = Json::array();
  for (const auto& s : mi.supported) sup.push_back(labels_json(s));
  r["supported"] = sup;
  std::string lt = print_language(mi.lang), it = print_instance(mi.inst);
  if (!o.lang_out.empty()) {
    write_output(o.lang_out, lt);
    r["language_out"] = o.lang_out;
  } else {
    r["language"] = lt;
  }
  if (!o.inst_out.empty()) {
    write_output(o.inst_out, it);
    r["instance_out"] = o.inst_out;
  } else {
    r["instance"] = it;
  }
}

inline void cmd_blp(const Options& o, Json& r, const Caps& caps) {
  auto l = load(o.in, r, true);
  Language lang = l.lang;
  Instance inst = l.inst;
  r["relaxation"] = o.raw ? "raw" : "minimized";
  if (!o.raw) {
    auto mi = one_infty_minimize(l.lang, l.inst, o.threads);
    lang = std::move(mi.lang);
    inst = std::move(mi.inst);
  }
  auto res = blp_value(lang, inst, caps);
  r["value"] = res.value.to_string();
  r["lp_rows"] = res.lp_rows;
  r["lp_columns"] = res.lp_cols;
  if (res.solution) {
    Json alpha = Json::array();
    for (const auto& a : res.solution->alpha) alpha.push_back(rationals_json(a));
    r["alpha"] = alpha;
  } else {
    r["certificate"] = "farkas";
    r["farkas_entries"] = res.farkas ? res.farkas->size() : 0;
    r["farkas_verified"] = true;  // blp_value throws otherwise
  }
}

inline void cmd_solve(const Options& o, Json& r, const Caps& caps) {
  auto l = load(o.in, r, true);
  SolveOptions so;
  so.threads = o.threads;
  so.caps = caps;
  so.raw = o.raw;
  auto res = solve_vcsp(l.lang, l.inst, so);
  if (res.certified && res.value.is_finite()) {
    if (!res.assignment || evaluate(l.lang, l.inst, *res.assignment) != res.value)
      throw CertificationError("certified assignment does not evaluate to the reported value");
  }
  r["value"] = res.value.to_string();
  r["certified"] = res.certified;
  if (res.assignment) r["assignment"] = print_assignment(*res.assignment);
  r["lp_solves"] = res.lp_solves;
  if (!res.diagnostics.empty()) r["diagnostics"] = res.diagnostics;
}

inline void cmd_analyze(const Options& o, Json& r, const Caps& caps) {
  auto l = load(o.in, r, false);
  if (o.arity < 1) throw UsageError("--arity must be at least 1");
  OpClass cls = parse_op_class(o.op_class);
  FracpolOptions fo;
  fo.caps = caps;
  fo.max_support = o.max_support;
  auto res = find_fracpol(l.lang, o.arity, cls, fo);
  r["arity"] = o.arity;
  r["class"] = to_string(cls);
  r["enumerated"] = res.enumerated;
  r["candidates"] = res.candidates.size();
  r["lp_rows"] = res.lp.rows.size();
  if (res.fracop) {
    if (!verify_fracpol(*res.fracop, l.lang)) throw CertificationError("found weighting failed verification");
    r["found"] = true;
    r["fracop"] = fracop_json(*res.fracop);
    r["verified"] = true;
  } else {
    if (!lp::verify_outcome(res.lp, lp::LPOutcome{lp::Infeasible{*res.farkas}}))
      throw CertificationError("infeasibility certificate failed verification");
    r["found"] = false;
    r["fracop"] = "none";
    r["certificate"] = "farkas";
    r["farkas"] = rationals_json(*res.farkas);
    r["verified"] = true;
  }
  r["note"] = "only arity " + std::to_string(o.arity) + " was checked";
}

inline void cmd_core(const Options& o, Json& r, const Caps& caps) {
  auto l = load(o.in, r, false);
  auto rc = rigid_core(l.lang, caps);
  r["subdomain"] = rc.subdomain;
  r["retraction"] = rc.retraction.to_string();
  r["core_domain"] = rc.core.domain_size();
  r["language"] = print_language(rc.core);
}

inline void cmd_lift(const Options& o, Json& r, const Caps& caps) {
  (void)caps;
  auto l = load(o.in, r, true);
  auto supported = supported_labels(l.lang, l.inst, o.threads);
  bool feasible = std::none_of(supported.begin(), supported.end(), [](const auto& s) { return s.empty(); }) &&
                  l.inst.num_vars > 0;
  r["feasible"] = feasible;
  if (!feasible) {
    r["lift"] = "undefined";
    return;
  }
  auto lift = lift_instance(l.lang, l.inst, supported);
  auto wit = lift_witnesses(l.lang, l.inst, lift.dom_map);
  auto bf = check_block_finite(lift.lang, lift.dom_map.blocks(), wit);
  r["lifted_domain"] = lift.dom_map.size();
  r["block_finite"] = bf.ok;
  if (!bf.ok) r["block_finite_reason"] = bf.reason;
  std::ostringstream dm;
  lift.dom_map.print(dm);
  std::string lt = print_language(lift.lang), it = print_instance(lift.inst);
  auto emit = [&](const std::string& path, const char* key, const std::string& text) {
    if (path.empty()) {
      r[key] = text;
    } else {
      write_output(path, text);
      r[std::string(key) + "_out"] = path;
    }
  };
  emit(o.map_out, "dom_map", dm.str());
  emit(o.lang_out, "language", lt);
  emit(o.inst_out, "instance", it);
}

inline void cmd_opgraph(const Options& o, Json& r, const Caps& caps) {
  auto l = load(o.in, r, false);
  if (o.arity < 2) throw UsageError("--arity must be at least 2");
  FracpolOptions fo;
  fo.caps = caps;
  fo.max_support = true;
  auto found = find_fracpol(l.lang, o.arity - 1, OpClass::Symmetric, fo);
  r["arity"] = o.arity;
  if (!found.fracop) {
    r["generators"] = "none";
    r["note"] = "no symmetric weighting of arity " + std::to_string(o.arity - 1);
    return;
  }
  GenFracOp gens = GenFracOp::from_fracop(*found.fracop);
  if (!verify_gen_fracpol(gens, l.lang)) throw CertificationError("generators failed verification");
  auto G = build_graph(gens, caps);
  r["generators"] = gens.support.size();
  r["nodes"] = G.size();
  r["edges"] = G.edges.size();
  r["sccs"] = G.num_sccs();
  auto sinks = G.sink_nodes();
  r["sink_nodes"] = sinks;
  ExpandOptions eo;
  eo.rebalance_rounds = o.rounds;
  auto ex = expand_support(G, GenFracOp::point(G.nodes[0]), std::set<std::size_t>(sinks.begin(), sinks.end()), eo);
  if (!verify_gen_fracpol(ex.rho, l.lang)) throw CertificationError("expanded weighting failed verification");
  FracOp conv = to_fracop(ex.rho);
  if (!verify_fracpol(conv, l.lang)) throw CertificationError("converted weighting failed verification");
  r["expansion_updates"] = ex.growth_updates + ex.rebalance_updates;
  r["residual_off_sinks"] = ex.residual.to_string();
  r["converted_support"] = conv.support.size();
  r["converted_verified"] = true;
  if (o.lambda) {
    auto st = stationary_lambda(G, caps);
    Json lam = Json::array();
    for (std::size_t i = 0; i < st.nodes.size(); ++i)
      lam.push_back(std::to_string(st.nodes[i]) + " : " + st.lambda[i].to_string());
    r["lambda"] = lam;
  }
  if (o.dump) {
    std::ostringstream os;
    dump_graph(os, G);
    r["graph"] = os.str();
  }
}

/// Entry point shared by the executable and the tests.
inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solver and analyzer for valued constraint satisfaction problems", "vcsp"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "Print the report as JSON");
  app.add_option("--threads", o.threads, "Worker threads for feasibility and self-reduction")->check(CLI::PositiveNumber);

  auto with_files = [&](CLI::App* sub, bool instance) {
    sub->add_option("language", o.in.lang_path, "Language file")->required();
    if (instance) sub->add_option("instance", o.in.inst_path, "Instance file")->required();
  };
  auto* eval = app.add_subcommand("eval", "Evaluate an assignment");
  with_files(eval, true);
  eval->add_option("-x,--assignment", o.assignment, "Labels, space separated")->required();
  auto* opt = app.add_subcommand("opt", "Exhaustive optimum");
  with_files(opt, true);
  auto* feas = app.add_subcommand("feas", "Feasibility and supported labels");
  with_files(feas, true);
  auto* minimize = app.add_subcommand("minimize", "Emit the (1,inf)-minimal instance");
  with_files(minimize, true);
  minimize->add_option("--lang-out", o.lang_out, "Write the language here");
  minimize->add_option("--inst-out", o.inst_out, "Write the instance here");
  auto* blp = app.add_subcommand("blp", "Value of the basic LP relaxation");
  with_files(blp, true);
  blp->add_flag("--raw", o.raw, "Relax the instance as given instead of its (1,inf)-minimal form");
  auto* solve = app.add_subcommand("solve", "Relaxation plus self-reduction");
  with_files(solve, true);
  solve->add_flag("--raw", o.raw, "Skip (1,inf)-minimization");
  auto* analyze = app.add_subcommand("analyze", "Search for a fractional polymorphism");
  with_files(analyze, false);
  analyze->add_option("--arity", o.arity, "Arity m")->required();
  analyze->add_option("--class", o.op_class, "cyclic, symmetric or all")->check(CLI::IsMember({"cyclic", "symmetric", "all"}));
  analyze->add_flag("--max-support", o.max_support, "Grow the support to the union of all solutions");
  auto* core = app.add_subcommand("core", "Rigid core of a language");
  with_files(core, false);
  auto* lift = app.add_subcommand("lift", "Block-finite lifting of an instance");
  with_files(lift, true);
  lift->add_option("--lang-out", o.lang_out, "Write the lifted language here");
  lift->add_option("--inst-out", o.inst_out, "Write the lifted instance here");
  lift->add_option("--map-out", o.map_out, "Write the label map here");
  auto* opgraph = app.add_subcommand("opgraph", "Graph of generalized operations");
  with_files(opgraph, false);
  opgraph->add_option("--arity", o.arity, "Generalized arity m; generators come from arity m-1");
  opgraph->add_flag("--dump", o.dump, "Print the whole graph");
  opgraph->add_flag("--lambda", o.lambda, "Solve for the stationary weights on the sinks");
  opgraph->add_option("--rounds", o.rounds, "Rebalancing passes")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Json report;
  try {
    Caps caps = Caps::from_env();
    auto* sub = app.get_subcommands().front();
    report["command"] = sub->get_name();
    auto t0 = std::chrono::steady_clock::now();
    const std::string name = sub->get_name();
    if (name == "eval") cmd_eval(o, report);
    else if (name == "opt") cmd_opt(o, report, caps);
    else if (name == "feas") cmd_feas(o, report);
    else if (name == "minimize") cmd_minimize(o, report);
    else if (name == "blp") cmd_blp(o, report, caps);
    else if (name == "solve") cmd_solve(o, report, caps);
    else if (name == "analyze") cmd_analyze(o, report, caps);
    else if (name == "core") cmd_core(o, report, caps);
    else if (name == "lift") cmd_lift(o, report, caps);
    else if (name == "opgraph") cmd_opgraph(o, report, caps);
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report["time_ms"] = static_cast<long long>(ms + 0.5);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const CertificationError& e) {
    err << "certification failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (o.json) {
    out << report.dump(2) << "\n";
  } else {
    render_text(out, report, "");
  }
  return 0;
}

}  // namespace vcsp::cli
