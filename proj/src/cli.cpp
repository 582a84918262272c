#include "cqa/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "cqa/classify.hpp"
#include "cqa/entail.hpp"
#include "cqa/gadgets.hpp"
#include "cqa/repair.hpp"
#include "cqa/syntax.hpp"
#include "cqa/weakcons.hpp"

namespace cqa::cli {
namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A parse error together with the file it came from.
struct FileParseError {
  std::string path;
  ParseError error;
};

struct Options {
  std::string deps;
  std::string db;
  std::string subset;
  std::string query;
  std::string query_file;
  std::string method = "auto";
  std::string semantics = "allrep";
  std::string target;
  std::string aux_subset;
  std::string kind;
  std::string out_dir = ".";
  std::size_t cap = kDefaultCap;
  std::size_t max_atom_sets = kMaxAtomSets;
  std::size_t size = 0;
  std::uint64_t seed = 1;
  bool json = false;
};

struct Inputs {
  Schema schema;
  DependencySet deps;
  FactSet facts;
  std::optional<UCQ> query;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
auto parsing(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw FileParseError{path, e};
  }
}

Inputs load(const Options& o, bool need_db) {
  Inputs in;
  if (o.deps.empty()) throw UsageError("missing dependency file (-c)");
  Document doc = parsing(o.deps, [&] { return parse_document(read_text(o.deps), Section::dependencies); });
  in.schema = doc.schema;
  in.deps = doc.dependencies;
  in.facts = doc.facts;
  in.query = doc.query;
  if (!o.db.empty()) {
    Document d = parsing(o.db, [&] { return parse_document(read_text(o.db), Section::database, in.schema); });
    in.schema = d.schema;
    in.facts.insert_all(d.facts);
    if (d.query) in.query = d.query;
  } else if (need_db && doc.facts.empty()) {
    throw UsageError("missing database file (-d)");
  }
  if (!o.query.empty() && !o.query_file.empty()) throw UsageError("give the query inline (-q) or as a file, not both");
  if (!o.query.empty()) in.query = parsing("<query>", [&] { return parse_query(o.query, in.schema); });
  if (!o.query_file.empty())
    in.query = parsing(o.query_file, [&] { return parse_query(read_text(o.query_file), in.schema); });
  return in;
}

FactSet load_subset(const std::string& path, const Schema& schema) {
  if (path.empty()) throw UsageError("missing subset file (-s)");
  return parsing(path, [&] { return parse_document(read_text(path), Section::database, schema).facts; });
}

const UCQ& need_query(const Inputs& in) {
  if (!in.query) throw UsageError("missing query (-q or --query-file)");
  return *in.query;
}

Json facts_json(const FactSet& f) {
  Json a = Json::array();
  for (const auto& x : f) a.push_back(to_string(x));
  return a;
}

template <typename T>
T parse_enum(const std::optional<T>& v, const std::string& what, const std::string& text) {
  if (!v) throw UsageError("unknown " + what + " '" + text + "'");
  return *v;
}

std::string text_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "none";
  if (v.is_array()) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + text_value(v[i]);
    return s + "}";
  }
  return v.dump();
}

void emit(const Options& o, std::ostream& out, const Json& j) {
  if (o.json) {
    out << j.dump() << "\n";
    return;
  }
  for (const auto& [k, v] : j.items()) {
    if (v.is_array() && !v.empty() && v[0].is_array()) {
      out << k << ":\n";
      for (const auto& row : v) out << "  " << text_value(row) << "\n";
    } else {
      out << k << ": " << text_value(v) << "\n";
    }
  }
}

int verdict(bool b) { return b ? kTrue : kFalse; }

// ---- commands ----

int cmd_classify(const Options& o, std::ostream& out) {
  Inputs in = load(o, false);
  bool with_db = !o.db.empty() || !in.facts.empty();
  Classification c = with_db ? classify(in.deps, in.facts) : classify(in.deps);
  Json j;
  j["acyclic"] = c.acyclic;
  j["linear"] = c.linear;
  j["fdet"] = c.fdet ? Json(*c.fdet) : Json(nullptr);
  j["full"] = c.full;
  j["topological_order"] = c.topo_order ? Json(*c.topo_order) : Json(nullptr);
  emit(o, out, j);
  return kTrue;
}

int cmd_consistent(const Options& o, std::ostream& out) {
  Inputs in = load(o, false);
  bool b = consistent(in.facts, in.deps);
  emit(o, out, Json{{"consistent", b}});
  return verdict(b);
}

int cmd_fdet(const Options& o, std::ostream& out) {
  Inputs in = load(o, false);
  bool b = is_fdet(in.deps, in.facts);
  emit(o, out, Json{{"fdet", b}});
  return verdict(b);
}

int cmd_weakcons(const Options& o, std::ostream& out) {
  Inputs in = load(o, true);
  FactSet s = load_subset(o.subset, in.schema);
  auto m = parse_enum(parse_wc_method(o.method), "method", o.method);
  WCResult r = decide_weak_consistency(s, in.facts, in.deps, m, o.cap);
  Json j;
  j["weakly_consistent"] = r.weakly_consistent;
  j["method"] = to_string(r.method);
  j["witness_superset"] = r.witness ? facts_json(*r.witness) : Json(nullptr);
  emit(o, out, j);
  return verdict(r.weakly_consistent);
}

int cmd_repaircheck(const Options& o, std::ostream& out) {
  Inputs in = load(o, true);
  FactSet s = load_subset(o.subset, in.schema);
  auto m = parse_enum(parse_rc_method(o.method), "method", o.method);
  RCResult r = check_repair(s, in.facts, in.deps, m, o.cap);
  Json j;
  j["is_repair"] = r.is_repair;
  j["method"] = to_string(r.method);
  j["blocking_fact"] = r.blocking_fact ? Json(to_string(*r.blocking_fact)) : Json(nullptr);
  emit(o, out, j);
  return verdict(r.is_repair);
}

int cmd_repairs(const Options& o, std::ostream& out) {
  Inputs in = load(o, true);
  RepairSet rs = enumerate_repairs(in.facts, in.deps, o.cap);
  Json reps = Json::array();
  for (const auto& r : rs.repairs) reps.push_back(facts_json(r));
  Json j;
  j["repairs"] = reps;
  j["intersection"] = facts_json(rs.intersection);
  emit(o, out, j);
  return kTrue;
}

int cmd_entail(const Options& o, std::ostream& out) {
  Inputs in = load(o, true);
  const UCQ& q = need_query(in);
  auto sem = parse_enum(parse_semantics(o.semantics), "semantics", o.semantics);
  auto m = parse_enum(parse_ent_method(o.method), "method", o.method);
  EntResult r = decide_entailment(in.facts, in.deps, q, sem, m, o.cap);
  Json j;
  j["entailed"] = r.entailed;
  j["semantics"] = to_string(r.semantics);
  j["method"] = to_string(r.method);
  if (r.image)
    j["witness"] = facts_json(*r.image);
  else if (r.countermodel)
    j["witness"] = facts_json(*r.countermodel);
  else
    j["witness"] = nullptr;
  emit(o, out, j);
  return verdict(r.entailed);
}

int cmd_rewrite(const Options& o, std::ostream& out) {
  Inputs in = load(o, false);
  const std::string& t = o.target;
  FormulaPtr phi;
  bool uses_aux = false;
  if (t == "check-fdet") {
    phi = build_check_fdet(in.deps);
  } else if (t == "wcons") {
    phi = build_wcons(in.deps);
    uses_aux = true;
  } else if (t == "wcons-al") {
    phi = build_wcons_al(in.deps);
    uses_aux = true;
  } else if (t == "check-repair") {
    phi = build_check_repair(in.deps, in.schema);
    uses_aux = true;
  } else if (t == "qent") {
    phi = build_qent(need_query(in), in.deps, o.max_atom_sets);
  } else if (t == "qent-al") {
    phi = build_qent_al(need_query(in), in.deps);
  } else {
    throw UsageError("unknown rewrite target '" + t + "'");
  }
  Json j;
  j["target"] = t;
  j["sentence"] = print_fo(phi);
  std::optional<bool> holds;
  if (!o.aux_subset.empty()) {
    if (!uses_aux) throw UsageError("--aux-subset applies to wcons, wcons-al and check-repair");
    FactSet aux_facts = load_subset(o.aux_subset, in.schema);
    holds = evaluate(phi, in.facts, aux_facts);
  } else if (!o.db.empty() && !uses_aux) {
    holds = evaluate(phi, in.facts);
  }
  if (holds) j["holds"] = *holds;
  if (o.json)
    out << j.dump() << "\n";
  else {
    out << j["sentence"].get<std::string>() << "\n";
    if (holds) out << "holds: " << (*holds ? "true" : "false") << "\n";
  }
  return holds ? verdict(*holds) : kTrue;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write " + p.string());
  f << text;
}

Json graph_json(const Digraph& g) {
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges) edges.push_back(Json::array({a, b}));
  return Json{{"vertices", g.vertices}, {"edges", edges}, {"s", g.s}, {"t", g.t}};
}

Json horn_json(const HornFormula& f) {
  Json cl = Json::array();
  for (const auto& c : f.clauses)
    cl.push_back(Json{{"positive", c.positive ? Json(*c.positive) : Json(nullptr)}, {"negatives", c.negatives}});
  return Json{{"variables", f.variables}, {"clauses", cl}};
}

int cmd_gadget(const Options& o, std::ostream& out) {
  std::mt19937_64 rng(o.seed);
  std::filesystem::path dir(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  Json truth;
  truth["kind"] = o.kind;
  truth["seed"] = o.seed;
  std::vector<std::string> files;
  auto save = [&](const std::string& stem, const GadgetInstance& gi, bool with_probe) {
    write_file(dir / (stem + ".ded"), print_dependencies(gi.schema, gi.dependencies));
    write_file(dir / (stem + ".db"), print_facts(gi.facts));
    files.push_back(stem + ".ded");
    files.push_back(stem + ".db");
    if (with_probe) {
      write_file(dir / (stem + ".subset.db"), print_facts(gi.probe));
      files.push_back(stem + ".subset.db");
    }
  };
  if (o.kind == "stcon") {
    Digraph g = random_digraph(rng, o.size ? o.size : 8);
    bool r = reachable(g);
    save("stcon_wc", stcon_to_wc(g), true);
    save("stcon_rc", stcon_to_rc(g), true);
    truth["graph"] = graph_json(g);
    truth["reachable"] = r;
    truth["probe_weakly_consistent"] = !r;
    truth["empty_is_repair"] = r;
  } else if (o.kind == "horn3sat") {
    HornFormula f = random_horn(rng, o.size ? o.size : 6);
    bool s = horn_satisfiable(f);
    save("horn3sat", horn3sat_to_wc(f), true);
    truth["formula"] = horn_json(f);
    truth["satisfiable"] = s;
    truth["probe_weakly_consistent"] = s;
  } else {
    throw UsageError("unknown gadget '" + o.kind + "' (stcon or horn3sat)");
  }
  truth["files"] = files;
  write_file(dir / "truth.json", truth.dump(2) + "\n");
  if (o.json)
    out << truth.dump() << "\n";
  else
    for (const auto& f : files) out << (dir / f).string() << "\n";
  return kTrue;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  Inputs in = load(o, true);
  RepairSet rs = enumerate_repairs(in.facts, in.deps, o.cap);
  Json reps = Json::array();
  for (const auto& r : rs.repairs) reps.push_back(facts_json(r));
  Json j;
  j["consistent"] = consistent(in.facts, in.deps);
  j["repairs"] = reps;
  j["intersection"] = facts_json(rs.intersection);
  if (!o.subset.empty()) {
    FactSet s = load_subset(o.subset, in.schema);
    bool wc = std::any_of(rs.repairs.begin(), rs.repairs.end(), [&](const FactSet& r) { return s.is_subset_of(r); });
    j["weakly_consistent"] = wc;
    j["is_repair"] = std::find(rs.repairs.begin(), rs.repairs.end(), s) != rs.repairs.end();
  }
  if (in.query) {
    bool all = std::all_of(rs.repairs.begin(), rs.repairs.end(), [&](const FactSet& r) { return holds(*in.query, r); });
    j["allrep"] = all;
    j["intrep"] = holds(*in.query, rs.intersection);
  }
  emit(o, out, j);
  return kTrue;
}

std::size_t default_cap() {
  if (const char* env = std::getenv("CQA_CAP")) {
    try {
      return std::stoul(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("CQA_CAP is not a number: ") + env);
    }
  }
  return kDefaultCap;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Consistent query answering over tuple-deletion repairs", "cqa"};
  app.require_subcommand(1);

  auto inputs = [&](CLI::App* sc, bool subset, bool query, bool method) {
    sc->add_option("-c,--constraints", o.deps, "dependency file");
    sc->add_option("-d,--database", o.db, "database file");
    if (subset) sc->add_option("-s,--subset", o.subset, "subset of the database");
    if (query) {
      sc->add_option("-q,--query", o.query, "inline Boolean UCQ");
      sc->add_option("--query-file", o.query_file, "file holding the query");
    }
    if (method) sc->add_option("--method", o.method, "method name or auto");
    sc->add_option("--cap", o.cap, "fact limit for exhaustive search");
    sc->add_flag("--json", o.json, "JSON output");
  };

  std::size_t cap_from_env = 0;
  try {
    cap_from_env = default_cap();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  o.cap = cap_from_env;

  inputs(app.add_subcommand("classify", "linear, full, acyclic and FDET classes"), false, false, false);
  inputs(app.add_subcommand("consistent", "is the database consistent"), false, false, false);
  inputs(app.add_subcommand("fdet", "is the dependency set FDET for the database"), false, false, false);
  inputs(app.add_subcommand("weakcons", "is a subset weakly consistent"), true, false, true);
  inputs(app.add_subcommand("repaircheck", "is a subset a repair"), true, false, true);
  inputs(app.add_subcommand("repairs", "enumerate all repairs"), false, false, false);
  auto* entail = app.add_subcommand("entail", "Boolean UCQ entailment");
  inputs(entail, false, true, true);
  entail->add_option("--semantics", o.semantics, "allrep or intrep");
  auto* rewrite = app.add_subcommand("rewrite", "print a first-order rewriting");
  inputs(rewrite, false, true, false);
  rewrite->add_option("--target", o.target, "check-fdet, wcons, wcons-al, check-repair, qent or qent-al")->required();
  rewrite->add_option("--aux-subset", o.aux_subset, "evaluate over D and the aux copy of this subset");
  rewrite->add_option("--max-atom-sets", o.max_atom_sets, "size guard for qent");
  auto* gadget = app.add_subcommand("gadget", "write a reduction instance with its ground truth");
  gadget->add_option("kind", o.kind, "stcon or horn3sat")->required();
  gadget->add_option("--seed", o.seed, "random seed");
  gadget->add_option("--size", o.size, "max vertices or variables");
  gadget->add_option("--out", o.out_dir, "output directory");
  gadget->add_flag("--json", o.json, "JSON output");
  inputs(app.add_subcommand("oracle", "brute force answers from the repair list"), true, true, false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (o.cap > 24) err << "warning: a cap of " << o.cap << " facts may make exhaustive search very slow\n";

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "classify") return cmd_classify(o, out);
    if (cmd == "consistent") return cmd_consistent(o, out);
    if (cmd == "fdet") return cmd_fdet(o, out);
    if (cmd == "weakcons") return cmd_weakcons(o, out);
    if (cmd == "repaircheck") return cmd_repaircheck(o, out);
    if (cmd == "repairs") return cmd_repairs(o, out);
    if (cmd == "entail") return cmd_entail(o, out);
    if (cmd == "rewrite") return cmd_rewrite(o, out);
    if (cmd == "gadget") return cmd_gadget(o, out);
    return cmd_oracle(o, out);
  } catch (const FileParseError& e) {
    const auto& s = e.error.span();
    err << e.path << ":" << s.line << ":" << s.column << ": error[" << to_string(e.error.code())
        << "]: " << e.error.message() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const MethodInapplicable& e) {
    err << "inapplicable: " << e.what() << "\n";
    return kInapplicable;
  } catch (const NotFdet& e) {
    err << "inapplicable: " << e.what() << "\n";
    return kInapplicable;
  } catch (const InstanceTooLarge& e) {
    err << "too large: " << e.what() << "\n";
    return kInapplicable;
  } catch (const FormulaTooLarge& e) {
    err << "too large: " << e.what() << "\n";
    return kInapplicable;
  }
}

}  // namespace cqa::cli
