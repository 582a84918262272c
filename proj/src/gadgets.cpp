#include "cqa/gadgets.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "cqa/syntax.hpp"

namespace cqa {

namespace {

constexpr const char* kStconDeps = R"(
forall x,y,z: Succ(x,y,z), y != 0 -> Vert(y).
forall x,y,z: Succ(x,y,z) -> exists w: Succ(x,z,w).
forall x: Vert(x) -> exists y: Succ(x,0,y).
)";

constexpr const char* kStartDeps = R"(
forall x: Start(x) -> Vert(x).
forall x: Vert(x) -> exists y: Start(y).
forall x,y,z: Succ(x,y,z) -> exists w: Start(w).
)";

constexpr const char* kHornDeps = R"(
forall x: C(0,0,x) -> A(x).
forall x,y: C(x,0,y), A(x) -> A(y).
forall x,y,z: C(x,y,z), A(x), A(y) -> A(z).
forall x: C_f(x,0,0), A(x) -> false.
forall x,y: C_f(x,y,0), A(x), A(y) -> false.
forall x,y,z: C_f(x,y,z), A(x), A(y), A(z) -> false.
)";

void check_graph(const Digraph& g) {
  std::set<std::string> vs(g.vertices.begin(), g.vertices.end());
  if (vs.count("0")) throw SchemaError("vertex name 0 is reserved");
  if (!vs.count(g.s) || !vs.count(g.t)) throw SchemaError("s and t must be vertices");
  for (const auto& [a, b] : g.edges)
    if (!vs.count(a) || !vs.count(b)) throw SchemaError("edge " + a + "->" + b + " uses an unknown vertex");
}

GadgetInstance from_text(const std::string& deps, std::vector<Fact> facts) {
  auto file = parse_dependencies(deps);
  GadgetInstance out;
  out.schema = file.schema;
  out.dependencies = file.dependencies;
  out.facts = FactSet(std::move(facts));
  for (const auto& f : out.facts)
    for (const auto& t : f.args) out.schema.register_constant(t.name);
  return out;
}

std::vector<Fact> stcon_facts(const Digraph& g) {
  check_graph(g);
  std::vector<Fact> facts;
  for (const auto& a : g.vertices) {
    if (a != g.t) facts.push_back(make_fact("Vert", {a}));
    std::vector<std::string> succ;
    for (const auto& [x, y] : g.edges)
      if (x == a && std::find(succ.begin(), succ.end(), y) == succ.end()) succ.push_back(y);
    std::string prev = "0";
    for (const auto& b : succ) {
      facts.push_back(make_fact("Succ", {a, prev, b}));
      prev = b;
    }
    facts.push_back(make_fact("Succ", {a, prev, "0"}));
  }
  return facts;
}

}  // namespace

bool reachable(const Digraph& g) {
  std::set<std::string> seen{g.s};
  std::deque<std::string> queue{g.s};
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    if (v == g.t) return true;
    for (const auto& [a, b] : g.edges)
      if (a == v && seen.insert(b).second) queue.push_back(b);
  }
  return false;
}

bool horn_satisfiable(const HornFormula& f) {
  std::set<std::string> truth;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : f.clauses) {
      bool fired = std::all_of(c.negatives.begin(), c.negatives.end(),
                               [&](const std::string& v) { return truth.count(v) > 0; });
      if (!fired) continue;
      if (!c.positive) return false;
      changed |= truth.insert(*c.positive).second;
    }
  }
  return true;
}

GadgetInstance stcon_to_wc(const Digraph& g) {
  auto out = from_text(kStconDeps, stcon_facts(g));
  out.probe = FactSet{make_fact("Vert", {g.s})};
  return out;
}

GadgetInstance stcon_to_rc(const Digraph& g) {
  auto facts = stcon_facts(g);
  facts.push_back(make_fact("Start", {g.s}));
  return from_text(std::string(kStconDeps) + kStartDeps, std::move(facts));
}

GadgetInstance horn3sat_to_wc(const HornFormula& f) {
  std::vector<Fact> clauses;
  for (const auto& c : f.clauses) {
    const auto& n = c.negatives;
    if (c.positive) {
      if (n.size() > 2) throw SchemaError("a clause has more than three literals");
      if (n.empty()) clauses.push_back(make_fact("C", {"0", "0", *c.positive}));
      else if (n.size() == 1) clauses.push_back(make_fact("C", {n[0], "0", *c.positive}));
      else clauses.push_back(make_fact("C", {n[0], n[1], *c.positive}));
    } else {
      if (n.empty()) throw SchemaError("empty clause");
      if (n.size() > 3) throw SchemaError("a clause has more than three literals");
      std::vector<std::string> args = n;
      args.resize(3, "0");
      clauses.push_back(make_fact("C_f", args));
    }
  }
  std::vector<Fact> facts = clauses;
  for (const auto& v : f.variables) {
    if (v == "0") throw SchemaError("variable name 0 is reserved");
    facts.push_back(make_fact("A", {v}));
  }
  auto out = from_text(kHornDeps, std::move(facts));
  out.probe = FactSet(std::move(clauses));
  return out;
}

Digraph random_digraph(std::mt19937_64& rng, std::size_t max_vertices, double edge_probability) {
  std::uniform_int_distribution<std::size_t> count(1, std::max<std::size_t>(1, max_vertices));
  std::bernoulli_distribution edge(edge_probability);
  Digraph g;
  std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (edge(rng)) g.edges.emplace_back(g.vertices[i], g.vertices[j]);
  std::shuffle(g.edges.begin(), g.edges.end(), rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  g.s = g.vertices[pick(rng)];
  g.t = g.vertices[pick(rng)];
  return g;
}

HornFormula random_horn(std::mt19937_64& rng, std::size_t max_variables, std::size_t max_clauses) {
  HornFormula f;
  std::uniform_int_distribution<std::size_t> nv(1, std::max<std::size_t>(1, max_variables));
  std::size_t n = nv(rng);
  for (std::size_t i = 0; i < n; ++i) f.variables.push_back("v" + std::to_string(i + 1));
  std::uniform_int_distribution<std::size_t> nc(1, std::max<std::size_t>(1, max_clauses));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> len(1, 3);
  std::bernoulli_distribution has_positive(0.7);
  std::size_t clauses = nc(rng);
  for (std::size_t i = 0; i < clauses; ++i) {
    HornClause c;
    int size = len(rng);
    bool pos = has_positive(rng);
    if (pos) c.positive = f.variables[pick(rng)];
    for (int j = pos ? 1 : 0; j < size; ++j) c.negatives.push_back(f.variables[pick(rng)]);
    f.clauses.push_back(std::move(c));
  }
  return f;
}

}  // namespace cqa
