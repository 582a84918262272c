#include "cqa/classify.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace cqa {

namespace {

std::set<std::string> head_predicates(const Dependency& d) {
  std::set<std::string> out;
  for (const auto& q : d.head.disjuncts)
    for (const auto& a : q.body.atoms)
      if (!a.is_bottom()) out.insert(a.predicate);
  return out;
}

}  // namespace

DependencyGraph dependency_graph(std::span<const Dependency> deps) {
  DependencyGraph g;
  g.vertices = deps.size();
  for (std::size_t i = 0; i < deps.size(); ++i) {
    auto heads = head_predicates(deps[i]);
    for (std::size_t j = 0; j < deps.size(); ++j) {
      bool hit = std::any_of(deps[j].body.atoms.begin(), deps[j].body.atoms.end(),
                             [&](const Atom& a) { return heads.count(a.predicate) > 0; });
      if (hit) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

bool is_linear(std::span<const Dependency> deps) {
  return std::all_of(deps.begin(), deps.end(), [](const Dependency& d) { return d.is_linear(); });
}

bool is_full(std::span<const Dependency> deps) {
  return std::all_of(deps.begin(), deps.end(), [](const Dependency& d) { return d.is_full(); });
}

std::optional<std::vector<std::size_t>> topological_order(std::span<const Dependency> deps) {
  auto g = dependency_graph(deps);
  std::vector<std::size_t> indeg(g.vertices, 0);
  std::vector<std::vector<std::size_t>> succ(g.vertices);
  for (auto [a, b] : g.edges) {
    if (a == b) return std::nullopt;
    succ[a].push_back(b);
    ++indeg[b];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < g.vertices; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : succ[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  if (order.size() != g.vertices) return std::nullopt;
  return order;
}

bool is_acyclic(std::span<const Dependency> deps) { return topological_order(deps).has_value(); }

DependencySet sorted_topologically(std::span<const Dependency> deps) {
  auto order = topological_order(deps);
  if (!order) throw MethodInapplicable("the dependency set is not acyclic");
  DependencySet out;
  for (auto i : *order) out.push_back(deps[i]);
  return out;
}

Classification classify(std::span<const Dependency> deps) {
  Classification c;
  c.linear = is_linear(deps);
  c.full = is_full(deps);
  c.topo_order = topological_order(deps);
  c.acyclic = c.topo_order.has_value();
  return c;
}

Classification classify(std::span<const Dependency> deps, const FactSet& facts) {
  Classification c = classify(deps);
  c.fdet = is_fdet(deps, facts);
  return c;
}

bool is_fdet(std::span<const Dependency> deps, const FactSet& facts) {
  for (const auto& d : deps) {
    bool ok = for_each_instantiation(d.body, facts, {}, [&](const Substitution& s) {
      return head_images(d, s, facts).size() <= 1;
    });
    if (!ok) return false;
  }
  return true;
}

namespace {

// Every atom of `a` equals some atom of `b`.
FormulaPtr covered(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  std::vector<FormulaPtr> all;
  for (const auto& x : a) {
    std::vector<FormulaPtr> any;
    for (const auto& y : b) {
      if (x.predicate != y.predicate || x.args.size() != y.args.size()) continue;
      std::vector<FormulaPtr> eqs;
      for (std::size_t i = 0; i < x.args.size(); ++i) eqs.push_back(fo::eq(x.args[i], y.args[i]));
      any.push_back(fo::conj(std::move(eqs)));
    }
    all.push_back(fo::disj(std::move(any)));
  }
  return fo::conj(std::move(all));
}

}  // namespace

FormulaPtr build_check_fdet(std::span<const Dependency> deps) {
  FreshNames fresh;
  for (const auto& c : constants_of(deps)) fresh.reserve(c);
  std::vector<FormulaPtr> parts;
  for (const auto& original : deps) {
    Dependency d = rename_apart(original, fresh);
    std::vector<const CQ*> heads;
    for (const auto& q : d.head.disjuncts)
      if (!q.is_bottom()) heads.push_back(&q);
    std::vector<FormulaPtr> pairs;
    for (std::size_t i = 0; i < heads.size(); ++i) {
      for (std::size_t j = i; j < heads.size(); ++j) {
        const CQ& q = *heads[i];
        TermMap prime;
        std::vector<std::string> primed_vars;
        for (const auto& y : heads[j]->exists_vars) {
          auto n = fresh.next(y);
          prime.emplace(y, Term::var(n));
          primed_vars.push_back(n);
        }
        Conjunction q2 = cqa::apply(prime, heads[j]->body);
        auto same_image = fo::conj({covered(q.body.atoms, q2.atoms), covered(q2.atoms, q.body.atoms)});
        auto inner = fo::forall(primed_vars, fo::implies(fo::of(q2), same_image));
        pairs.push_back(fo::forall(q.exists_vars, fo::implies(fo::of(q.body), inner)));
      }
    }
    parts.push_back(fo::forall(d.forall_vars, fo::implies(fo::of(d.body), fo::conj(std::move(pairs)))));
  }
  return fo::conj(std::move(parts));
}

}  // namespace cqa
