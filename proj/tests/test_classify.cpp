#include "doctest.h"

#include "cqa/classify.hpp"
#include "cqa/syntax.hpp"
#include "support.hpp"

using namespace cqa;
using namespace cqa::testing;

TEST_CASE("classes of the example instances") {
  auto ex2 = load("ex2");
  auto c2 = classify(ex2.deps, ex2.facts);
  CHECK(c2.acyclic);
  CHECK_FALSE(c2.linear);
  CHECK_FALSE(c2.full);
  CHECK(c2.fdet == std::optional<bool>(true));
  CHECK(evaluate(build_check_fdet(ex2.deps), ex2.facts));

  auto ex3 = load("ex3");
  auto c3 = classify(ex3.deps);
  CHECK(c3.acyclic);
  CHECK(c3.linear);
  CHECK_FALSE(c3.fdet.has_value());
  CHECK(c3.topo_order == std::optional<std::vector<std::size_t>>({0, 1}));

  auto cyc = parse_dependencies(read_file(fixture_path("cyclic.ded"))).dependencies;
  CHECK_FALSE(is_acyclic(cyc));
  CHECK_FALSE(topological_order(cyc).has_value());
  CHECK_THROWS_AS(sorted_topologically(cyc), MethodInapplicable);
}

TEST_CASE("two cycle and self loop") {
  auto two = parse_dependencies("forall x: A(x) -> exists y: B(y).\nforall x: B(x) -> exists y: A(y).").dependencies;
  CHECK_FALSE(is_acyclic(two));
  auto g = dependency_graph(two);
  CHECK(g.edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}});
  auto self = parse_dependencies("forall x,y: E(x,y) -> exists z: E(y,z).").dependencies;
  CHECK(dependency_graph(self).edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
  CHECK_FALSE(is_acyclic(self));
}

TEST_CASE("topological order ties go to the smaller index") {
  // 2 -> 0 is the only edge
  auto deps = parse_dependencies("forall x: B(x) -> C(x).\nforall x: D(x) -> E(x).\nforall x: A(x) -> B(x).")
                  .dependencies;
  CHECK(topological_order(deps) == std::optional<std::vector<std::size_t>>({1, 2, 0}));
  auto sorted = sorted_topologically(deps);
  CHECK(sorted[0] == deps[1]);
  CHECK(sorted[2] == deps[0]);
}

TEST_CASE("FDET on small cases") {
  auto in = parse_instance("forall x: A(x) -> exists y: B(x,y).", "A(a). B(a,b). B(a,c).");
  CHECK_FALSE(is_fdet(in.deps, in.facts));
  CHECK_FALSE(evaluate(build_check_fdet(in.deps), in.facts));
  CHECK(is_fdet(in.deps, FactSet{}));
  // two disjuncts with the same image count once
  auto same = parse_instance("forall x: A(x) -> B(x) | B(x), B(x).", "A(a). B(a).");
  CHECK(is_fdet(same.deps, same.facts));
  CHECK(evaluate(build_check_fdet(same.deps), same.facts));
  auto dis = parse_instance("forall x: A(x) -> B(x) | C(x).", "A(a). B(a). C(a).");
  CHECK_FALSE(is_fdet(dis.deps, dis.facts));
  CHECK_FALSE(evaluate(build_check_fdet(dis.deps), dis.facts));
  auto full = parse_instance("forall x: A(x) -> B(x).\nforall x,y: B(x), A(y) -> C(x,y).", "A(a). B(a). A(b).");
  CHECK(evaluate(build_check_fdet(full.deps), full.facts));
}

TEST_CASE("random: CheckFDET agrees with the direct check") {
  Generator gen(53);
  std::size_t yes = 0;
  for (int i = 0; i < 500; ++i) {
    auto r = gen.instance(Klass::general, 8, 3);
    bool expected = is_fdet(r.deps, r.facts);
    yes += expected;
    CAPTURE(print_dependencies(r.schema, r.deps));
    CAPTURE(print_facts(r.facts));
    CHECK(evaluate(build_check_fdet(r.deps), r.facts) == expected);
  }
  CHECK(yes > 0);
  CHECK(yes < 500);
}

TEST_CASE("random: graph and order invariants") {
  Generator gen(59);
  for (int i = 0; i < 300; ++i) {
    auto r = gen.instance(i % 3 == 0 ? Klass::acyclic : Klass::general, 4, 4);
    auto g = dependency_graph(r.deps);
    // edges follow the predicate sharing rule exactly
    for (std::size_t a = 0; a < r.deps.size(); ++a)
      for (std::size_t b = 0; b < r.deps.size(); ++b) {
        bool shared = false;
        for (const auto& q : r.deps[a].head.disjuncts)
          for (const auto& h : q.body.atoms)
            for (const auto& x : r.deps[b].body.atoms)
              if (!h.is_bottom() && h.predicate == x.predicate) shared = true;
        bool edge = std::find(g.edges.begin(), g.edges.end(), std::make_pair(a, b)) != g.edges.end();
        CHECK(edge == shared);
      }
    auto c = classify(r.deps);
    CHECK(c.topo_order.has_value() == c.acyclic);
    if (c.topo_order) {
      auto order = *c.topo_order;
      std::vector<std::size_t> pos(order.size());
      for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
      auto sorted = order;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t k = 0; k < sorted.size(); ++k) CHECK(sorted[k] == k);
      for (auto [a, b] : g.edges) CHECK(pos[a] < pos[b]);
    }
    // reversing the dependencies keeps the classes
    DependencySet rev(r.deps.rbegin(), r.deps.rend());
    auto cr = classify(rev);
    CHECK(cr.linear == c.linear);
    CHECK(cr.full == c.full);
    CHECK(cr.acyclic == c.acyclic);
  }
}

TEST_CASE("random: non disjunctive full sets are FDET") {
  Generator gen(61);
  int seen = 0;
  for (int i = 0; i < 2000 && seen < 200; ++i) {
    auto r = gen.instance(Klass::general, 8, 3);
    bool single = std::all_of(r.deps.begin(), r.deps.end(), [](const Dependency& d) { return d.head.disjuncts.size() == 1; });
    if (!single || !is_full(r.deps)) continue;
    ++seen;
    CHECK(is_fdet(r.deps, r.facts));
  }
  CHECK(seen >= 100);
}
