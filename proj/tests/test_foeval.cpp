#include "doctest.h"

#include "cqa/classify.hpp"
#include "cqa/formula.hpp"
#include "cqa/repair.hpp"
#include "cqa/syntax.hpp"
#include "cqa/weakcons.hpp"
#include "support.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

Atom atom(const std::string& p, std::vector<Term> args) { return make_atom(p, std::move(args)); }
Term v(const char* n) { return Term::var(n); }
Term c(const char* n) { return Term::constant(n); }

std::vector<std::string> vars_of(const Atom& a, const Atom& b) {
  std::set<std::string> s;
  for (const auto* x : {&a, &b})
    for (const auto& t : x->args)
      if (t.is_variable()) s.insert(t.name);
  return {s.begin(), s.end()};
}

Atom ground(const Atom& a, const Substitution& g) { return cqa::apply(g, a); }

// Calls fn on every assignment of `vars` over `pool`.
void each_assignment(const std::vector<std::string>& vars, const std::vector<std::string>& pool,
                     const std::function<void(const Substitution&)>& fn) {
  Substitution g;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == vars.size()) return fn(g);
    for (const auto& p : pool) {
      g[vars[i]] = p;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace

TEST_CASE("basic evaluation") {
  CHECK(evaluate(fo::truth(), FactSet{}));
  CHECK_FALSE(evaluate(fo::falsity(), FactSet{}));
  auto ex1 = load("ex1");
  auto phi = fo::of(query("exists x: P(c,x)", ex1.schema));
  CHECK(evaluate(phi, ex1.facts));
  CHECK_FALSE(evaluate(phi, facts("P(d,c).", ex1.schema)));
  CHECK_FALSE(evaluate(fo::atom(bottom_atom()), ex1.facts));
}

TEST_CASE("WCons of the acyclic FDET example on the bad subset") {
  auto ex2 = load("ex2");
  CHECK_FALSE(evaluate(build_wcons(ex2.deps), ex2.facts, facts("P(e,f). T(e,g).", ex2.schema)));
}

TEST_CASE("aux copies") {
  CHECK(to_string(aux(make_fact("P", {"a", "b"}))) == "P^aux(a,b)");
  auto ex2 = load("ex2");
  auto copy = aux(facts("P(a,b). T(a,c).", ex2.schema));
  REQUIRE(copy.size() == 2);
  CHECK(copy[0] == aux(make_fact("P", {"a", "b"})));
  CHECK(copy[1] == aux(make_fact("T", {"a", "c"})));
  CHECK_THROWS_AS(aux(aux(make_fact("P", {"a", "b"}))), SchemaError);
  auto f = aux(fo::atom(make_fact("P", {"a", "b"})));
  CHECK(evaluate(f, FactSet{}, FactSet{make_fact("P", {"a", "b"})}));
  CHECK_FALSE(evaluate(f, FactSet{make_fact("P", {"a", "b"})}));
}

TEST_CASE("unification examples") {
  auto m = unify_atoms(atom("T", {c("e"), v("z1")}), atom("T", {v("y"), v("z")}));
  REQUIRE(m.has_value());
  auto a = cqa::apply(*m, atom("T", {c("e"), v("z1")}));
  CHECK(a == cqa::apply(*m, atom("T", {v("y"), v("z")})));
  CHECK(a.args[0] == c("e"));
  CHECK_FALSE(unify_atoms(atom("P", {v("x"), v("x")}), atom("P", {c("a"), c("b")})).has_value());
  CHECK_FALSE(unify_atoms(atom("P", {v("x")}), atom("Q", {v("x")})).has_value());
}

TEST_CASE("unbound variables are reported") {
  auto f = fo::atom(atom("P", {v("x")}));
  CHECK_THROWS_AS(evaluate(f, FactSet{make_fact("P", {"a"})}), UnboundVariable);
}

TEST_CASE("random: unifiers are sound and most general") {
  std::mt19937_64 rng(41);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const std::vector<std::string> left{"x1", "x2"}, right{"y1", "y2"}, consts{"a", "b"};
  auto term = [&](const std::vector<std::string>& vs) {
    return pick(3) == 0 ? Term::constant(consts[pick(2)]) : Term::var(vs[pick(2)]);
  };
  const std::vector<std::string> pool{"a", "b", "c", "d", "e"};
  for (int i = 0; i < 500; ++i) {
    std::size_t n = 1 + pick(3);
    Atom a{"P", {}, false}, b{"P", {}, false};
    for (std::size_t k = 0; k < n; ++k) {
      a.args.push_back(term(left));
      b.args.push_back(term(right));
    }
    auto m = unify_atoms(a, b);
    CAPTURE(to_string(a));
    CAPTURE(to_string(b));
    if (m) CHECK(cqa::apply(*m, a) == cqa::apply(*m, b));
    bool any = false;
    each_assignment(vars_of(a, b), pool, [&](const Substitution& g) {
      if (ground(a, g) != ground(b, g)) return;
      any = true;
      // every ground unifier factors through the MGU
      if (m) CHECK(ground(cqa::apply(*m, a), g) == ground(a, g));
    });
    CHECK(any == m.has_value());
  }
}

TEST_CASE("random: fresh constants never change constructed sentences") {
  Generator gen(43);
  for (int i = 0; i < 150; ++i) {
    auto r = gen.instance(i % 2 ? Klass::acyclic_fdet : Klass::acyclic_linear, 6, 3);
    auto s = gen.random_subset(r.facts);
    std::vector<FormulaPtr> sentences{build_wcons(r.deps), build_check_fdet(r.deps),
                                      build_check_repair(r.deps, r.schema), fo::of(r.deps)};
    if (is_linear(r.deps)) sentences.push_back(build_wcons_al(r.deps));
    for (const auto& phi : sentences) {
      EvalContext small{r.facts, s, {}};
      EvalContext big{r.facts, s, {"fresh1", "fresh2", "fresh3"}};
      CHECK(evaluate(phi, small) == evaluate(phi, big));
    }
  }
}

TEST_CASE("random: quantifier duality") {
  Generator gen(47);
  for (int i = 0; i < 200; ++i) {
    auto r = gen.instance(Klass::general, 6, 2);
    auto q = fo::of(gen.random_query());
    // not not q, and exists as not forall not
    CHECK(evaluate(fo::negate(fo::negate(q)), r.facts) == evaluate(q, r.facts));
    auto body = fo::atom(make_atom("p0", {Term::var("u")}));
    if (r.schema.arity("p0") != 1) continue;
    auto ex = fo::exists({"u"}, body);
    auto fa = fo::negate(fo::forall({"u"}, fo::negate(body)));
    CHECK(evaluate(ex, r.facts) == evaluate(fa, r.facts));
  }
}
