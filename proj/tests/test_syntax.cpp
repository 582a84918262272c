#include "doctest.h"

#include "cqa/syntax.hpp"
#include "support.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

ParseErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.code();
  }
  FAIL("no ParseError raised");
  return ParseErrorCode::syntax;
}

// Random sentences built only from bound variables and constants k0..k2.
class FormulaGen {
 public:
  explicit FormulaGen(std::uint64_t seed) : rng_(seed) {}

  FormulaPtr sentence() {
    bound_.clear();
    return node(4);
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  Term term() {
    if (!bound_.empty() && pick(4) != 0) return Term::var(bound_[pick(bound_.size())]);
    return Term::constant("k" + std::to_string(pick(3)));
  }

  FormulaPtr leaf() {
    switch (pick(5)) {
      case 0:
        return fo::eq(term(), term());
      case 1:
        return fo::neq(term(), term());
      case 2:
        return pick(2) ? fo::truth() : fo::falsity();
      default: {
        static const char* preds[] = {"P", "Q", "R"};
        std::size_t p = pick(3);
        Atom a{preds[p], {}, pick(3) == 0};
        for (std::size_t i = 0; i <= p; ++i) a.args.push_back(term());
        return fo::atom(a);
      }
    }
  }

  FormulaPtr node(int depth) {
    if (depth == 0) return leaf();
    switch (pick(7)) {
      case 0:
        return leaf();
      case 1:
        return fo::negate(node(depth - 1));
      case 2:
      case 3: {
        std::vector<FormulaPtr> parts;
        for (std::size_t i = 0, n = 2 + pick(2); i < n; ++i) parts.push_back(node(depth - 1));
        return pick(2) ? fo::conj(parts) : fo::disj(parts);
      }
      case 4:
        return fo::implies(node(depth - 1), node(depth - 1));
      default: {
        static const char* names[] = {"x", "y", "z", "w"};
        std::vector<std::string> vars{names[pick(4)]};
        if (pick(2)) {
          std::string v2 = names[pick(4)];
          if (v2 != vars[0]) vars.push_back(v2);
        }
        auto n = bound_.size();
        bound_.insert(bound_.end(), vars.begin(), vars.end());
        auto body = node(depth - 1);
        bound_.resize(n);
        return pick(2) ? fo::exists(vars, body) : fo::forall(vars, body);
      }
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> bound_;
};

}  // namespace

TEST_CASE("denial with two body atoms") {
  auto f = parse_dependencies("forall x,y,z: P(x,y), P(x,z), y != z -> false .");
  REQUIRE(f.dependencies.size() == 1);
  const auto& d = f.dependencies[0];
  CHECK(d.body.atoms.size() == 2);
  CHECK(d.body.ineqs.size() == 1);
  REQUIRE(d.head.disjuncts.size() == 1);
  CHECK(d.head.disjuncts[0].is_bottom());
  CHECK(f.schema.arity("P") == 2);
}

TEST_CASE("linear dependency with a head inequality") {
  auto f = parse_dependencies("forall x,y: P(x,y) -> exists z: T(y,z), y != z .");
  const auto& d = f.dependencies[0];
  CHECK(d.is_linear());
  REQUIRE(d.head.disjuncts.size() == 1);
  CHECK(d.head.disjuncts[0].exists_vars == std::vector<std::string>{"z"});
  CHECK(d.head.disjuncts[0].body.atoms.size() == 1);
  CHECK(d.head.disjuncts[0].body.ineqs.size() == 1);
}

TEST_CASE("parse errors carry codes and spans") {
  CHECK(code_of([] { parse_dependencies("forall x: P(x) -> exists y: Q(z) ."); }) == ParseErrorCode::unbound_var);
  CHECK(code_of([] { parse_dependencies("forall x,y: P(x) -> Q(x) ."); }) == ParseErrorCode::safety);
  CHECK(code_of([] { parse_dependencies("P(x) -> Q(x). P(x,y) -> Q(x)."); }) == ParseErrorCode::arity);
  CHECK(code_of([] { parse_dependencies("P/2. P/1."); }) == ParseErrorCode::arity);
  CHECK(code_of([] { parse_dependencies("P(x) -> Q(x"); }) == ParseErrorCode::syntax);
  CHECK(code_of([] { parse_dependencies("P(x) -> Q(x) $"); }) == ParseErrorCode::lex);

  auto ex1 = load("ex1");
  CHECK(code_of([&] { parse_database("P(a).", ex1.schema); }) == ParseErrorCode::arity);
  CHECK(code_of([&] { parse_database("false.", ex1.schema); }) == ParseErrorCode::syntax);
  CHECK(code_of([&] { parse_query("exists x: x != a", ex1.schema); }) == ParseErrorCode::safety);
  CHECK(code_of([&] { parse_query("exists x: Nope(x)", ex1.schema); }) == ParseErrorCode::unknown_predicate);
  CHECK(code_of([&] { parse_query("exists x,x: T(x)", ex1.schema); }) == ParseErrorCode::duplicate_decl);

  std::string text = "A(x) -> B(x).\nforall y: C(y) -> exists u: D(q).";
  try {
    parse_dependencies(text);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.span().line == 2);
    CHECK(e.span().begin <= e.span().end);
    CHECK(e.span().end <= text.size());
    CHECK(text.substr(e.span().begin, e.span().end - e.span().begin) == "q");
    CHECK_FALSE(e.message().empty());
  }
}

TEST_CASE("databases") {
  auto ex1 = load("ex1");
  auto db = parse_database("P(c,a). P(c,b). P(d,c). T(a). T(b). T(a).", ex1.schema);
  CHECK(db.facts.size() == 5);
  CHECK(db.schema.knows_constant("d"));
  CHECK(parse_database("", ex1.schema).facts.empty());
  CHECK(parse_database("# only a comment\n", ex1.schema).facts.empty());
}

TEST_CASE("queries") {
  auto ex1 = load("ex1");
  auto q = parse_query("exists x: P(c,x)", ex1.schema);
  REQUIRE(q.disjuncts.size() == 1);
  CHECK(q.is_boolean());
  CHECK(q.disjuncts[0].body.atoms[0].args[0] == Term::constant("c"));
  CHECK(q.disjuncts[0].body.atoms[0].args[1] == Term::var("x"));
  auto ex3 = load("ex3");
  auto q1 = parse_query("exists x,y,z: T(x,y), T(x,z), y != z", ex3.schema);
  CHECK(q1.disjuncts[0].body.atoms.size() == 2);
  CHECK(q1.disjuncts[0].body.ineqs.size() == 1);
  auto u = parse_query("exists x: T(x) | P(c,c)", ex1.schema);
  CHECK(u.disjuncts.size() == 2);
}

TEST_CASE("one document with several sections") {
  auto doc = parse_document(
      "schema:\nP/2.\nconst c.\ndependencies:\nforall x,y: P(x,y) -> P(y,c).\ndatabase:\nP(a,b).\nquery:\nexists "
      "x: P(x,c)\n",
      Section::dependencies);
  CHECK(doc.dependencies.size() == 1);
  CHECK(doc.dependencies[0].head.disjuncts[0].body.atoms[0].args[1] == Term::constant("c"));
  CHECK(doc.facts.size() == 1);
  REQUIRE(doc.query.has_value());
  CHECK(doc.query->disjuncts.size() == 1);
}

TEST_CASE("printing formulas") {
  CHECK(print_fo(fo::atom(bottom_atom())) == "false");
  auto f = fo::forall({"x"}, fo::implies(fo::atom(make_atom("P", {Term::var("x"), Term::var("x")})), fo::falsity()));
  CHECK(print_fo(f) == "forall x: (P(x,x) -> false)");
  CHECK(same(parse_fo(print_fo(f)), f));
  CHECK(print_fo(fo::atom(aux(make_fact("P", {"a", "b"})))) == "P^aux(a,b)");
}

TEST_CASE("round trip of the fixtures") {
  for (const char* stem : {"ex1", "ex2", "ex3", "cr"}) {
    auto in = load(stem);
    auto text = print_dependencies(in.schema, in.deps);
    auto again = parse_dependencies(text);
    CHECK(again.dependencies == in.deps);
    auto db = parse_database(print_facts(in.facts), again.schema);
    CHECK(db.facts == in.facts);
  }
  auto ex3 = load("ex3");
  for (const char* name : {"q1.q", "q2.q"}) {
    auto q = parse_query(read_file(fixture_path(name)), ex3.schema);
    CHECK(parse_query(print_query(q), ex3.schema) == q);
  }
}

TEST_CASE("random: formula round trip") {
  FormulaGen gen(5);
  for (int i = 0; i < 1000; ++i) {
    auto f = gen.sentence();
    auto text = print_fo(f);
    CAPTURE(text);
    auto back = parse_fo(text);
    CHECK(same(back, f));
    CHECK(print_fo(back) == text);
  }
}

TEST_CASE("random: dependency, database and query round trip") {
  Generator gen(31);
  for (int i = 0; i < 300; ++i) {
    auto r = gen.instance(Klass::general, 8, 4);
    auto text = print_dependencies(r.schema, r.deps);
    CAPTURE(text);
    auto back = parse_dependencies(text);
    CHECK(back.dependencies == r.deps);
    CHECK(parse_database(print_facts(r.facts), back.schema).facts == r.facts);
    auto q = gen.random_query();
    CHECK(parse_query(print_query(q), r.schema) == q);
  }
}

TEST_CASE("unrelated declaration order does not matter") {
  auto a = parse_dependencies("A/1. B/2. forall x: A(x) -> exists y: B(x,y).");
  auto b = parse_dependencies("B/2. A/1. forall x: A(x) -> exists y: B(x,y).");
  CHECK(a.schema == b.schema);
  CHECK(a.dependencies == b.dependencies);
}
