#include "cqa/core.hpp"

#include <algorithm>

namespace cqa {

namespace {

void push_unique(std::vector<std::string>& out, const std::string& name) {
  if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
}

void collect_vars(const Atom& atom, std::vector<std::string>& out) {
  for (const auto& t : atom.args)
    if (t.is_variable()) push_unique(out, t.name);
}

bool contains_name(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

// Binds `pattern` against a ground `fact`, extending `sigma` in place. Returns
// the variables newly bound so the caller can undo them.
bool match(const Atom& pattern, const Fact& fact, Substitution& sigma, std::vector<std::string>& bound) {
  if (pattern.args.size() != fact.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& t = pattern.args[i];
    const std::string& value = fact.args[i].name;
    if (t.is_constant()) {
      if (t.name != value) return false;
      continue;
    }
    auto it = sigma.find(t.name);
    if (it == sigma.end()) {
      sigma.emplace(t.name, value);
      bound.push_back(t.name);
    } else if (it->second != value) {
      return false;
    }
  }
  return true;
}

bool ineqs_hold(const std::vector<Inequality>& ineqs, const Substitution& sigma) {
  for (const auto& ineq : ineqs) {
    Term l = cqa::apply(sigma, ineq.left);
    Term r = cqa::apply(sigma, ineq.right);
    if (l == r) return false;
  }
  return true;
}

bool search(const Conjunction& conj, const FactSet& facts, std::size_t i, Substitution& sigma,
            const std::function<bool(const Substitution&)>& fn) {
  if (i == conj.atoms.size()) {
    if (!ineqs_hold(conj.ineqs, sigma)) return true;
    return fn(sigma);
  }
  const Atom& atom = conj.atoms[i];
  if (atom.is_bottom()) return true;  // BOT never has an image
  std::vector<std::string> bound;
  for (const Fact& fact : facts.with_predicate(atom.predicate)) {
    bound.clear();
    if (match(atom, fact, sigma, bound)) {
      if (!search(conj, facts, i + 1, sigma, fn)) {
        for (const auto& v : bound) sigma.erase(v);
        return false;
      }
    }
    for (const auto& v : bound) sigma.erase(v);
  }
  return true;
}

}  // namespace

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_constant(); });
}

Atom make_atom(std::string predicate, std::vector<Term> args) {
  return Atom{std::move(predicate), std::move(args), false};
}

Fact make_fact(std::string predicate, const std::vector<std::string>& constants) {
  Fact f{std::move(predicate), {}, false};
  for (const auto& c : constants) f.args.push_back(Term::constant(c));
  return f;
}

Atom bottom_atom() { return Atom{std::string(kBottom), {}, false}; }

std::vector<std::string> variables(const Conjunction& conj) {
  std::vector<std::string> out;
  for (const auto& a : conj.atoms) collect_vars(a, out);
  for (const auto& ineq : conj.ineqs) {
    if (ineq.left.is_variable()) push_unique(out, ineq.left.name);
    if (ineq.right.is_variable()) push_unique(out, ineq.right.name);
  }
  return out;
}

std::vector<std::string> predicate_variables(const Conjunction& conj) {
  std::vector<std::string> out;
  for (const auto& a : conj.atoms) collect_vars(a, out);
  return out;
}

std::vector<std::string> CQ::free_vars() const {
  std::vector<std::string> out;
  for (const auto& v : variables(body))
    if (!contains_name(exists_vars, v)) out.push_back(v);
  return out;
}

bool CQ::is_safe() const { return variables(body).size() == predicate_variables(body).size(); }

bool CQ::is_bottom() const {
  return std::any_of(body.atoms.begin(), body.atoms.end(), [](const Atom& a) { return a.is_bottom(); });
}

bool UCQ::is_boolean() const {
  return std::all_of(disjuncts.begin(), disjuncts.end(), [](const CQ& q) { return q.is_boolean(); });
}

bool UCQ::is_safe() const {
  return std::all_of(disjuncts.begin(), disjuncts.end(), [](const CQ& q) { return q.is_safe(); });
}

bool Dependency::is_full() const {
  return std::all_of(head.disjuncts.begin(), head.disjuncts.end(),
                     [](const CQ& q) { return q.exists_vars.empty(); });
}

Schema::Schema() { arities_.emplace(std::string(kBottom), 0); }

void Schema::declare(const std::string& name, std::size_t arity) {
  auto [it, inserted] = arities_.emplace(name, arity);
  if (!inserted && it->second != arity)
    throw SchemaError("predicate " + name + " used with arity " + std::to_string(arity) +
                      " but declared with arity " + std::to_string(it->second));
}

std::optional<std::size_t> Schema::arity(std::string_view name) const {
  auto it = arities_.find(name);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

bool Schema::knows_constant(std::string_view name) const { return constants_.find(name) != constants_.end(); }

FactSet::FactSet(std::vector<Fact> facts) : facts_(std::move(facts)) {
  std::sort(facts_.begin(), facts_.end());
  facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
}

bool FactSet::contains(const Fact& fact) const { return std::binary_search(facts_.begin(), facts_.end(), fact); }

std::span<const Fact> FactSet::with_predicate(std::string_view predicate) const {
  auto lo = std::lower_bound(facts_.begin(), facts_.end(), predicate,
                             [](const Fact& f, std::string_view p) { return f.predicate < p; });
  auto hi = std::upper_bound(lo, facts_.end(), predicate,
                             [](std::string_view p, const Fact& f) { return p < f.predicate; });
  return {lo, hi};
}

bool FactSet::insert(const Fact& fact) {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), fact);
  if (it != facts_.end() && *it == fact) return false;
  facts_.insert(it, fact);
  return true;
}

bool FactSet::erase(const Fact& fact) {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), fact);
  if (it == facts_.end() || *it != fact) return false;
  facts_.erase(it);
  return true;
}

void FactSet::insert_all(const FactSet& other) { *this = set_union(*this, other); }

bool FactSet::is_subset_of(const FactSet& other) const {
  return std::includes(other.facts_.begin(), other.facts_.end(), facts_.begin(), facts_.end());
}

std::size_t FactSet::index_of(const Fact& fact) const {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), fact);
  if (it == facts_.end() || *it != fact) return facts_.size();
  return static_cast<std::size_t>(it - facts_.begin());
}

FactSet set_union(const FactSet& a, const FactSet& b) {
  std::vector<Fact> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FactSet(std::move(out));
}

FactSet set_difference(const FactSet& a, const FactSet& b) {
  std::vector<Fact> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FactSet(std::move(out));
}

FactSet set_intersection(const FactSet& a, const FactSet& b) {
  std::vector<Fact> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FactSet(std::move(out));
}

Term apply(const Substitution& sigma, const Term& term) {
  if (term.is_constant()) return term;
  auto it = sigma.find(term.name);
  return it == sigma.end() ? term : Term::constant(it->second);
}

Atom apply(const Substitution& sigma, const Atom& atom) {
  Atom out{atom.predicate, {}, atom.aux};
  out.args.reserve(atom.args.size());
  for (const auto& t : atom.args) out.args.push_back(cqa::apply(sigma, t));
  return out;
}

Inequality apply(const Substitution& sigma, const Inequality& ineq) {
  return {cqa::apply(sigma, ineq.left), cqa::apply(sigma, ineq.right)};
}

Conjunction apply(const Substitution& sigma, const Conjunction& conj) {
  Conjunction out;
  for (const auto& a : conj.atoms) out.atoms.push_back(cqa::apply(sigma, a));
  for (const auto& i : conj.ineqs) out.ineqs.push_back(cqa::apply(sigma, i));
  return out;
}

void check_schema(const Schema& schema, const Conjunction& conj) {
  for (const auto& atom : conj.atoms) {
    auto arity = schema.arity(atom.predicate);
    if (!arity) throw SchemaError("unknown predicate " + atom.predicate);
    if (*arity != atom.args.size())
      throw SchemaError("predicate " + atom.predicate + " expects " + std::to_string(*arity) +
                        " arguments, got " + std::to_string(atom.args.size()));
  }
}

void check_schema(const Schema& schema, const UCQ& query) {
  for (const auto& q : query.disjuncts) check_schema(schema, q.body);
}

void check_schema(const Schema& schema, const Dependency& dep) {
  check_schema(schema, dep.body);
  check_schema(schema, dep.head);
}

bool for_each_instantiation(const Conjunction& conj, const FactSet& facts, const Substitution& seed,
                            const std::function<bool(const Substitution&)>& fn) {
  Substitution sigma = seed;
  return search(conj, facts, 0, sigma, fn);
}

std::vector<Substitution> instantiations(const Conjunction& conj, const FactSet& facts) {
  std::vector<Substitution> out;
  for_each_instantiation(conj, facts, {}, [&](const Substitution& s) {
    out.push_back(s);
    return true;
  });
  const auto order = variables(conj);
  auto key = [&](const Substitution& s) {
    std::vector<std::string> k;
    for (const auto& v : order) {
      auto it = s.find(v);
      k.push_back(it == s.end() ? std::string() : it->second);
    }
    return k;
  };
  std::sort(out.begin(), out.end(), [&](const Substitution& a, const Substitution& b) { return key(a) < key(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Substitution> instantiations(const Conjunction& conj, const Database& db) {
  check_schema(db.schema, conj);
  return instantiations(conj, db.facts);
}

FactSet image(const Conjunction& conj, const Substitution& sigma) {
  std::vector<Fact> out;
  for (const auto& a : conj.atoms) {
    Atom g = cqa::apply(sigma, a);
    if (!g.is_ground()) throw UnboundVariable("image: atom " + to_string(a) + " has an unbound variable");
    out.push_back(std::move(g));
  }
  return FactSet(std::move(out));
}

std::vector<FactSet> images_of_ucq(const UCQ& query, const FactSet& facts) {
  std::set<FactSet> seen;
  for (const auto& q : query.disjuncts) {
    for_each_instantiation(q.body, facts, {}, [&](const Substitution& s) {
      seen.insert(image(q.body, s));
      return true;
    });
  }
  return {seen.begin(), seen.end()};
}

std::vector<FactSet> images_of_ucq(const UCQ& query, const Database& db) {
  if (!query.is_boolean()) throw SchemaError("query is not Boolean");
  if (!query.is_safe()) throw SchemaError("query is not safe");
  check_schema(db.schema, query);
  return images_of_ucq(query, db.facts);
}

bool holds(const UCQ& query, const FactSet& facts) {
  for (const auto& q : query.disjuncts) {
    bool found = !for_each_instantiation(q.body, facts, {}, [](const Substitution&) { return false; });
    if (found) return true;
  }
  return false;
}

std::vector<FactSet> head_images(const Dependency& dep, const Substitution& body_sigma, const FactSet& facts) {
  std::set<FactSet> seen;
  for (const auto& q : dep.head.disjuncts) {
    for_each_instantiation(q.body, facts, body_sigma, [&](const Substitution& s) {
      seen.insert(image(q.body, s));
      return true;
    });
  }
  return {seen.begin(), seen.end()};
}

bool has_head_image(const Dependency& dep, const Substitution& body_sigma, const FactSet& facts) {
  for (const auto& q : dep.head.disjuncts) {
    bool found = !for_each_instantiation(q.body, facts, body_sigma, [](const Substitution&) { return false; });
    if (found) return true;
  }
  return false;
}

bool satisfies(const FactSet& facts, const Dependency& dep) {
  return for_each_instantiation(dep.body, facts, {},
                                [&](const Substitution& s) { return has_head_image(dep, s, facts); });
}

bool satisfies(const Database& db, const Dependency& dep) {
  check_schema(db.schema, dep);
  return satisfies(db.facts, dep);
}

bool consistent(const FactSet& facts, std::span<const Dependency> deps) {
  return std::all_of(deps.begin(), deps.end(), [&](const Dependency& d) { return satisfies(facts, d); });
}

bool consistent(const Database& db, std::span<const Dependency> deps) {
  for (const auto& d : deps) check_schema(db.schema, d);
  return consistent(db.facts, deps);
}

std::vector<std::string> predicates_of(std::span<const Dependency> deps) {
  std::set<std::string> preds;
  auto add = [&](const Conjunction& c) {
    for (const auto& a : c.atoms)
      if (!a.is_bottom()) preds.insert(a.predicate);
  };
  for (const auto& d : deps) {
    add(d.body);
    for (const auto& q : d.head.disjuncts) add(q.body);
  }
  return {preds.begin(), preds.end()};
}

namespace {
void add_constants(const Conjunction& c, std::set<std::string>& out) {
  for (const auto& a : c.atoms)
    for (const auto& t : a.args)
      if (t.is_constant()) out.insert(t.name);
  for (const auto& i : c.ineqs) {
    if (i.left.is_constant()) out.insert(i.left.name);
    if (i.right.is_constant()) out.insert(i.right.name);
  }
}
}  // namespace

std::set<std::string> constants_of(std::span<const Dependency> deps) {
  std::set<std::string> out;
  for (const auto& d : deps) {
    add_constants(d.body, out);
    for (const auto& q : d.head.disjuncts) add_constants(q.body, out);
  }
  return out;
}

std::set<std::string> constants_of(const UCQ& query) {
  std::set<std::string> out;
  for (const auto& q : query.disjuncts) add_constants(q.body, out);
  return out;
}

std::string to_string(const Term& term) { return term.name; }

std::string to_string(const Atom& atom) {
  if (atom.is_bottom()) return "false";
  std::string out = atom.predicate;
  if (atom.aux) out += "^aux";
  out += '(';
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += atom.args[i].name;
  }
  out += ')';
  return out;
}

std::string to_string(const FactSet& facts) {
  std::string out = "{";
  bool first = true;
  for (const auto& f : facts) {
    if (!first) out += ", ";
    first = false;
    out += to_string(f);
  }
  return out + "}";
}

}  // namespace cqa
