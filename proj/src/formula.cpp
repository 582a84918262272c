#include "cqa/formula.hpp"

#include <algorithm>

namespace cqa {

using K = Formula::Kind;

bool operator==(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case K::atom:
      return a.atom == b.atom;
    case K::eq:
    case K::neq:
      return a.left == b.left && a.right == b.right;
    case K::truth:
    case K::falsity:
      return true;
    default:
      break;
  }
  if (a.vars != b.vars || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same(a.children[i], b.children[i])) return false;
  return true;
}

bool same(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

namespace fo {

namespace {
FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

const FormulaPtr& true_node() {
  static const FormulaPtr node = make(Formula{K::truth, {}, {}, {}, {}, {}});
  return node;
}
const FormulaPtr& false_node() {
  static const FormulaPtr node = make(Formula{K::falsity, {}, {}, {}, {}, {}});
  return node;
}

FormulaPtr nary(K kind, std::vector<FormulaPtr> parts) {
  const K neutral = kind == K::conjunction ? K::truth : K::falsity;
  const K absorbing = kind == K::conjunction ? K::falsity : K::truth;
  std::vector<FormulaPtr> flat;
  for (auto& p : parts) {
    if (p->kind == neutral) continue;
    if (p->kind == absorbing) return p;
    if (p->kind == kind) {
      flat.insert(flat.end(), p->children.begin(), p->children.end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return kind == K::conjunction ? truth() : falsity();
  if (flat.size() == 1) return flat.front();
  Formula f;
  f.kind = kind;
  f.children = std::move(flat);
  return make(std::move(f));
}

FormulaPtr quant(K kind, std::vector<std::string> vars, FormulaPtr body) {
  if (vars.empty() || body->kind == K::truth || body->kind == K::falsity) return body;
  if (body->kind == kind) {
    bool clash = std::any_of(body->vars.begin(), body->vars.end(), [&](const std::string& v) {
      return std::find(vars.begin(), vars.end(), v) != vars.end();
    });
    if (!clash) {
      vars.insert(vars.end(), body->vars.begin(), body->vars.end());
      body = body->children.front();
    }
  }
  Formula f;
  f.kind = kind;
  f.vars = std::move(vars);
  f.children = {std::move(body)};
  return make(std::move(f));
}
}  // namespace

FormulaPtr truth() { return true_node(); }
FormulaPtr falsity() { return false_node(); }

FormulaPtr atom(Atom a) {
  if (a.is_bottom()) return falsity();
  Formula f;
  f.kind = K::atom;
  f.atom = std::move(a);
  return make(std::move(f));
}

FormulaPtr eq(Term l, Term r) {
  if (l == r) return truth();
  if (l.is_constant() && r.is_constant()) return falsity();
  Formula f;
  f.kind = K::eq;
  f.left = std::move(l);
  f.right = std::move(r);
  return make(std::move(f));
}

FormulaPtr neq(Term l, Term r) {
  if (l == r) return falsity();
  if (l.is_constant() && r.is_constant()) return truth();
  Formula f;
  f.kind = K::neq;
  f.left = std::move(l);
  f.right = std::move(r);
  return make(std::move(f));
}

FormulaPtr negate(FormulaPtr g) {
  if (g->kind == K::truth) return falsity();
  if (g->kind == K::falsity) return truth();
  Formula f;
  f.kind = K::negation;
  f.children = {std::move(g)};
  return make(std::move(f));
}

FormulaPtr conj(std::vector<FormulaPtr> parts) { return nary(K::conjunction, std::move(parts)); }
FormulaPtr disj(std::vector<FormulaPtr> parts) { return nary(K::disjunction, std::move(parts)); }

FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs) {
  if (lhs->kind == K::truth) return rhs;
  if (lhs->kind == K::falsity || rhs->kind == K::truth) return truth();
  Formula f;
  f.kind = K::implication;
  f.children = {std::move(lhs), std::move(rhs)};
  return make(std::move(f));
}

FormulaPtr exists(std::vector<std::string> vars, FormulaPtr body) {
  return quant(K::exists, std::move(vars), std::move(body));
}

FormulaPtr forall(std::vector<std::string> vars, FormulaPtr body) {
  return quant(K::forall, std::move(vars), std::move(body));
}

FormulaPtr of(const Conjunction& c) {
  std::vector<FormulaPtr> parts;
  for (const auto& a : c.atoms) parts.push_back(atom(a));
  for (const auto& i : c.ineqs) parts.push_back(neq(i.left, i.right));
  return conj(std::move(parts));
}

FormulaPtr of(const CQ& q) { return exists(q.exists_vars, of(q.body)); }

FormulaPtr of(const UCQ& q) {
  std::vector<FormulaPtr> parts;
  for (const auto& d : q.disjuncts) parts.push_back(of(d));
  return disj(std::move(parts));
}

FormulaPtr of(const Dependency& d) { return forall(d.forall_vars, implies(of(d.body), of(d.head))); }

FormulaPtr of(std::span<const Dependency> deps) {
  std::vector<FormulaPtr> parts;
  for (const auto& d : deps) parts.push_back(of(d));
  return conj(std::move(parts));
}

}  // namespace fo

Term apply(const TermMap& map, const Term& t) {
  if (!t.is_variable()) return t;
  auto it = map.find(t.name);
  return it == map.end() ? t : it->second;
}

Atom apply(const TermMap& map, const Atom& a) {
  Atom out{a.predicate, {}, a.aux};
  for (const auto& t : a.args) out.args.push_back(cqa::apply(map, t));
  return out;
}

Conjunction apply(const TermMap& map, const Conjunction& c) {
  Conjunction out;
  for (const auto& a : c.atoms) out.atoms.push_back(cqa::apply(map, a));
  for (const auto& i : c.ineqs) out.ineqs.push_back({cqa::apply(map, i.left), cqa::apply(map, i.right)});
  return out;
}

FormulaPtr substitute(const FormulaPtr& f, const TermMap& map) {
  if (map.empty()) return f;
  switch (f->kind) {
    case K::atom:
      return fo::atom(cqa::apply(map, f->atom));
    case K::eq:
      return fo::eq(cqa::apply(map, f->left), cqa::apply(map, f->right));
    case K::neq:
      return fo::neq(cqa::apply(map, f->left), cqa::apply(map, f->right));
    case K::truth:
    case K::falsity:
      return f;
    case K::negation:
      return fo::negate(substitute(f->children[0], map));
    case K::conjunction:
    case K::disjunction: {
      std::vector<FormulaPtr> parts;
      for (const auto& c : f->children) parts.push_back(substitute(c, map));
      return f->kind == K::conjunction ? fo::conj(std::move(parts)) : fo::disj(std::move(parts));
    }
    case K::implication:
      return fo::implies(substitute(f->children[0], map), substitute(f->children[1], map));
    case K::exists:
    case K::forall: {
      TermMap inner = map;
      for (const auto& v : f->vars) inner.erase(v);
      auto body = substitute(f->children[0], inner);
      return f->kind == K::exists ? fo::exists(f->vars, body) : fo::forall(f->vars, body);
    }
  }
  return f;
}

FormulaPtr map_atoms(const FormulaPtr& f, const std::function<FormulaPtr(const Atom&)>& fn) {
  switch (f->kind) {
    case K::atom:
      return fn(f->atom);
    case K::eq:
    case K::neq:
    case K::truth:
    case K::falsity:
      return f;
    case K::negation:
      return fo::negate(map_atoms(f->children[0], fn));
    case K::conjunction:
    case K::disjunction: {
      std::vector<FormulaPtr> parts;
      for (const auto& c : f->children) parts.push_back(map_atoms(c, fn));
      return f->kind == K::conjunction ? fo::conj(std::move(parts)) : fo::disj(std::move(parts));
    }
    case K::implication:
      return fo::implies(map_atoms(f->children[0], fn), map_atoms(f->children[1], fn));
    case K::exists:
      return fo::exists(f->vars, map_atoms(f->children[0], fn));
    case K::forall:
      return fo::forall(f->vars, map_atoms(f->children[0], fn));
  }
  return f;
}

Atom aux(const Atom& a) {
  if (a.aux) throw SchemaError("atom " + to_string(a) + " is already auxiliary");
  Atom out = a;
  out.aux = true;
  return out;
}

FormulaPtr aux(const FormulaPtr& f) {
  return map_atoms(f, [](const Atom& a) { return fo::atom(aux(a)); });
}

std::vector<Atom> aux(const FactSet& facts) {
  std::vector<Atom> out;
  for (const auto& f : facts) out.push_back(aux(f));
  return out;
}

namespace {

void collect_free(const FormulaPtr& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  auto term = [&](const Term& t) {
    if (t.is_variable() && std::find(bound.begin(), bound.end(), t.name) == bound.end()) out.insert(t.name);
  };
  switch (f->kind) {
    case K::atom:
      for (const auto& t : f->atom.args) term(t);
      return;
    case K::eq:
    case K::neq:
      term(f->left);
      term(f->right);
      return;
    case K::exists:
    case K::forall: {
      const auto n = bound.size();
      bound.insert(bound.end(), f->vars.begin(), f->vars.end());
      collect_free(f->children[0], bound, out);
      bound.resize(n);
      return;
    }
    default:
      for (const auto& c : f->children) collect_free(c, bound, out);
  }
}

void collect_constants(const FormulaPtr& f, std::set<std::string>& out) {
  auto term = [&](const Term& t) {
    if (t.is_constant()) out.insert(t.name);
  };
  switch (f->kind) {
    case K::atom:
      for (const auto& t : f->atom.args) term(t);
      return;
    case K::eq:
    case K::neq:
      term(f->left);
      term(f->right);
      return;
    default:
      for (const auto& c : f->children) collect_constants(c, out);
  }
}

}  // namespace

std::set<std::string> free_variables(const FormulaPtr& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> constants_of(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_constants(f, out);
  return out;
}

std::size_t formula_size(const FormulaPtr& f) {
  std::size_t n = 1;
  for (const auto& c : f->children) n += formula_size(c);
  return n;
}

namespace {

// Values a quantified variable may take; `any` means no restriction found.
struct Cands {
  bool any = true;
  std::set<std::string> values;

  static Cands none() { return Cands{false, {}}; }
  static Cands one(const std::string& v) { return Cands{false, {v}}; }
};

Cands intersect(Cands a, const Cands& b) {
  if (a.any) return b;
  if (b.any) return a;
  Cands out = Cands::none();
  std::set_intersection(a.values.begin(), a.values.end(), b.values.begin(), b.values.end(),
                        std::inserter(out.values, out.values.end()));
  return out;
}

Cands unite(Cands a, const Cands& b) {
  if (a.any || b.any) return Cands{};
  a.values.insert(b.values.begin(), b.values.end());
  return a;
}

class Evaluator {
 public:
  Evaluator(const EvalContext& ctx, std::vector<std::string> domain) : ctx_(ctx), domain_(std::move(domain)) {}

  bool eval(const Formula& f) {
    switch (f.kind) {
      case K::truth:
        return true;
      case K::falsity:
        return false;
      case K::atom:
        return eval_atom(f.atom);
      case K::eq:
        return value(f.left) == value(f.right);
      case K::neq:
        return value(f.left) != value(f.right);
      case K::negation:
        return !eval(*f.children[0]);
      case K::conjunction:
        for (const auto& c : f.children)
          if (!eval(*c)) return false;
        return true;
      case K::disjunction:
        for (const auto& c : f.children)
          if (eval(*c)) return true;
        return false;
      case K::implication:
        return !eval(*f.children[0]) || eval(*f.children[1]);
      case K::exists:
      case K::forall:
        return eval_quant(f, 0);
    }
    return false;
  }

 private:
  const std::string& value(const Term& t) const {
    if (t.is_constant()) return t.name;
    auto it = env_.find(t.name);
    if (it == env_.end()) throw UnboundVariable("variable " + t.name + " is not bound by any quantifier");
    return it->second;
  }

  bool eval_atom(const Atom& a) const {
    Fact g{a.predicate, {}, false};
    g.args.reserve(a.args.size());
    for (const auto& t : a.args) g.args.push_back(Term::constant(value(t)));
    return (a.aux ? ctx_.aux_facts : ctx_.facts).contains(g);
  }

  bool eval_quant(const Formula& f, std::size_t idx) {
    if (idx == f.vars.size()) return eval(*f.children[0]);
    const std::string& v = f.vars[idx];
    std::vector<std::string> wild(f.vars.begin() + static_cast<std::ptrdiff_t>(idx) + 1, f.vars.end());
    const bool is_exists = f.kind == K::exists;
    Cands c = is_exists ? cands_true(*f.children[0], v, wild) : cands_false(*f.children[0], v, wild);

    auto saved = env_.find(v) == env_.end() ? std::optional<std::string>{} : std::optional<std::string>{env_[v]};
    bool result = !is_exists;
    auto try_value = [&](const std::string& d) {
      env_[v] = d;
      bool r = eval_quant(f, idx + 1);
      if (r == is_exists) {
        result = is_exists;
        return true;
      }
      return false;
    };
    if (c.any) {
      for (const auto& d : domain_)
        if (try_value(d)) break;
    } else {
      for (const auto& d : c.values) {
        if (!std::binary_search(domain_.begin(), domain_.end(), d)) continue;
        if (try_value(d)) break;
      }
    }
    if (saved)
      env_[v] = *saved;
    else
      env_.erase(v);
    return result;
  }

  static bool is_wild(const std::vector<std::string>& wild, const std::string& name) {
    return std::find(wild.begin(), wild.end(), name) != wild.end();
  }

  // Resolves a term for candidate computation: nullopt means unknown.
  std::optional<std::string> known(const Term& t, const std::string& v, const std::vector<std::string>& wild) const {
    if (t.is_constant()) return t.name;
    if (t.name == v || is_wild(wild, t.name)) return std::nullopt;
    auto it = env_.find(t.name);
    if (it == env_.end()) return std::nullopt;
    return it->second;
  }

  Cands atom_cands(const Atom& a, const std::string& v, const std::vector<std::string>& wild) const {
    bool mentions = std::any_of(a.args.begin(), a.args.end(),
                                [&](const Term& t) { return t.is_variable() && t.name == v; });
    if (!mentions) return Cands{};
    std::vector<std::optional<std::string>> fixed;
    fixed.reserve(a.args.size());
    for (const auto& t : a.args) fixed.push_back(known(t, v, wild));
    Cands out = Cands::none();
    const FactSet& facts = a.aux ? ctx_.aux_facts : ctx_.facts;
    for (const Fact& fact : facts.with_predicate(a.predicate)) {
      if (fact.args.size() != a.args.size()) continue;
      const std::string* val = nullptr;
      bool ok = true;
      for (std::size_t i = 0; i < a.args.size() && ok; ++i) {
        const std::string& c = fact.args[i].name;
        if (a.args[i].is_variable() && a.args[i].name == v) {
          if (val && *val != c) ok = false;
          val = &c;
        } else if (fixed[i] && *fixed[i] != c) {
          ok = false;
        }
      }
      if (ok && val) out.values.insert(*val);
    }
    return out;
  }

  Cands eq_cands(const Term& l, const Term& r, const std::string& v, const std::vector<std::string>& wild) const {
    auto is_v = [&](const Term& t) { return t.is_variable() && t.name == v; };
    if (is_v(l) && !is_v(r)) {
      if (auto k = known(r, v, wild)) return Cands::one(*k);
    } else if (is_v(r) && !is_v(l)) {
      if (auto k = known(l, v, wild)) return Cands::one(*k);
    }
    return Cands{};
  }

  // Superset of the values of v for which f can be true.
  Cands cands_true(const Formula& f, const std::string& v, std::vector<std::string>& wild) const {
    switch (f.kind) {
      case K::truth:
        return Cands{};
      case K::falsity:
        return Cands::none();
      case K::atom:
        return atom_cands(f.atom, v, wild);
      case K::eq:
        return eq_cands(f.left, f.right, v, wild);
      case K::neq:
        return Cands{};
      case K::negation:
        return cands_false(*f.children[0], v, wild);
      case K::conjunction: {
        Cands c;
        for (const auto& ch : f.children) {
          c = intersect(std::move(c), cands_true(*ch, v, wild));
          if (!c.any && c.values.empty()) break;
        }
        return c;
      }
      case K::disjunction: {
        Cands c = Cands::none();
        for (const auto& ch : f.children) {
          c = unite(std::move(c), cands_true(*ch, v, wild));
          if (c.any) break;
        }
        return c;
      }
      case K::implication:
        return unite(cands_false(*f.children[0], v, wild), cands_true(*f.children[1], v, wild));
      case K::exists:
      case K::forall:
        return quant_cands(f, v, wild, true);
    }
    return Cands{};
  }

  // Superset of the values of v for which f can be false.
  Cands cands_false(const Formula& f, const std::string& v, std::vector<std::string>& wild) const {
    switch (f.kind) {
      case K::truth:
        return Cands::none();
      case K::falsity:
      case K::atom:
      case K::eq:
        return Cands{};
      case K::neq:
        return eq_cands(f.left, f.right, v, wild);
      case K::negation:
        return cands_true(*f.children[0], v, wild);
      case K::conjunction: {
        Cands c = Cands::none();
        for (const auto& ch : f.children) {
          c = unite(std::move(c), cands_false(*ch, v, wild));
          if (c.any) break;
        }
        return c;
      }
      case K::disjunction: {
        Cands c;
        for (const auto& ch : f.children) {
          c = intersect(std::move(c), cands_false(*ch, v, wild));
          if (!c.any && c.values.empty()) break;
        }
        return c;
      }
      case K::implication:
        return intersect(cands_true(*f.children[0], v, wild), cands_false(*f.children[1], v, wild));
      case K::exists:
      case K::forall:
        return quant_cands(f, v, wild, false);
    }
    return Cands{};
  }

  Cands quant_cands(const Formula& f, const std::string& v, std::vector<std::string>& wild, bool want_true) const {
    if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end()) return Cands{};
    const auto n = wild.size();
    wild.insert(wild.end(), f.vars.begin(), f.vars.end());
    Cands c = want_true ? cands_true(*f.children[0], v, wild) : cands_false(*f.children[0], v, wild);
    wild.resize(n);
    return c;
  }

  const EvalContext& ctx_;
  std::vector<std::string> domain_;
  std::map<std::string, std::string> env_;
};

}  // namespace

bool evaluate(const FormulaPtr& f, const EvalContext& ctx) {
  std::set<std::string> dom = ctx.domain;
  for (const auto* facts : {&ctx.facts, &ctx.aux_facts})
    for (const auto& fact : *facts)
      for (const auto& t : fact.args) dom.insert(t.name);
  auto consts = constants_of(f);
  dom.insert(consts.begin(), consts.end());
  Evaluator ev(ctx, std::vector<std::string>(dom.begin(), dom.end()));
  return ev.eval(*f);
}

bool evaluate(const FormulaPtr& f, const FactSet& facts, const FactSet& aux_facts) {
  EvalContext ctx{facts, aux_facts, {}};
  return evaluate(f, ctx);
}

std::optional<TermMap> unify_atoms(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.aux != b.aux || a.args.size() != b.args.size()) return std::nullopt;
  TermMap s;
  auto walk = [&](Term t) {
    while (t.is_variable()) {
      auto it = s.find(t.name);
      if (it == s.end()) break;
      t = it->second;
    }
    return t;
  };
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    Term x = walk(a.args[i]);
    Term y = walk(b.args[i]);
    if (x == y) continue;
    if (y.is_variable()) {
      s[y.name] = x;
    } else if (x.is_variable()) {
      s[x.name] = y;
    } else {
      return std::nullopt;
    }
  }
  for (auto& [k, v] : s) v = walk(v);
  return s;
}

std::string FreshNames::next(const std::string& base) {
  int& n = counters_[base];
  std::string name;
  do {
    name = base + "_" + std::to_string(++n);
  } while (used_.count(name));
  used_.insert(name);
  return name;
}

Dependency rename_apart(const Dependency& d, FreshNames& fresh) {
  TermMap map;
  auto rename = [&](const std::string& v) {
    auto it = map.find(v);
    if (it != map.end()) return it->second.name;
    std::string n = fresh.next(v);
    map.emplace(v, Term::var(n));
    return n;
  };
  Dependency out;
  for (const auto& v : d.forall_vars) out.forall_vars.push_back(rename(v));
  for (const auto& v : variables(d.body)) rename(v);
  for (const auto& q : d.head.disjuncts)
    for (const auto& v : variables(q.body)) rename(v);
  out.body = cqa::apply(map, d.body);
  for (const auto& q : d.head.disjuncts) {
    CQ nq;
    for (const auto& v : q.exists_vars) nq.exists_vars.push_back(rename(v));
    nq.body = cqa::apply(map, q.body);
    out.head.disjuncts.push_back(std::move(nq));
  }
  return out;
}

}  // namespace cqa
