#pragma once

// First-order formulas over base predicates p and auxiliary copies p^aux,
// together with an active-domain evaluator and syntactic unification.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqa/core.hpp"

namespace cqa {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { atom, eq, neq, negation, conjunction, disjunction, implication, exists, forall, truth, falsity };

  Kind kind = Kind::truth;
  Atom atom;                          // atom
  Term left, right;                   // eq, neq
  std::vector<FormulaPtr> children;   // negation: 1, implication: 2, quantifiers: 1
  std::vector<std::string> vars;      // quantifiers
};

bool operator==(const Formula& a, const Formula& b);
bool same(const FormulaPtr& a, const FormulaPtr& b);

// Smart constructors. They flatten nested conjunctions/disjunctions, drop
// neutral elements and fold constants, so that equal inputs always build
// structurally equal trees.
namespace fo {
FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr atom(Atom a);  // the BOT atom becomes falsity()
FormulaPtr eq(Term l, Term r);
FormulaPtr neq(Term l, Term r);
FormulaPtr negate(FormulaPtr f);
FormulaPtr conj(std::vector<FormulaPtr> parts);
FormulaPtr disj(std::vector<FormulaPtr> parts);
FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr exists(std::vector<std::string> vars, FormulaPtr body);
FormulaPtr forall(std::vector<std::string> vars, FormulaPtr body);

/// Conjunction of the atoms and inequalities of `c`.
FormulaPtr of(const Conjunction& c);
/// Existential closure of a CQ body over its exists_vars.
FormulaPtr of(const CQ& q);
FormulaPtr of(const UCQ& q);
/// Universal sentence equivalent to the dependency.
FormulaPtr of(const Dependency& d);
FormulaPtr of(std::span<const Dependency> deps);
}  // namespace fo

using TermMap = std::map<std::string, Term>;

/// Replaces free variables; bound occurrences are left alone.
FormulaPtr substitute(const FormulaPtr& f, const TermMap& map);
/// Rebuilds `f` with every atom replaced by `fn(atom)`.
FormulaPtr map_atoms(const FormulaPtr& f, const std::function<FormulaPtr(const Atom&)>& fn);

/// p(t) -> p^aux(t). Throws SchemaError on input that is already auxiliary.
Atom aux(const Atom& a);
FormulaPtr aux(const FormulaPtr& f);
std::vector<Atom> aux(const FactSet& facts);

std::set<std::string> free_variables(const FormulaPtr& f);
std::set<std::string> constants_of(const FormulaPtr& f);
std::size_t formula_size(const FormulaPtr& f);

struct EvalContext {
  FactSet facts;
  FactSet aux_facts;  // stored with base predicate names
  std::set<std::string> domain;
};

/// Active-domain evaluation of a sentence. The domain used is ctx.domain
/// plus every constant of the facts and of `f`.
bool evaluate(const FormulaPtr& f, const EvalContext& ctx);
bool evaluate(const FormulaPtr& f, const FactSet& facts, const FactSet& aux_facts = {});

/// Most general unifier of two atoms that share no variables. On a
/// variable/variable pair the variable of `b` is bound to the one of `a`.
std::optional<TermMap> unify_atoms(const Atom& a, const Atom& b);

Term apply(const TermMap& map, const Term& t);
Atom apply(const TermMap& map, const Atom& a);
Conjunction apply(const TermMap& map, const Conjunction& c);

/// Source of variable names that collide with nothing already reserved.
class FreshNames {
 public:
  FreshNames() = default;
  void reserve(const std::string& name) { used_.insert(name); }
  void reserve(const std::set<std::string>& names) { used_.insert(names.begin(), names.end()); }
  std::string next(const std::string& base);

 private:
  std::set<std::string> used_;
  std::map<std::string, int> counters_;
};

/// Renames every variable of the dependency to a fresh name.
Dependency rename_apart(const Dependency& d, FreshNames& fresh);

}  // namespace cqa
