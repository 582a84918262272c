#pragma once

// Relational data model: terms, atoms, conjunctions with inequalities,
// unions of conjunctive queries, disjunctive embedded dependencies and
// databases, plus the base semantic operations over them.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/error.hpp"

namespace cqa {

/// Reserved nullary predicate. No database ever stores it.
inline constexpr std::string_view kBottom = "false";

struct Term {
  enum class Kind : std::uint8_t { variable, constant };

  Kind kind = Kind::constant;
  std::string name;

  static Term var(std::string name) { return {Kind::variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::constant, std::move(name)}; }

  bool is_variable() const { return kind == Kind::variable; }
  bool is_constant() const { return kind == Kind::constant; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;
  bool aux = false;  // p^aux copy used by the rewritings

  bool is_bottom() const { return predicate == kBottom; }
  bool is_ground() const;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// A ground atom.
using Fact = Atom;

Atom make_atom(std::string predicate, std::vector<Term> args);
Fact make_fact(std::string predicate, const std::vector<std::string>& constants);
Atom bottom_atom();

struct Inequality {
  Term left;
  Term right;

  friend auto operator<=>(const Inequality&, const Inequality&) = default;
};

struct Conjunction {
  std::vector<Atom> atoms;
  std::vector<Inequality> ineqs;

  friend bool operator==(const Conjunction&, const Conjunction&) = default;
};

/// Variables in first-occurrence order (atoms first, then inequalities).
std::vector<std::string> variables(const Conjunction& conj);
/// Variables occurring in predicate atoms, first-occurrence order.
std::vector<std::string> predicate_variables(const Conjunction& conj);

struct CQ {
  std::vector<std::string> exists_vars;
  Conjunction body;

  std::vector<std::string> free_vars() const;
  bool is_boolean() const { return free_vars().empty(); }
  bool is_safe() const;
  /// True when the body contains the atom BOT, so the disjunct never holds.
  bool is_bottom() const;

  friend bool operator==(const CQ&, const CQ&) = default;
};

struct UCQ {
  std::vector<CQ> disjuncts;

  bool is_boolean() const;
  bool is_safe() const;

  friend bool operator==(const UCQ&, const UCQ&) = default;
};

struct Dependency {
  std::vector<std::string> forall_vars;
  Conjunction body;
  UCQ head;

  bool is_linear() const { return body.atoms.size() == 1; }
  /// No existentially quantified head variable in any disjunct.
  bool is_full() const;

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

using DependencySet = std::vector<Dependency>;

/// Predicate arities plus the registry of known constant symbols.
class Schema {
 public:
  Schema();

  /// Adds `name/arity`; a conflicting earlier arity raises SchemaError.
  void declare(const std::string& name, std::size_t arity);
  std::optional<std::size_t> arity(std::string_view name) const;
  bool has(std::string_view name) const { return arity(name).has_value(); }
  const std::map<std::string, std::size_t, std::less<>>& predicates() const { return arities_; }

  void register_constant(const std::string& name) { constants_.insert(name); }
  bool knows_constant(std::string_view name) const;
  const std::set<std::string, std::less<>>& constants() const { return constants_; }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::map<std::string, std::size_t, std::less<>> arities_;
  std::set<std::string, std::less<>> constants_;
};

/// Set of facts kept sorted by (predicate, args); duplicates collapse.
class FactSet {
 public:
  FactSet() = default;
  explicit FactSet(std::vector<Fact> facts);
  FactSet(std::initializer_list<Fact> facts) : FactSet(std::vector<Fact>(facts)) {}

  bool contains(const Fact& fact) const;
  /// Contiguous run of facts with the given predicate.
  std::span<const Fact> with_predicate(std::string_view predicate) const;
  /// Returns false when the fact was already present.
  bool insert(const Fact& fact);
  bool erase(const Fact& fact);
  void insert_all(const FactSet& other);
  bool is_subset_of(const FactSet& other) const;
  std::size_t index_of(const Fact& fact) const;  // position, or size() when absent

  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  const Fact& operator[](std::size_t i) const { return facts_[i]; }
  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }
  const std::vector<Fact>& facts() const { return facts_; }

  friend bool operator==(const FactSet&, const FactSet&) = default;
  friend auto operator<=>(const FactSet& a, const FactSet& b) { return a.facts_ <=> b.facts_; }

 private:
  std::vector<Fact> facts_;
};

FactSet set_union(const FactSet& a, const FactSet& b);
FactSet set_difference(const FactSet& a, const FactSet& b);
FactSet set_intersection(const FactSet& a, const FactSet& b);

struct Database {
  Schema schema;
  FactSet facts;
};

/// Total map from variables to constant names.
using Substitution = std::map<std::string, std::string>;

Term apply(const Substitution& sigma, const Term& term);
Atom apply(const Substitution& sigma, const Atom& atom);
Inequality apply(const Substitution& sigma, const Inequality& ineq);
Conjunction apply(const Substitution& sigma, const Conjunction& conj);

/// Throws SchemaError when an atom uses an unknown predicate or wrong arity.
void check_schema(const Schema& schema, const Conjunction& conj);
void check_schema(const Schema& schema, const UCQ& query);
void check_schema(const Schema& schema, const Dependency& dep);

/// Enumerates instantiations of `conj` in `facts` extending `seed`. The
/// callback returns false to stop; the function returns false if stopped.
bool for_each_instantiation(const Conjunction& conj, const FactSet& facts, const Substitution& seed,
                            const std::function<bool(const Substitution&)>& fn);

/// All instantiations, sorted lexicographically by the bound constants taken
/// in variable first-occurrence order.
std::vector<Substitution> instantiations(const Conjunction& conj, const FactSet& facts);
std::vector<Substitution> instantiations(const Conjunction& conj, const Database& db);

FactSet image(const Conjunction& conj, const Substitution& sigma);

/// Distinct images of a Boolean safe UCQ, in canonical order.
std::vector<FactSet> images_of_ucq(const UCQ& query, const FactSet& facts);
std::vector<FactSet> images_of_ucq(const UCQ& query, const Database& db);
bool holds(const UCQ& query, const FactSet& facts);

/// Distinct images of head(sigma(dep)) in `facts`.
std::vector<FactSet> head_images(const Dependency& dep, const Substitution& body_sigma,
                                 const FactSet& facts);
bool has_head_image(const Dependency& dep, const Substitution& body_sigma, const FactSet& facts);

bool satisfies(const FactSet& facts, const Dependency& dep);
bool satisfies(const Database& db, const Dependency& dep);
bool consistent(const FactSet& facts, std::span<const Dependency> deps);
bool consistent(const Database& db, std::span<const Dependency> deps);

/// Predicates used by the dependencies (BOT excluded), sorted.
std::vector<std::string> predicates_of(std::span<const Dependency> deps);
/// Constants mentioned by the dependencies, sorted.
std::set<std::string> constants_of(std::span<const Dependency> deps);
std::set<std::string> constants_of(const UCQ& query);

std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const FactSet& facts);  // {P(a), T(b)}

}  // namespace cqa
