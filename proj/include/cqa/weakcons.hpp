#pragma once

// Weak consistency: does a subset of the database extend to a consistent
// subset of the database?

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/formula.hpp"
#include "cqa/search.hpp"

namespace cqa {

enum class WCMethod { automatic, brute, fc, linear_repair, reach, rewrite_acyclic_fdet, rewrite_acyclic_linear };

const char* to_string(WCMethod m);
std::optional<WCMethod> parse_wc_method(std::string_view s);

struct ClosureStep {
  std::size_t dependency;
  Substitution sigma;
  FactSet added;
};

struct ForwardClosure {
  FactSet closure;
  std::vector<ClosureStep> trace;
};

/// Least superset of `seed` closed under adding the unique head image (taken
/// from `facts`) of every body instantiation. Throws NotFdet when some body
/// instantiation inside the closure has two or more head images.
ForwardClosure forward_closure(const FactSet& seed, const FactSet& facts, std::span<const Dependency> deps);

/// Greatest fixpoint of deleting body images whose head has no image.
/// Throws MethodInapplicable unless every dependency is linear.
FactSet unique_repair_linear(const FactSet& facts, std::span<const Dependency> deps);

/// Facts from which the BOT vertex of the fact graph is reachable.
/// Requires linear dependencies that are FDET for `facts`.
FactSet bottom_reaching_facts(const FactSet& facts, std::span<const Dependency> deps);
bool weakly_consistent_reach(const Fact& fact, const FactSet& facts, std::span<const Dependency> deps);
bool weakly_consistent_reach(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps);

/// Smallest consistent superset of `subset` inside `facts` (by size, then
/// mask order), or nullopt.
std::optional<FactSet> weakly_consistent_brute(const FactSet& subset, const FactSet& facts,
                                               std::span<const Dependency> deps, std::size_t cap = kDefaultCap);

/// Sentence over base and auxiliary predicates; D' is weakly consistent iff
/// D u aux(D') satisfies it (acyclic sets that are FDET for D).
FormulaPtr build_wcons(std::span<const Dependency> deps);
/// Same, drawing bound variable names from `fresh`.
FormulaPtr build_wcons(std::span<const Dependency> deps, FreshNames& fresh);
/// Variant for acyclic linear sets.
FormulaPtr build_wcons_al(std::span<const Dependency> deps);
/// The per-atom formula for `alpha` against `sorted` (topologically ordered).
FormulaPtr build_wcons_al_atom(const Atom& alpha, std::span<const Dependency> sorted, FreshNames& fresh);

struct WCResult {
  bool weakly_consistent = false;
  WCMethod method = WCMethod::automatic;
  std::optional<FactSet> witness;
};

/// Methods whose class precondition holds, in the order auto tries them.
std::vector<WCMethod> admissible_wc_methods(const FactSet& facts, std::span<const Dependency> deps);

/// A subset that is not contained in `facts` is never weakly consistent.
WCResult decide_weak_consistency(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps,
                                 WCMethod method = WCMethod::automatic, std::size_t cap = kDefaultCap);
bool weakly_consistent(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps,
                       WCMethod method = WCMethod::automatic, std::size_t cap = kDefaultCap);

}  // namespace cqa
