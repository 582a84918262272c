#pragma once

// Boolean UCQ entailment over repairs, under AllRep (every repair) and
// IntRep (intersection of repairs) semantics.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/formula.hpp"
#include "cqa/search.hpp"

namespace cqa {

enum class Semantics { allrep, intrep };

const char* to_string(Semantics s);
std::optional<Semantics> parse_semantics(std::string_view s);

enum class EntMethod {
  automatic,
  brute,
  alg2_allrep,
  alg3_intrep,
  alg4_acyclic_fdet,
  linear_unique,
  linear_fdet_images,
  rewrite_qent,
  rewrite_qent_al,
};

const char* to_string(EntMethod m);
std::optional<EntMethod> parse_ent_method(std::string_view s);

inline constexpr std::size_t kMaxAtomSets = 100000;

struct EntResult {
  bool entailed = false;
  Semantics semantics = Semantics::allrep;
  EntMethod method = EntMethod::automatic;
  /// A repair falsifying the query (AllRep, not entailed).
  std::optional<FactSet> countermodel;
  /// An image of the query contained in every repair (entailed).
  std::optional<FactSet> image;
  /// Subset search methods: for each image, in order, the subset that
  /// rules it out.
  std::vector<FactSet> blocking;
};

/// Maximum over dependencies of body atoms plus the largest head disjunct.
std::size_t dependency_length(std::span<const Dependency> deps);
/// k^(h+1), saturating.
std::size_t alg4_bound(std::span<const Dependency> deps);
/// Number of atom sets the QEnt rewriting quantifies over, saturating.
std::size_t atom_set_count(std::span<const Dependency> deps);

std::vector<EntMethod> admissible_ent_methods(const FactSet& facts, std::span<const Dependency> deps, Semantics sem);

EntResult decide_entailment(const FactSet& facts, std::span<const Dependency> deps, const UCQ& query, Semantics sem,
                            EntMethod method = EntMethod::automatic, std::size_t cap = kDefaultCap);
bool entails(const FactSet& facts, std::span<const Dependency> deps, const UCQ& query, Semantics sem,
             EntMethod method = EntMethod::automatic, std::size_t cap = kDefaultCap);

/// Single-fact query; both semantics coincide.
bool instance_check(const FactSet& facts, std::span<const Dependency> deps, const Fact& fact,
                    EntMethod method = EntMethod::automatic, std::size_t cap = kDefaultCap);

/// IntRep rewriting for acyclic sets, valid on databases for which the set is FDET.
/// Throws FormulaTooLarge when the atom-set count exceeds `max_atom_sets`.
FormulaPtr build_qent(const UCQ& query, std::span<const Dependency> deps, std::size_t max_atom_sets = kMaxAtomSets);
/// Rewriting for acyclic linear sets (both semantics).
FormulaPtr build_qent_al(const UCQ& query, std::span<const Dependency> deps);

}  // namespace cqa
