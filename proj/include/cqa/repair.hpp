#pragma once

// Repairs: maximal consistent subsets of the database.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/formula.hpp"
#include "cqa/search.hpp"
#include "cqa/weakcons.hpp"

namespace cqa {

struct RepairSet {
  std::vector<FactSet> repairs;  // canonical order
  FactSet intersection;
};

/// Exhaustive enumeration over subsets; throws InstanceTooLarge above `cap`.
RepairSet enumerate_repairs(const FactSet& facts, std::span<const Dependency> deps, std::size_t cap = kDefaultCap);
RepairSet enumerate_repairs_serial(const FactSet& facts, std::span<const Dependency> deps,
                                   std::size_t cap = kDefaultCap);

enum class RCMethod { automatic, brute, general_wc, acyclic_local, rewrite_acyclic, linear_unique, linear_fdet };

const char* to_string(RCMethod m);
std::optional<RCMethod> parse_rc_method(std::string_view s);

struct RCResult {
  bool is_repair = false;
  RCMethod method = RCMethod::automatic;
  /// A fact of D \ S whose addition keeps S extendable, when the method finds one.
  std::optional<Fact> blocking_fact;
};

std::vector<RCMethod> admissible_rc_methods(const FactSet& facts, std::span<const Dependency> deps);

RCResult check_repair(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps,
                      RCMethod method = RCMethod::automatic, std::size_t cap = kDefaultCap);
bool is_repair(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps,
               RCMethod method = RCMethod::automatic, std::size_t cap = kDefaultCap);

/// D u aux(S) satisfies the sentence iff S is a repair (acyclic sets).
/// `schema` contributes predicates that the dependencies do not mention.
FormulaPtr build_check_repair(std::span<const Dependency> deps, const Schema& schema = {});

}  // namespace cqa
