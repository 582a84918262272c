#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/formula.hpp"

namespace cqa {

struct DependencyGraph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // sorted
};

/// Edge i -> j when a head predicate of dep i occurs in the body of dep j.
DependencyGraph dependency_graph(std::span<const Dependency> deps);

struct Classification {
  bool linear = false;
  bool full = false;
  bool acyclic = false;
  std::optional<std::vector<std::size_t>> topo_order;
  std::optional<bool> fdet;
};

Classification classify(std::span<const Dependency> deps);
Classification classify(std::span<const Dependency> deps, const FactSet& facts);

bool is_linear(std::span<const Dependency> deps);
bool is_full(std::span<const Dependency> deps);
bool is_acyclic(std::span<const Dependency> deps);

/// Topological order in which every edge goes from an earlier to a later
/// position; ties go to the smaller index. Empty optional when cyclic.
std::optional<std::vector<std::size_t>> topological_order(std::span<const Dependency> deps);
/// The dependencies rearranged into topological order. Throws
/// MethodInapplicable on a cyclic set.
DependencySet sorted_topologically(std::span<const Dependency> deps);

/// Every body instantiation of every dependency has at most one distinct head
/// image in `facts`.
bool is_fdet(std::span<const Dependency> deps, const FactSet& facts);

/// Sentence true in D exactly when the set is FDET for D. Two witnesses of
/// (possibly different) head disjuncts must produce the same set of facts.
FormulaPtr build_check_fdet(std::span<const Dependency> deps);

}  // namespace cqa
