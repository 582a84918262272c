#pragma once

// Instance generators from the hardness reductions, with ground truth
// computed independently (graph search, unit propagation).

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cqa/core.hpp"

namespace cqa {

struct Digraph {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;  // adjacency order = input order
  std::string s;
  std::string t;
};

struct HornClause {
  std::optional<std::string> positive;
  std::vector<std::string> negatives;
};

struct HornFormula {
  std::vector<std::string> variables;
  std::vector<HornClause> clauses;
};

struct GadgetInstance {
  Schema schema;
  DependencySet dependencies;
  FactSet facts;
  FactSet probe;
};

/// t reachable from s; s = t counts as reachable.
bool reachable(const Digraph& g);
/// Minimal-model unit propagation.
bool horn_satisfiable(const HornFormula& f);

/// Probe {Vert(s)}: weakly consistent iff t is not reachable from s.
GadgetInstance stcon_to_wc(const Digraph& g);
/// Probe empty: it is the repair iff t is reachable from s.
GadgetInstance stcon_to_rc(const Digraph& g);
/// Probe = clause facts: weakly consistent iff the formula is satisfiable.
GadgetInstance horn3sat_to_wc(const HornFormula& f);

Digraph random_digraph(std::mt19937_64& rng, std::size_t max_vertices, double edge_probability = 0.3);
HornFormula random_horn(std::mt19937_64& rng, std::size_t max_variables, std::size_t max_clauses = 10);

}  // namespace cqa
