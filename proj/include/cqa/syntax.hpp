#pragma once

// Text formats for schemas, dependency sets, databases, queries and
// first-order formulas. See docs/format.md for the grammar.

#include <optional>
#include <string>
#include <string_view>

#include "cqa/core.hpp"
#include "cqa/formula.hpp"

namespace cqa {

/// Everything a single input file may contain, section by section.
struct Document {
  Schema schema;
  DependencySet dependencies;
  FactSet facts;
  std::optional<UCQ> query;
};

enum class Section { schema, dependencies, database, query };

/// Parses a whole document. Statements before the first section header
/// belong to `initial`. `schema` seeds the declarations.
Document parse_document(std::string_view text, Section initial, const Schema& schema = {});

struct DependencyFile {
  Schema schema;
  DependencySet dependencies;
};

DependencyFile parse_dependencies(std::string_view text);
/// Facts are checked against `schema`; unseen predicates extend it.
Database parse_database(std::string_view text, const Schema& schema);
/// Boolean safe UCQ over predicates known to `schema`.
UCQ parse_query(std::string_view text, const Schema& schema);
/// Identifiers bound by a quantifier are variables, all others constants.
FormulaPtr parse_fo(std::string_view text);

std::string print_term(const Term& t);
std::string print_conjunction(const Conjunction& c);
std::string print_cq(const CQ& q);
std::string print_query(const UCQ& q);
std::string print_dependency(const Dependency& d);
std::string print_dependencies(const Schema& schema, const DependencySet& deps);
/// One `P(a,b).` line per fact, in canonical order.
std::string print_facts(const FactSet& facts);
std::string print_fo(const FormulaPtr& f);

}  // namespace cqa
