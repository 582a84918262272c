#pragma once

// Shared helpers for the test binaries: fixture loading, random instance
// generators and naive oracles that avoid the library's search kernels.

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cqa/classify.hpp"
#include "cqa/core.hpp"
#include "cqa/syntax.hpp"

#ifndef CQA_FIXTURE_DIR
#define CQA_FIXTURE_DIR "tests/fixtures"
#endif

namespace cqa::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) { return std::string(CQA_FIXTURE_DIR) + "/" + name; }

struct Instance {
  Schema schema;
  DependencySet deps;
  FactSet facts;
};

inline Instance parse_instance(const std::string& deps, const std::string& db) {
  auto file = parse_dependencies(deps);
  auto data = parse_database(db, file.schema);
  return {data.schema, file.dependencies, data.facts};
}

inline Instance load(const std::string& stem) {
  return parse_instance(read_file(fixture_path(stem + ".ded")), read_file(fixture_path(stem + ".db")));
}

inline FactSet facts(const std::string& text, const Schema& schema) { return parse_database(text, schema).facts; }

inline UCQ query(const std::string& text, const Schema& schema) { return parse_query(text, schema); }

// Naive oracle: every subset, consistency by definition, maximality by
// comparison against all consistent subsets.
inline std::vector<FactSet> naive_repairs(const FactSet& d, const DependencySet& deps) {
  const std::size_t n = d.size();
  std::vector<std::uint32_t> ok;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    std::vector<Fact> pick;
    for (std::size_t i = 0; i < n; ++i)
      if (m & (1u << i)) pick.push_back(d[i]);
    if (consistent(FactSet(pick), deps)) ok.push_back(m);
  }
  std::vector<FactSet> out;
  for (auto m : ok) {
    bool maximal = std::none_of(ok.begin(), ok.end(), [&](std::uint32_t o) { return o != m && (o & m) == m; });
    if (!maximal) continue;
    std::vector<Fact> pick;
    for (std::size_t i = 0; i < n; ++i)
      if (m & (1u << i)) pick.push_back(d[i]);
    out.emplace_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline FactSet naive_intersection(const std::vector<FactSet>& reps) {
  FactSet out = reps.front();
  for (const auto& r : reps) out = set_intersection(out, r);
  return out;
}

inline bool naive_weakly_consistent(const FactSet& s, const std::vector<FactSet>& reps) {
  return std::any_of(reps.begin(), reps.end(), [&](const FactSet& r) { return s.is_subset_of(r); });
}

// ---- random instances ----

enum class Klass { general, linear, fdet, acyclic, acyclic_linear, acyclic_fdet, linear_fdet };

inline const char* name(Klass k) {
  switch (k) {
    case Klass::general:
      return "general";
    case Klass::linear:
      return "linear";
    case Klass::fdet:
      return "fdet";
    case Klass::acyclic:
      return "acyclic";
    case Klass::acyclic_linear:
      return "acyclic_linear";
    case Klass::acyclic_fdet:
      return "acyclic_fdet";
    case Klass::linear_fdet:
      return "linear_fdet";
  }
  return "?";
}

struct RandomInstance {
  Schema schema;
  DependencySet deps;
  FactSet facts;
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  // Predicates p0..p3 with arities 1..2; constants a,b,c.
  void reset_schema() {
    preds_.clear();
    std::size_t count = uniform(2, 4);
    for (std::size_t i = 0; i < count; ++i) preds_.push_back({"p" + std::to_string(i), uniform(1, 2)});
  }

  Atom random_atom(std::size_t pred, const std::vector<std::string>& vars, double const_p = 0.1) {
    Atom a{preds_[pred].first, {}, false};
    for (std::size_t i = 0; i < preds_[pred].second; ++i) {
      if (vars.empty() || coin(const_p)) a.args.push_back(Term::constant(kConsts[uniform(0, 2)]));
      else a.args.push_back(Term::var(vars[uniform(0, vars.size() - 1)]));
    }
    return a;
  }

  // rank_lo: head predicates must have index > every body predicate (acyclic).
  Dependency random_dependency(bool linear, bool acyclic) {
    Dependency d;
    std::size_t np = preds_.size();
    std::size_t body_atoms = linear ? 1 : uniform(1, 2);
    std::vector<std::string> pool{"x", "y", "z"};
    std::size_t max_body_pred = acyclic ? np - 2 : np - 1;
    std::size_t top = 0;
    for (std::size_t i = 0; i < body_atoms; ++i) {
      std::size_t p = uniform(0, max_body_pred);
      top = std::max(top, p);
      d.body.atoms.push_back(random_atom(p, pool, 0.05));
    }
    d.forall_vars = predicate_variables(d.body);
    if (d.forall_vars.size() >= 2 && coin(0.25))
      d.body.ineqs.push_back({Term::var(d.forall_vars[0]), Term::var(d.forall_vars[1])});
    if (coin(0.3)) {
      d.head.disjuncts.push_back(CQ{{}, Conjunction{{bottom_atom()}, {}}});
      return d;
    }
    std::size_t disjuncts = coin(0.2) ? 2 : 1;
    for (std::size_t k = 0; k < disjuncts; ++k) {
      CQ q;
      std::vector<std::string> hv = d.forall_vars;
      bool ex = coin(0.5);
      if (ex) hv.push_back("w");
      std::size_t head_atoms = coin(0.25) ? 2 : 1;
      std::size_t lo = acyclic ? top + 1 : 0;
      for (std::size_t i = 0; i < head_atoms; ++i) q.body.atoms.push_back(random_atom(uniform(lo, np - 1), hv));
      auto pv = predicate_variables(q.body);
      if (ex && std::find(pv.begin(), pv.end(), "w") != pv.end()) {
        q.exists_vars.push_back("w");
        if (!d.forall_vars.empty() && coin(0.3)) q.body.ineqs.push_back({Term::var("w"), Term::var(d.forall_vars[0])});
      }
      d.head.disjuncts.push_back(std::move(q));
    }
    return d;
  }

  FactSet random_facts(std::size_t n) {
    std::vector<Fact> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_atom(uniform(0, preds_.size() - 1), {}, 1.0));
    return FactSet(out);
  }

  Schema schema() const {
    Schema s;
    for (const auto& [p, a] : preds_) s.declare(p, a);
    for (auto c : kConsts) s.register_constant(c);
    return s;
  }

  // Draws until the class holds. Facts count in [1, max_facts].
  RandomInstance instance(Klass k, std::size_t max_facts, std::size_t max_deps) {
    while (true) {
      reset_schema();
      const bool linear = k == Klass::linear || k == Klass::acyclic_linear || k == Klass::linear_fdet;
      const bool acyclic = k == Klass::acyclic || k == Klass::acyclic_linear || k == Klass::acyclic_fdet;
      const bool fdet = k == Klass::fdet || k == Klass::acyclic_fdet || k == Klass::linear_fdet;
      RandomInstance r;
      std::size_t nd = uniform(1, max_deps);
      for (std::size_t i = 0; i < nd; ++i) r.deps.push_back(random_dependency(linear, acyclic));
      r.facts = random_facts(uniform(1, max_facts));
      if (acyclic && !is_acyclic(r.deps)) continue;
      if (fdet && !is_fdet(r.deps, r.facts)) continue;
      r.schema = schema();
      return r;
    }
  }

  UCQ random_query(std::size_t max_atoms = 3, std::size_t max_disjuncts = 2) {
    UCQ q;
    std::size_t nd = uniform(1, max_disjuncts);
    std::vector<std::string> pool{"u", "v", "s"};
    for (std::size_t k = 0; k < nd; ++k) {
      CQ c;
      std::size_t na = uniform(1, max_atoms);
      for (std::size_t i = 0; i < na; ++i) c.body.atoms.push_back(random_atom(uniform(0, preds_.size() - 1), pool, 0.2));
      c.exists_vars = predicate_variables(c.body);
      if (c.exists_vars.size() >= 2 && coin(0.3))
        c.body.ineqs.push_back({Term::var(c.exists_vars[0]), Term::var(c.exists_vars[1])});
      q.disjuncts.push_back(std::move(c));
    }
    return q;
  }

  FactSet random_subset(const FactSet& d) {
    std::vector<Fact> out;
    for (const auto& f : d)
      if (coin(0.5)) out.push_back(f);
    return FactSet(out);
  }

 private:
  static constexpr const char* kConsts[3] = {"a", "b", "c"};
  std::mt19937_64 rng_;
  std::vector<std::pair<std::string, std::size_t>> preds_;
};

}  // namespace cqa::testing
