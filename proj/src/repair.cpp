#include "cqa/repair.hpp"

#include <algorithm>
#include <map>

#include "cqa/classify.hpp"

namespace cqa {

namespace {

RepairSet collect(const FactSet& facts, const std::vector<Mask>& masks) {
  RepairSet out;
  for (Mask m : masks) out.repairs.push_back(subset_of(facts, m));
  std::sort(out.repairs.begin(), out.repairs.end());
  out.intersection = out.repairs.front();
  for (const auto& r : out.repairs) out.intersection = set_intersection(out.intersection, r);
  return out;
}

}  // namespace

RepairSet enumerate_repairs(const FactSet& facts, std::span<const Dependency> deps, std::size_t cap) {
  auto tables = build_tables(facts, deps, cap, true);
  return collect(facts, repair_masks(tables));
}

RepairSet enumerate_repairs_serial(const FactSet& facts, std::span<const Dependency> deps, std::size_t cap) {
  auto tables = build_tables(facts, deps, cap, false);
  return collect(facts, repair_masks_serial(tables));
}

const char* to_string(RCMethod m) {
  switch (m) {
    case RCMethod::automatic:
      return "auto";
    case RCMethod::brute:
      return "brute";
    case RCMethod::general_wc:
      return "general_wc";
    case RCMethod::acyclic_local:
      return "acyclic_local";
    case RCMethod::rewrite_acyclic:
      return "rewrite_acyclic";
    case RCMethod::linear_unique:
      return "linear_unique";
    case RCMethod::linear_fdet:
      return "linear_fdet";
  }
  return "?";
}

std::optional<RCMethod> parse_rc_method(std::string_view s) {
  for (auto m : {RCMethod::automatic, RCMethod::brute, RCMethod::general_wc, RCMethod::acyclic_local,
                 RCMethod::rewrite_acyclic, RCMethod::linear_unique, RCMethod::linear_fdet})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::vector<RCMethod> admissible_rc_methods(const FactSet& facts, std::span<const Dependency> deps) {
  const bool linear = is_linear(deps);
  const bool acyclic = is_acyclic(deps);
  std::vector<RCMethod> out;
  if (acyclic) out.push_back(RCMethod::rewrite_acyclic);
  if (linear && is_fdet(deps, facts)) out.push_back(RCMethod::linear_fdet);
  if (linear) out.push_back(RCMethod::linear_unique);
  if (acyclic) out.push_back(RCMethod::acyclic_local);
  out.push_back(RCMethod::general_wc);
  out.push_back(RCMethod::brute);
  return out;
}

namespace {

void require(bool ok, RCMethod m, const char* what) {
  if (!ok) throw MethodInapplicable(std::string("method ") + to_string(m) + " needs " + what);
}

void check_precondition(const FactSet& facts, std::span<const Dependency> deps, RCMethod m) {
  switch (m) {
    case RCMethod::acyclic_local:
    case RCMethod::rewrite_acyclic:
      require(is_acyclic(deps), m, "acyclic dependencies");
      break;
    case RCMethod::linear_unique:
      require(is_linear(deps), m, "linear dependencies");
      break;
    case RCMethod::linear_fdet:
      require(is_linear(deps) && is_fdet(deps, facts), m, "linear FDET dependencies");
      break;
    default:
      break;
  }
}

RCResult run_method(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps, RCMethod m,
                    std::size_t cap) {
  RCResult r;
  r.method = m;
  const FactSet rest = set_difference(facts, subset);
  switch (m) {
    case RCMethod::automatic:
      break;
    case RCMethod::brute: {
      auto t = build_tables(facts, deps, cap);
      Mask s = mask_of(facts, subset);
      if (!t.consistent[s]) return r;
      for (std::size_t b = 0; b < t.n; ++b) {
        Mask bit = Mask{1} << b;
        if (!(s & bit) && t.weak[s | bit]) {
          r.blocking_fact = facts[b];
          return r;
        }
      }
      r.is_repair = true;
      return r;
    }
    case RCMethod::general_wc: {
      if (!consistent(subset, deps)) return r;
      for (const auto& a : rest) {
        FactSet bigger = subset;
        bigger.insert(a);
        if (weakly_consistent(bigger, facts, deps, WCMethod::automatic, cap)) {
          r.blocking_fact = a;
          return r;
        }
      }
      r.is_repair = true;
      return r;
    }
    case RCMethod::acyclic_local: {
      if (!consistent(subset, deps)) return r;
      for (const auto& a : rest) {
        FactSet bigger = subset;
        bigger.insert(a);
        if (consistent(bigger, deps)) {
          r.blocking_fact = a;
          return r;
        }
      }
      r.is_repair = true;
      return r;
    }
    case RCMethod::rewrite_acyclic: {
      Schema schema;
      for (const auto& f : facts) schema.declare(f.predicate, f.args.size());
      r.is_repair = evaluate(build_check_repair(deps, schema), facts, subset);
      return r;
    }
    case RCMethod::linear_unique: {
      FactSet rep = unique_repair_linear(facts, deps);
      r.is_repair = subset == rep;
      if (!r.is_repair && subset.is_subset_of(rep)) r.blocking_fact = set_difference(rep, subset)[0];
      return r;
    }
    case RCMethod::linear_fdet: {
      if (!consistent(subset, deps)) return r;
      FactSet bad = bottom_reaching_facts(facts, deps);
      for (const auto& a : rest)
        if (!bad.contains(a)) {
          r.blocking_fact = a;
          return r;
        }
      r.is_repair = true;
      return r;
    }
  }
  return r;
}

}  // namespace

RCResult check_repair(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps, RCMethod method,
                      std::size_t cap) {
  if (method != RCMethod::automatic) {
    check_precondition(facts, deps, method);
    if (!subset.is_subset_of(facts)) return RCResult{false, method, std::nullopt};
    return run_method(subset, facts, deps, method, cap);
  }
  auto methods = admissible_rc_methods(facts, deps);
  if (!subset.is_subset_of(facts)) return RCResult{false, methods.front(), std::nullopt};
  for (std::size_t i = 0; i < methods.size(); ++i) {
    try {
      return run_method(subset, facts, deps, methods[i], cap);
    } catch (const InstanceTooLarge&) {
      if (i + 1 == methods.size()) throw;
    }
  }
  return {};
}

bool is_repair(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps, RCMethod method,
               std::size_t cap) {
  return check_repair(subset, facts, deps, method, cap).is_repair;
}

FormulaPtr build_check_repair(std::span<const Dependency> deps, const Schema& schema) {
  if (!is_acyclic(deps)) throw MethodInapplicable("the dependency set is not acyclic");
  FreshNames fresh;
  for (const auto& c : constants_of(deps)) fresh.reserve(c);

  std::map<std::string, std::size_t> arity;
  for (const auto& d : deps) {
    for (const auto& a : d.body.atoms) arity[a.predicate] = a.args.size();
    for (const auto& q : d.head.disjuncts)
      for (const auto& a : q.body.atoms)
        if (!a.is_bottom()) arity[a.predicate] = a.args.size();
  }
  for (const auto& [p, n] : schema.predicates())
    if (p != kBottom) arity.emplace(p, n);

  std::vector<FormulaPtr> disjuncts;
  for (const auto& original : deps) {
    Dependency d = rename_apart(original, fresh);
    std::vector<FormulaPtr> parts;
    for (const auto& a : d.body.atoms) parts.push_back(fo::atom(aux(a)));
    for (const auto& i : d.body.ineqs) parts.push_back(fo::neq(i.left, i.right));
    parts.push_back(fo::negate(aux(fo::of(d.head))));
    disjuncts.push_back(fo::exists(d.forall_vars, fo::conj(std::move(parts))));
  }
  FormulaPtr inc_aux = fo::disj(std::move(disjuncts));

  std::vector<FormulaPtr> conjuncts{fo::negate(inc_aux)};
  for (const auto& [p, n] : arity) {
    std::vector<std::string> xs;
    std::vector<Term> args;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(fresh.next("x"));
      args.push_back(Term::var(xs.back()));
    }
    Atom alpha = make_atom(p, args);
    FormulaPtr incons = map_atoms(inc_aux, [&](const Atom& a) {
      if (!a.aux || a.predicate != p) return fo::atom(a);
      std::vector<FormulaPtr> eqs;
      for (std::size_t i = 0; i < n; ++i) eqs.push_back(fo::eq(a.args[i], args[i]));
      return fo::disj({fo::atom(a), fo::conj(std::move(eqs))});
    });
    FormulaPtr guard = fo::conj({fo::atom(alpha), fo::negate(fo::atom(aux(alpha)))});
    conjuncts.push_back(fo::forall(xs, fo::implies(guard, incons)));
  }
  return fo::conj(std::move(conjuncts));
}

}  // namespace cqa
