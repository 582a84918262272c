#include "cqa/entail.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "cqa/classify.hpp"
#include "cqa/repair.hpp"
#include "cqa/weakcons.hpp"

namespace cqa {

const char* to_string(Semantics s) { return s == Semantics::allrep ? "allrep" : "intrep"; }

std::optional<Semantics> parse_semantics(std::string_view s) {
  if (s == "allrep") return Semantics::allrep;
  if (s == "intrep") return Semantics::intrep;
  return std::nullopt;
}

const char* to_string(EntMethod m) {
  switch (m) {
    case EntMethod::automatic:
      return "auto";
    case EntMethod::brute:
      return "brute";
    case EntMethod::alg2_allrep:
      return "alg2_allrep";
    case EntMethod::alg3_intrep:
      return "alg3_intrep";
    case EntMethod::alg4_acyclic_fdet:
      return "alg4_acyclic_fdet";
    case EntMethod::linear_unique:
      return "linear_unique";
    case EntMethod::linear_fdet_images:
      return "linear_fdet_images";
    case EntMethod::rewrite_qent:
      return "rewrite_qent";
    case EntMethod::rewrite_qent_al:
      return "rewrite_qent_al";
  }
  return "?";
}

std::optional<EntMethod> parse_ent_method(std::string_view s) {
  for (auto m : {EntMethod::automatic, EntMethod::brute, EntMethod::alg2_allrep, EntMethod::alg3_intrep,
                 EntMethod::alg4_acyclic_fdet, EntMethod::linear_unique, EntMethod::linear_fdet_images,
                 EntMethod::rewrite_qent, EntMethod::rewrite_qent_al})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::map<std::string, std::size_t> arities_of(std::span<const Dependency> deps) {
  std::map<std::string, std::size_t> out;
  for (const auto& d : deps) {
    for (const auto& a : d.body.atoms) out[a.predicate] = a.args.size();
    for (const auto& q : d.head.disjuncts)
      for (const auto& a : q.body.atoms)
        if (!a.is_bottom()) out[a.predicate] = a.args.size();
  }
  return out;
}

}  // namespace

std::size_t dependency_length(std::span<const Dependency> deps) {
  std::size_t k = 0;
  for (const auto& d : deps) {
    std::size_t head = 0;
    for (const auto& q : d.head.disjuncts)
      if (!q.is_bottom()) head = std::max(head, q.body.atoms.size());
    k = std::max(k, d.body.atoms.size() + head);
  }
  return k;
}

std::size_t alg4_bound(std::span<const Dependency> deps) {
  std::size_t k = dependency_length(deps);
  std::size_t out = 1;
  for (std::size_t i = 0; i <= deps.size(); ++i) out = sat_mul(out, k);
  return out;
}

std::size_t atom_set_count(std::span<const Dependency> deps) {
  // multisets of size <= K over l predicates: C(l + K, K)
  const std::size_t l = arities_of(deps).size();
  const std::size_t big_k = alg4_bound(deps);
  if (big_k == kSaturated) return l == 0 ? 1 : kSaturated;
  std::size_t c = 1;
  for (std::size_t i = 1; i <= l; ++i) {
    std::size_t num = sat_mul(c, big_k + i);
    if (num == kSaturated) return kSaturated;
    c = num / i;
  }
  return c;
}

namespace {

void require_boolean(const UCQ& q) {
  if (!q.is_boolean()) throw SchemaError("the query has free variables");
  if (!q.is_safe()) throw SchemaError("the query is not safe");
}

std::vector<std::string> query_variables(const UCQ& q) {
  std::vector<std::string> out;
  for (const auto& d : q.disjuncts) {
    for (const auto& v : d.exists_vars) out.push_back(v);
    for (const auto& v : variables(d.body)) out.push_back(v);
  }
  return out;
}

FreshNames names_for(std::span<const Dependency> deps, const UCQ& q) {
  FreshNames fresh;
  for (const auto& c : constants_of(deps)) fresh.reserve(c);
  for (const auto& c : constants_of(q)) fresh.reserve(c);
  for (const auto& v : query_variables(q)) fresh.reserve(v);
  return fresh;
}

// WCons(A): every aux atom is matched against the atoms of A instead.
FormulaPtr restrict_aux(const FormulaPtr& wcons, const std::vector<Atom>& atoms) {
  return map_atoms(wcons, [&](const Atom& a) {
    if (!a.aux) return fo::atom(a);
    std::vector<FormulaPtr> options;
    for (const auto& b : atoms) {
      if (b.predicate != a.predicate || b.args.size() != a.args.size()) continue;
      std::vector<FormulaPtr> parts{fo::atom(b)};
      for (std::size_t i = 0; i < b.args.size(); ++i) parts.push_back(fo::eq(a.args[i], b.args[i]));
      options.push_back(fo::conj(std::move(parts)));
    }
    return fo::disj(std::move(options));
  });
}

// Calls fn on each multiset (as nondecreasing index vector) of size <= max_size over n symbols.
void for_each_multiset(std::size_t n, std::size_t max_size, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> cur;
  fn(cur);
  if (n == 0) return;
  for (std::size_t size = 1; size <= max_size; ++size) {
    cur.assign(size, 0);
    while (true) {
      fn(cur);
      std::size_t i = size;
      while (i > 0 && cur[i - 1] == n - 1) --i;
      if (i == 0) break;
      std::size_t v = cur[i - 1] + 1;
      for (std::size_t j = i - 1; j < size; ++j) cur[j] = v;
    }
  }
}

}  // namespace

FormulaPtr build_qent(const UCQ& query, std::span<const Dependency> deps, std::size_t max_atom_sets) {
  require_boolean(query);
  if (!is_acyclic(deps)) throw MethodInapplicable("the dependency set is not acyclic");
  const std::size_t count = atom_set_count(deps);
  if (count > max_atom_sets)
    throw FormulaTooLarge("the rewriting quantifies over " +
                          (count == kSaturated ? std::string("too many") : std::to_string(count)) +
                          " atom sets, above the limit of " + std::to_string(max_atom_sets));
  FreshNames fresh = names_for(deps, query);
  FormulaPtr wcons = build_wcons(deps, fresh);
  auto arity = arities_of(deps);
  std::vector<std::pair<std::string, std::size_t>> preds(arity.begin(), arity.end());

  struct AtomSet {
    std::vector<Atom> atoms;
    std::vector<std::string> vars;
    FormulaPtr wcons;
  };
  std::vector<AtomSet> sets;
  for_each_multiset(preds.size(), alg4_bound(deps), [&](const std::vector<std::size_t>& idx) {
    AtomSet s;
    for (auto i : idx) {
      Atom a{preds[i].first, {}, false};
      for (std::size_t j = 0; j < preds[i].second; ++j) {
        s.vars.push_back(fresh.next("y"));
        a.args.push_back(Term::var(s.vars.back()));
      }
      s.atoms.push_back(std::move(a));
    }
    s.wcons = restrict_aux(wcons, s.atoms);
    sets.push_back(std::move(s));
  });

  std::vector<FormulaPtr> disjuncts;
  for (const auto& q : query.disjuncts) {
    if (q.is_bottom()) continue;
    std::vector<FormulaPtr> parts{fo::of(q.body)};
    for (const auto& s : sets) {
      std::vector<Atom> with_query = s.atoms;
      with_query.insert(with_query.end(), q.body.atoms.begin(), q.body.atoms.end());
      std::vector<FormulaPtr> guard;
      for (const auto& a : s.atoms) guard.push_back(fo::atom(a));
      parts.push_back(fo::forall(
          s.vars, fo::implies(fo::conj(std::move(guard)), fo::implies(s.wcons, restrict_aux(wcons, with_query)))));
    }
    disjuncts.push_back(fo::exists(q.exists_vars, fo::conj(std::move(parts))));
  }
  return fo::disj(std::move(disjuncts));
}

FormulaPtr build_qent_al(const UCQ& query, std::span<const Dependency> deps) {
  require_boolean(query);
  if (!is_linear(deps)) throw MethodInapplicable("the dependency set is not linear");
  DependencySet sorted = sorted_topologically(deps);
  FreshNames fresh = names_for(deps, query);
  std::vector<FormulaPtr> disjuncts;
  for (const auto& q : query.disjuncts) {
    if (q.is_bottom()) continue;
    std::vector<FormulaPtr> parts{fo::of(q.body)};
    for (const auto& a : q.body.atoms) parts.push_back(build_wcons_al_atom(a, sorted, fresh));
    disjuncts.push_back(fo::exists(q.exists_vars, fo::conj(std::move(parts))));
  }
  return fo::disj(std::move(disjuncts));
}

std::vector<EntMethod> admissible_ent_methods(const FactSet& facts, std::span<const Dependency> deps,
                                              Semantics sem) {
  const bool linear = is_linear(deps);
  const bool acyclic = is_acyclic(deps);
  const bool fdet = is_fdet(deps, facts);
  std::vector<EntMethod> out;
  if (acyclic && linear) out.push_back(EntMethod::rewrite_qent_al);
  if (linear && fdet) out.push_back(EntMethod::linear_fdet_images);
  if (sem == Semantics::intrep && acyclic && fdet) {
    if (alg4_bound(deps) <= 4) out.push_back(EntMethod::rewrite_qent);
    out.push_back(EntMethod::alg4_acyclic_fdet);
  }
  if (linear) out.push_back(EntMethod::linear_unique);
  out.push_back(sem == Semantics::allrep ? EntMethod::alg2_allrep : EntMethod::alg3_intrep);
  out.push_back(EntMethod::brute);
  return out;
}

namespace {

void require(bool ok, EntMethod m, const char* what) {
  if (!ok) throw MethodInapplicable(std::string("method ") + to_string(m) + " needs " + what);
}

void check_precondition(const FactSet& facts, std::span<const Dependency> deps, Semantics sem, EntMethod m) {
  switch (m) {
    case EntMethod::alg2_allrep:
      require(sem == Semantics::allrep, m, "AllRep semantics");
      break;
    case EntMethod::alg3_intrep:
      require(sem == Semantics::intrep, m, "IntRep semantics");
      break;
    case EntMethod::alg4_acyclic_fdet:
    case EntMethod::rewrite_qent:
      require(sem == Semantics::intrep, m, "IntRep semantics");
      require(is_acyclic(deps) && is_fdet(deps, facts), m, "acyclic FDET dependencies");
      break;
    case EntMethod::linear_unique:
      require(is_linear(deps), m, "linear dependencies");
      break;
    case EntMethod::linear_fdet_images:
      require(is_linear(deps) && is_fdet(deps, facts), m, "linear FDET dependencies");
      break;
    case EntMethod::rewrite_qent_al:
      require(is_linear(deps) && is_acyclic(deps), m, "acyclic linear dependencies");
      break;
    default:
      break;
  }
}

std::optional<FactSet> first_image_in(const UCQ& q, const FactSet& facts) {
  auto images = images_of_ucq(q, facts);
  if (images.empty()) return std::nullopt;
  return images.front();
}

bool fc_consistent(const FactSet& seed, const FactSet& facts, std::span<const Dependency> deps) {
  return consistent(forward_closure(seed, facts, deps).closure, deps);
}

std::size_t binomial_sum(std::size_t n, std::size_t k) {
  std::size_t total = 0, c = 1;
  for (std::size_t s = 0; s <= std::min(n, k); ++s) {
    if (s > 0) {
      c = sat_mul(c, n - s + 1);
      if (c == kSaturated) return kSaturated;
      c /= s;
    }
    if (total > kSaturated - c) return kSaturated;
    total += c;
  }
  return total;
}

// First D' (by size, then lexicographic) with |D'| <= bound, FC(D') consistent
// and FC(D' u M) inconsistent.
std::optional<FactSet> alg4_blocker(const FactSet& image, const FactSet& facts, std::span<const Dependency> deps,
                                    std::size_t bound) {
  const std::size_t n = facts.size();
  for (std::size_t size = 0; size <= std::min(bound, n); ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<Fact> pick;
      for (auto i : idx) pick.push_back(facts[i]);
      FactSet d(std::move(pick));
      if (fc_consistent(d, facts, deps) && !fc_consistent(set_union(d, image), facts, deps)) return d;
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

EntResult run_method(const FactSet& facts, std::span<const Dependency> deps, const UCQ& query, Semantics sem,
                     EntMethod m, std::size_t cap) {
  EntResult r;
  r.semantics = sem;
  r.method = m;
  switch (m) {
    case EntMethod::automatic:
      break;
    case EntMethod::brute: {
      auto rs = enumerate_repairs(facts, deps, cap);
      if (sem == Semantics::allrep) {
        r.entailed = true;
        for (const auto& rep : rs.repairs)
          if (!holds(query, rep)) {
            r.entailed = false;
            r.countermodel = rep;
            break;
          }
      } else {
        r.image = first_image_in(query, rs.intersection);
        r.entailed = r.image.has_value();
      }
      return r;
    }
    case EntMethod::alg2_allrep: {
      auto t = build_tables(facts, deps, cap);
      r.entailed = true;
      for (Mask mask : masks_by_size(t.n)) {
        if (!t.is_repair(mask)) continue;
        FactSet d = subset_of(facts, mask);
        if (!holds(query, d)) {
          r.entailed = false;
          r.countermodel = d;
          break;
        }
      }
      return r;
    }
    case EntMethod::alg3_intrep: {
      auto t = build_tables(facts, deps, cap);
      auto order = masks_by_size(t.n);
      for (const auto& image : images_of_ucq(query, facts)) {
        Mask im = mask_of(facts, image);
        std::optional<Mask> blocker;
        for (Mask mask : order)
          if (t.weak[mask] && !t.weak[mask | im]) {
            blocker = mask;
            break;
          }
        if (!blocker) {
          r.entailed = true;
          r.image = image;
          return r;
        }
        r.blocking.push_back(subset_of(facts, *blocker));
      }
      return r;
    }
    case EntMethod::alg4_acyclic_fdet: {
      const std::size_t bound = alg4_bound(deps);
      const std::size_t limit = std::min(cap, kHardCap);
      if (binomial_sum(facts.size(), bound) > (std::size_t{1} << limit))
        throw InstanceTooLarge("subset search for the acyclic FDET algorithm exceeds the cap of " +
                               std::to_string(limit));
      for (const auto& image : images_of_ucq(query, facts)) {
        auto blocker = alg4_blocker(image, facts, deps, bound);
        if (!blocker) {
          r.entailed = true;
          r.image = image;
          return r;
        }
        r.blocking.push_back(*blocker);
      }
      return r;
    }
    case EntMethod::linear_unique: {
      FactSet rep = unique_repair_linear(facts, deps);
      r.image = first_image_in(query, rep);
      r.entailed = r.image.has_value();
      if (!r.entailed && sem == Semantics::allrep) r.countermodel = rep;
      return r;
    }
    case EntMethod::linear_fdet_images: {
      FactSet bad = bottom_reaching_facts(facts, deps);
      for (const auto& image : images_of_ucq(query, facts))
        if (set_intersection(image, bad).empty()) {
          r.entailed = true;
          r.image = image;
          return r;
        }
      return r;
    }
    case EntMethod::rewrite_qent:
      r.entailed = evaluate(build_qent(query, deps), facts);
      return r;
    case EntMethod::rewrite_qent_al:
      r.entailed = evaluate(build_qent_al(query, deps), facts);
      return r;
  }
  return r;
}

}  // namespace

EntResult decide_entailment(const FactSet& facts, std::span<const Dependency> deps, const UCQ& query, Semantics sem,
                            EntMethod method, std::size_t cap) {
  require_boolean(query);
  if (method != EntMethod::automatic) {
    check_precondition(facts, deps, sem, method);
    return run_method(facts, deps, query, sem, method, cap);
  }
  auto methods = admissible_ent_methods(facts, deps, sem);
  for (std::size_t i = 0; i < methods.size(); ++i) {
    try {
      return run_method(facts, deps, query, sem, methods[i], cap);
    } catch (const InstanceTooLarge&) {
      if (i + 1 == methods.size()) throw;
    } catch (const FormulaTooLarge&) {
      if (i + 1 == methods.size()) throw;
    }
  }
  return {};
}

bool entails(const FactSet& facts, std::span<const Dependency> deps, const UCQ& query, Semantics sem,
             EntMethod method, std::size_t cap) {
  return decide_entailment(facts, deps, query, sem, method, cap).entailed;
}

bool instance_check(const FactSet& facts, std::span<const Dependency> deps, const Fact& fact, EntMethod method,
                    std::size_t cap) {
  if (!facts.contains(fact)) return false;
  UCQ q{{CQ{{}, Conjunction{{fact}, {}}}}};
  Semantics sem = method == EntMethod::alg2_allrep ? Semantics::allrep : Semantics::intrep;
  return entails(facts, deps, q, sem, method, cap);
}

}  // namespace cqa
