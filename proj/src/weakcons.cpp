#include "cqa/weakcons.hpp"

#include <algorithm>
#include <deque>

#include "cqa/classify.hpp"

namespace cqa {

const char* to_string(WCMethod m) {
  switch (m) {
    case WCMethod::automatic:
      return "auto";
    case WCMethod::brute:
      return "brute";
    case WCMethod::fc:
      return "fc";
    case WCMethod::linear_repair:
      return "linear_repair";
    case WCMethod::reach:
      return "reach";
    case WCMethod::rewrite_acyclic_fdet:
      return "rewrite_acyclic_fdet";
    case WCMethod::rewrite_acyclic_linear:
      return "rewrite_acyclic_linear";
  }
  return "?";
}

std::optional<WCMethod> parse_wc_method(std::string_view s) {
  for (auto m : {WCMethod::automatic, WCMethod::brute, WCMethod::fc, WCMethod::linear_repair, WCMethod::reach,
                 WCMethod::rewrite_acyclic_fdet, WCMethod::rewrite_acyclic_linear})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

ForwardClosure forward_closure(const FactSet& seed, const FactSet& facts, std::span<const Dependency> deps) {
  ForwardClosure fc;
  fc.closure = seed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < deps.size(); ++i) {
      for (const auto& sigma : instantiations(deps[i].body, fc.closure)) {
        auto images = head_images(deps[i], sigma, facts);
        if (images.size() > 1)
          throw NotFdet("dependency " + std::to_string(i + 1) + " has " + std::to_string(images.size()) +
                        " head images for one body instantiation");
        if (images.size() == 1 && !images.front().is_subset_of(fc.closure)) {
          fc.closure.insert_all(images.front());
          fc.trace.push_back({i, sigma, images.front()});
          changed = true;
        }
      }
    }
  }
  return fc;
}

FactSet unique_repair_linear(const FactSet& facts, std::span<const Dependency> deps) {
  if (!is_linear(deps)) throw MethodInapplicable("the dependency set is not linear");
  FactSet current = facts;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& d : deps) {
      std::vector<Fact> doomed;
      for_each_instantiation(d.body, current, {}, [&](const Substitution& s) {
        if (!has_head_image(d, s, current))
          for (const auto& f : image(d.body, s)) doomed.push_back(f);
        return true;
      });
      for (const auto& f : doomed) changed |= current.erase(f);
    }
  }
  return current;
}

FactSet bottom_reaching_facts(const FactSet& facts, std::span<const Dependency> deps) {
  if (!is_linear(deps)) throw MethodInapplicable("reachability needs linear dependencies");
  const std::size_t n = facts.size();
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::uint8_t> bad(n, 0);
  std::deque<std::size_t> queue;
  for (const auto& d : deps) {
    for_each_instantiation(d.body, facts, {}, [&](const Substitution& s) {
      std::size_t beta = facts.index_of(cqa::apply(s, d.body.atoms.front()));
      auto images = head_images(d, s, facts);
      if (images.size() > 1) throw MethodInapplicable("the dependency set is not FDET for the database");
      if (images.empty()) {
        if (!bad[beta]) {
          bad[beta] = 1;
          queue.push_back(beta);
        }
      } else {
        for (const auto& g : images.front()) preds[facts.index_of(g)].push_back(beta);
      }
      return true;
    });
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto u : preds[v])
      if (!bad[u]) {
        bad[u] = 1;
        queue.push_back(u);
      }
  }
  std::vector<Fact> out;
  for (std::size_t i = 0; i < n; ++i)
    if (bad[i]) out.push_back(facts[i]);
  return FactSet(std::move(out));
}

bool weakly_consistent_reach(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps) {
  if (!subset.is_subset_of(facts)) return false;
  auto bad = bottom_reaching_facts(facts, deps);
  return set_intersection(subset, bad).empty();
}

bool weakly_consistent_reach(const Fact& fact, const FactSet& facts, std::span<const Dependency> deps) {
  return weakly_consistent_reach(FactSet{fact}, facts, deps);
}

std::optional<FactSet> weakly_consistent_brute(const FactSet& subset, const FactSet& facts,
                                               std::span<const Dependency> deps, std::size_t cap) {
  check_cap(facts, cap);
  if (!subset.is_subset_of(facts)) return std::nullopt;
  FactSet rest = set_difference(facts, subset);
  for (Mask m : masks_by_size(rest.size())) {
    FactSet candidate = set_union(subset, subset_of(rest, m));
    if (consistent(candidate, deps)) return candidate;
  }
  return std::nullopt;
}

namespace {

std::vector<FormulaPtr> equalities_for(const Atom& alpha, const TermMap& sigma) {
  std::vector<FormulaPtr> out;
  std::vector<std::string> seen;
  for (const auto& t : alpha.args) {
    if (!t.is_variable() || std::find(seen.begin(), seen.end(), t.name) != seen.end()) continue;
    seen.push_back(t.name);
    auto it = sigma.find(t.name);
    if (it != sigma.end()) out.push_back(fo::eq(t, it->second));
  }
  return out;
}

TermMap without_vars_of(const Atom& alpha, TermMap sigma) {
  for (const auto& t : alpha.args)
    if (t.is_variable()) sigma.erase(t.name);
  return sigma;
}

std::vector<std::string> unbound(const std::vector<std::string>& vars, const TermMap& sigma) {
  std::vector<std::string> out;
  for (const auto& v : vars)
    if (!sigma.count(v)) out.push_back(v);
  return out;
}

class WConsBuilder {
 public:
  WConsBuilder(DependencySet sorted, FreshNames& fresh) : sorted_(std::move(sorted)), fresh_(fresh) {}

  // alpha is in FC(D', D, {tau_1..tau_i}).
  FormulaPtr in_fc(const Atom& alpha, std::size_t i) {
    std::vector<FormulaPtr> parts{fo::atom(aux(alpha))};
    for (std::size_t j = 1; j <= i; ++j) {
      Dependency tau = rename_apart(sorted_[j - 1], fresh_);
      for (const auto& q : tau.head.disjuncts) {
        if (q.is_bottom()) continue;
        for (const auto& b : q.body.atoms) {
          auto sigma = unify_atoms(alpha, b);
          if (!sigma) continue;
          std::vector<FormulaPtr> conj = equalities_for(alpha, *sigma);
          TermMap local = without_vars_of(alpha, *sigma);
          Conjunction body = cqa::apply(local, tau.body);
          Conjunction head = cqa::apply(local, q.body);
          conj.push_back(fo::of(body));
          conj.push_back(fo::of(head));
          for (const auto& beta : body.atoms) conj.push_back(in_fc(beta, j - 1));
          std::vector<std::string> xs = tau.forall_vars;
          xs.insert(xs.end(), q.exists_vars.begin(), q.exists_vars.end());
          parts.push_back(fo::exists(unbound(xs, local), fo::conj(std::move(conj))));
        }
      }
    }
    return fo::disj(std::move(parts));
  }

  FormulaPtr sentence() {
    const std::size_t h = sorted_.size();
    std::vector<FormulaPtr> parts;
    for (const auto& original : sorted_) {
      Dependency tau = rename_apart(original, fresh_);
      std::vector<FormulaPtr> lhs;
      for (const auto& a : tau.body.atoms) lhs.push_back(in_fc(a, h));
      for (const auto& i : tau.body.ineqs) lhs.push_back(fo::neq(i.left, i.right));
      std::vector<FormulaPtr> rhs;
      for (const auto& q : tau.head.disjuncts) {
        if (q.is_bottom()) {
          rhs.push_back(fo::falsity());
          continue;
        }
        std::vector<FormulaPtr> c;
        for (const auto& b : q.body.atoms) c.push_back(in_fc(b, h));
        for (const auto& i : q.body.ineqs) c.push_back(fo::neq(i.left, i.right));
        rhs.push_back(fo::exists(q.exists_vars, fo::conj(std::move(c))));
      }
      parts.push_back(fo::forall(tau.forall_vars, fo::implies(fo::conj(std::move(lhs)), fo::disj(std::move(rhs)))));
    }
    return fo::conj(std::move(parts));
  }

 private:
  DependencySet sorted_;
  FreshNames& fresh_;
};

FormulaPtr wcons_al(const Atom& alpha, std::span<const Dependency> sorted, std::size_t from, FreshNames& fresh) {
  std::vector<FormulaPtr> parts;
  for (std::size_t i = from; i < sorted.size(); ++i) {
    Dependency tau = rename_apart(sorted[i], fresh);
    auto sigma = unify_atoms(alpha, tau.body.atoms.front());
    if (!sigma) continue;
    std::vector<FormulaPtr> cond = equalities_for(alpha, *sigma);
    TermMap local = without_vars_of(alpha, *sigma);
    for (const auto& ineq : tau.body.ineqs)
      cond.push_back(fo::neq(cqa::apply(local, ineq.left), cqa::apply(local, ineq.right)));
    std::vector<FormulaPtr> options;
    for (const auto& q : tau.head.disjuncts) {
      if (q.is_bottom()) {
        options.push_back(fo::falsity());
        continue;
      }
      Conjunction head = cqa::apply(local, q.body);
      std::vector<FormulaPtr> c{fo::of(head)};
      for (const auto& beta : head.atoms) c.push_back(wcons_al(beta, sorted, i + 1, fresh));
      std::vector<std::string> xs = tau.forall_vars;
      xs.insert(xs.end(), q.exists_vars.begin(), q.exists_vars.end());
      options.push_back(fo::exists(unbound(xs, local), fo::conj(std::move(c))));
    }
    parts.push_back(fo::implies(fo::conj(std::move(cond)), fo::disj(std::move(options))));
  }
  return fo::conj(std::move(parts));
}

FreshNames names_for(std::span<const Dependency> deps) {
  FreshNames fresh;
  for (const auto& c : constants_of(deps)) fresh.reserve(c);
  return fresh;
}

}  // namespace

FormulaPtr build_wcons(std::span<const Dependency> deps) {
  FreshNames fresh = names_for(deps);
  return build_wcons(deps, fresh);
}

FormulaPtr build_wcons(std::span<const Dependency> deps, FreshNames& fresh) {
  return WConsBuilder(sorted_topologically(deps), fresh).sentence();
}

FormulaPtr build_wcons_al_atom(const Atom& alpha, std::span<const Dependency> sorted, FreshNames& fresh) {
  return wcons_al(alpha, sorted, 0, fresh);
}

FormulaPtr build_wcons_al(std::span<const Dependency> deps) {
  if (!is_linear(deps)) throw MethodInapplicable("the dependency set is not linear");
  DependencySet sorted = sorted_topologically(deps);
  FreshNames fresh = names_for(deps);
  std::map<std::string, std::size_t> arity;
  for (const auto& d : deps) {
    for (const auto& a : d.body.atoms) arity[a.predicate] = a.args.size();
    for (const auto& q : d.head.disjuncts)
      for (const auto& a : q.body.atoms)
        if (!a.is_bottom()) arity[a.predicate] = a.args.size();
  }
  std::vector<FormulaPtr> parts;
  for (const auto& [p, n] : arity) {
    Atom alpha{p, {}, false};
    std::vector<std::string> xs;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(fresh.next("x"));
      alpha.args.push_back(Term::var(xs.back()));
    }
    parts.push_back(fo::forall(xs, fo::implies(fo::atom(aux(alpha)), wcons_al(alpha, sorted, 0, fresh))));
  }
  return fo::conj(std::move(parts));
}

std::vector<WCMethod> admissible_wc_methods(const FactSet& facts, std::span<const Dependency> deps) {
  const bool linear = is_linear(deps);
  const bool acyclic = is_acyclic(deps);
  const bool fdet = is_fdet(deps, facts);
  std::vector<WCMethod> out;
  if (acyclic && linear) out.push_back(WCMethod::rewrite_acyclic_linear);
  if (acyclic && fdet) out.push_back(WCMethod::rewrite_acyclic_fdet);
  if (linear && fdet) out.push_back(WCMethod::reach);
  if (linear) out.push_back(WCMethod::linear_repair);
  if (fdet) out.push_back(WCMethod::fc);
  out.push_back(WCMethod::brute);
  return out;
}

namespace {

void require(bool ok, WCMethod m, const char* what) {
  if (!ok) throw MethodInapplicable(std::string("method ") + to_string(m) + " needs " + what);
}

WCResult run_method(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps, WCMethod m,
                    std::size_t cap) {
  WCResult r;
  r.method = m;
  switch (m) {
    case WCMethod::automatic:
      break;
    case WCMethod::brute:
      r.witness = weakly_consistent_brute(subset, facts, deps, cap);
      r.weakly_consistent = r.witness.has_value();
      return r;
    case WCMethod::fc:
      require(is_fdet(deps, facts), m, "an FDET dependency set");
      r.weakly_consistent = consistent(forward_closure(subset, facts, deps).closure, deps);
      return r;
    case WCMethod::linear_repair: {
      require(is_linear(deps), m, "linear dependencies");
      FactSet rep = unique_repair_linear(facts, deps);
      r.weakly_consistent = subset.is_subset_of(rep);
      if (r.weakly_consistent) r.witness = rep;
      return r;
    }
    case WCMethod::reach:
      require(is_linear(deps) && is_fdet(deps, facts), m, "linear FDET dependencies");
      r.weakly_consistent = weakly_consistent_reach(subset, facts, deps);
      return r;
    case WCMethod::rewrite_acyclic_fdet:
      require(is_acyclic(deps) && is_fdet(deps, facts), m, "acyclic FDET dependencies");
      r.weakly_consistent = evaluate(build_wcons(deps), facts, subset);
      return r;
    case WCMethod::rewrite_acyclic_linear:
      require(is_acyclic(deps) && is_linear(deps), m, "acyclic linear dependencies");
      r.weakly_consistent = evaluate(build_wcons_al(deps), facts, subset);
      return r;
  }
  return r;
}

}  // namespace

WCResult decide_weak_consistency(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps,
                                 WCMethod method, std::size_t cap) {
  if (method != WCMethod::automatic) {
    if (!subset.is_subset_of(facts)) {
      run_method(FactSet{}, facts, deps, method, cap);  // still enforce the precondition
      return WCResult{false, method, std::nullopt};
    }
    return run_method(subset, facts, deps, method, cap);
  }
  auto methods = admissible_wc_methods(facts, deps);
  if (!subset.is_subset_of(facts)) return WCResult{false, methods.front(), std::nullopt};
  for (std::size_t i = 0; i < methods.size(); ++i) {
    try {
      return run_method(subset, facts, deps, methods[i], cap);
    } catch (const InstanceTooLarge&) {
      if (i + 1 == methods.size()) throw;
    }
  }
  return {};
}

bool weakly_consistent(const FactSet& subset, const FactSet& facts, std::span<const Dependency> deps,
                       WCMethod method, std::size_t cap) {
  return decide_weak_consistency(subset, facts, deps, method, cap).weakly_consistent;
}

}  // namespace cqa
