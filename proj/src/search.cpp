#include "cqa/search.hpp"

#include <algorithm>
#include <bit>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cqa {

void check_cap(const FactSet& facts, std::size_t cap) {
  const std::size_t limit = std::min(cap, kHardCap);
  if (facts.size() > limit)
    throw InstanceTooLarge("exhaustive search over " + std::to_string(facts.size()) + " facts exceeds the cap of " +
                           std::to_string(limit));
}

FactSet subset_of(const FactSet& facts, Mask mask) {
  std::vector<Fact> out;
  for (std::size_t i = 0; i < facts.size(); ++i)
    if (mask & (Mask{1} << i)) out.push_back(facts[i]);
  return FactSet(std::move(out));
}

Mask mask_of(const FactSet& facts, const FactSet& subset) {
  Mask m = 0;
  for (const auto& f : subset) {
    auto i = facts.index_of(f);
    if (i == facts.size()) throw SchemaError("fact " + to_string(f) + " is not in the database");
    m |= Mask{1} << i;
  }
  return m;
}

std::vector<std::uint8_t> consistency_table_serial(const FactSet& facts, std::span<const Dependency> deps) {
  const std::size_t total = std::size_t{1} << facts.size();
  std::vector<std::uint8_t> table(total);
  for (std::size_t m = 0; m < total; ++m)
    table[m] = consistent(subset_of(facts, static_cast<Mask>(m)), deps) ? 1 : 0;
  return table;
}

std::vector<std::uint8_t> consistency_table(const FactSet& facts, std::span<const Dependency> deps) {
  const std::int64_t total = std::int64_t{1} << facts.size();
  std::vector<std::uint8_t> table(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t m = 0; m < total; ++m)
    table[static_cast<std::size_t>(m)] = consistent(subset_of(facts, static_cast<Mask>(m)), deps) ? 1 : 0;
  return table;
}

std::vector<std::uint8_t> weak_table_serial(const std::vector<std::uint8_t>& consistent, std::size_t n) {
  const std::size_t total = std::size_t{1} << n;
  std::vector<std::uint8_t> weak(total);
  for (std::size_t m = total; m-- > 0;) {
    std::uint8_t w = consistent[m];
    for (std::size_t b = 0; b < n && !w; ++b)
      if (!(m & (std::size_t{1} << b))) w = weak[m | (std::size_t{1} << b)];
    weak[m] = w;
  }
  return weak;
}

std::vector<std::uint8_t> weak_table(const std::vector<std::uint8_t>& consistent, std::size_t n) {
  std::vector<std::uint8_t> weak = consistent;
  const std::int64_t total = std::int64_t{1} << n;
  for (std::size_t b = 0; b < n; ++b) {
    const std::int64_t bit = std::int64_t{1} << b;
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < total; ++m)
      if (!(m & bit)) weak[static_cast<std::size_t>(m)] |= weak[static_cast<std::size_t>(m | bit)];
  }
  return weak;
}

bool SubsetTables::is_repair(Mask m) const {
  if (!consistent[m]) return false;
  for (std::size_t b = 0; b < n; ++b) {
    Mask bit = Mask{1} << b;
    if (!(m & bit) && weak[m | bit]) return false;
  }
  return true;
}

SubsetTables build_tables(const FactSet& facts, std::span<const Dependency> deps, std::size_t cap, bool parallel) {
  check_cap(facts, cap);
  SubsetTables t;
  t.n = facts.size();
  t.consistent = parallel ? consistency_table(facts, deps) : consistency_table_serial(facts, deps);
  t.weak = parallel ? weak_table(t.consistent, t.n) : weak_table_serial(t.consistent, t.n);
  return t;
}

std::vector<Mask> repair_masks_serial(const SubsetTables& t) {
  std::vector<Mask> out;
  const std::size_t total = std::size_t{1} << t.n;
  for (std::size_t m = 0; m < total; ++m)
    if (t.is_repair(static_cast<Mask>(m))) out.push_back(static_cast<Mask>(m));
  return out;
}

std::vector<Mask> repair_masks(const SubsetTables& t) {
  const std::int64_t total = std::int64_t{1} << t.n;
  std::vector<std::uint8_t> flag(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::int64_t m = 0; m < total; ++m) flag[static_cast<std::size_t>(m)] = t.is_repair(static_cast<Mask>(m));
  std::vector<Mask> out;
  for (std::int64_t m = 0; m < total; ++m)
    if (flag[static_cast<std::size_t>(m)]) out.push_back(static_cast<Mask>(m));
  return out;
}

std::vector<Mask> masks_by_size(std::size_t n) {
  std::vector<Mask> out(std::size_t{1} << n);
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = static_cast<Mask>(m);
  std::stable_sort(out.begin(), out.end(),
                   [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });
  return out;
}

}  // namespace cqa
