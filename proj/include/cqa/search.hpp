#pragma once

// Exhaustive subset kernels used by the brute-force oracle and by the
// subset-search algorithms. Subsets of a fact set are bitmasks over the
// canonical fact order. Every kernel has an OpenMP version and a serial
// reference that must produce identical tables.

#include <cstdint>
#include <span>
#include <vector>

#include "cqa/core.hpp"

namespace cqa {

inline constexpr std::size_t kDefaultCap = 20;
inline constexpr std::size_t kHardCap = 28;

using Mask = std::uint32_t;

/// Throws InstanceTooLarge when |facts| > cap (or above the hard limit).
void check_cap(const FactSet& facts, std::size_t cap);

FactSet subset_of(const FactSet& facts, Mask mask);
/// Bitmask of `subset` inside `facts`; throws SchemaError if not a subset.
Mask mask_of(const FactSet& facts, const FactSet& subset);

/// table[m] = 1 iff subset m is consistent with the dependencies.
std::vector<std::uint8_t> consistency_table(const FactSet& facts, std::span<const Dependency> deps);
std::vector<std::uint8_t> consistency_table_serial(const FactSet& facts, std::span<const Dependency> deps);

/// weak[m] = 1 iff some superset of m is consistent.
std::vector<std::uint8_t> weak_table(const std::vector<std::uint8_t>& consistent, std::size_t n);
std::vector<std::uint8_t> weak_table_serial(const std::vector<std::uint8_t>& consistent, std::size_t n);

struct SubsetTables {
  std::size_t n = 0;
  std::vector<std::uint8_t> consistent;
  std::vector<std::uint8_t> weak;

  bool is_repair(Mask m) const;
};

SubsetTables build_tables(const FactSet& facts, std::span<const Dependency> deps, std::size_t cap,
                          bool parallel = true);

/// Repair masks in increasing numeric order.
std::vector<Mask> repair_masks(const SubsetTables& t);
std::vector<Mask> repair_masks_serial(const SubsetTables& t);

/// All masks of n bits ordered by size, then numerically.
std::vector<Mask> masks_by_size(std::size_t n);

}  // namespace cqa
