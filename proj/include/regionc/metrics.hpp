#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regionc/ir.hpp"
#include "regionc/regions.hpp"

namespace regionc {

inline constexpr double kInvarianceThreshold = 0.01;

struct MetricsReport {
  std::string strategy;  // combo name
  double memory_avg = 0;
  std::size_t memory_worst = 0;
  std::size_t memory_phased = 0;
  std::size_t peak_live_size = 0;
  std::size_t original_size = 0;
  std::size_t final_size = 0;
  std::size_t inlined_size = 0;
  double code_growth_pct = 0;
  std::size_t unit_count = 0;
  double unit_avg_size = 0;
  double profile_variance = 0;
  double pct_invariant_units = 0;
  double pct_interprocedural_ops = 0;
  std::size_t interprocedural_regions = 0;
  std::size_t inlined_sites = 0;
  std::uint64_t dynamic_cost = 0;
  std::uint64_t original_dynamic_cost = 0;

  bool operator==(const MetricsReport&) const = default;
};

std::size_t memory_requirement_phased(const Program& program_after_aggressive_inline);

struct ChainMemory {
  double avg = 0;
  std::size_t worst = 0;
  std::size_t chains = 0;
};

/// Sums procedure sizes over every maximal acyclic call chain from the entry.
ChainMemory memory_requirement_demand(const Program& program);

/// Throws std::invalid_argument for a zero-size original.
double code_growth_pct(std::size_t original, std::size_t compiled);
double code_growth_pct(const Program& original, const Program& compiled);

struct UnitStats {
  std::size_t count = 0;
  double avg_size = 0;
};

/// Throws std::invalid_argument for an empty region set.
UnitStats unit_stats(const Program& program, const RegionSet& regions);

struct Variance {
  double variance = 0;
  bool invariant = true;
};

/// Population standard deviation of weights normalized by their maximum.
Variance profile_variance(const std::vector<Weight>& weights, double threshold = kInvarianceThreshold);
Variance profile_variance(const Program& program, const Region& unit, double threshold = kInvarianceThreshold);

struct Scope {
  double pct_interprocedural_ops = 0;
  std::size_t interprocedural_regions = 0;
};

/// An operation is interprocedural when its block's origin differs from the
/// origin of its region's seed.
Scope interprocedural_scope(const Program& program, const RegionSet& regions);

}  // namespace regionc
