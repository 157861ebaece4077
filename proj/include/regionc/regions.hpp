#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "regionc/ir.hpp"

namespace regionc {

struct RegionParams {
  Weight desirability_ratio = Weight(1, 2);
  std::size_t max_region_blocks = 200;
};

enum class RegionKind { Local, Entry, Exit, PassThrough, Unclassified };

std::string_view region_kind_name(RegionKind k);

struct Region {
  int id = 0;
  std::vector<BlockRef> blocks;
  BlockRef seed;
  BlockRef entry;
  RegionKind kind = RegionKind::Unclassified;
};

struct RegionSet {
  std::vector<Region> regions;
};

/// Instruction count of the region's blocks as they stand in `program`.
std::size_t code_size(const Program& program, const Region& region);

/// Max weight; ties go to the naturally smallest id. Throws on an empty worklist.
std::string select_seed(const Procedure& proc, const std::set<std::string>& worklist);

bool is_desirable(const Block& x, const Block& y, const Block& seed, std::size_t region_blocks,
                  const RegionParams& params, bool phased);

/// Code size allowance shared by inlining and tail duplication.
struct GrowthBudget {
  std::size_t original = 0;
  std::size_t current = 0;
  Weight limit = Weight(1, 5);

  /// Takes `n` more instructions if the total stays within original × (1 + limit).
  bool admit(std::size_t n);
};

struct PhasedRegions {
  Procedure procedure;  // after tail duplication
  RegionSet regions;
};

/// Without a budget every side entry is tail duplicated. With one, a region
/// whose duplication would overrun it gives its side-entered tail back to the
/// worklist instead.
PhasedRegions form_regions_phased(const Procedure& proc, const RegionParams& params, GrowthBudget* budget = nullptr);

/// Side-entered blocks plus the region blocks they reach without passing `entry`.
std::set<std::string> tail_closure(const Procedure& proc, const std::set<std::string>& region,
                                   const std::string& entry);

struct TailDuplication {
  Procedure procedure;
  std::vector<std::string> clones;
  std::map<std::string, std::string> clone_of;  // clone id -> original id
};

/// Makes `region` single-entry at `entry` by cloning side-entered blocks and
/// their region-internal downstream blocks; clone weights take the share of
/// flow arriving from outside.
TailDuplication tail_duplicate(const Procedure& proc, const std::set<std::string>& region, const std::string& entry);

/// Blocks other than `entry` with a predecessor outside `region`.
std::vector<std::string> side_entries(const Procedure& proc, const std::set<std::string>& region,
                                      const std::string& entry);

struct EncapsulatedRegion {
  std::string procedure;
  Procedure unit;  // prologue, region blocks, epilogue
  std::string prologue;
  std::string epilogue;
  std::vector<std::string> live_in;
  std::vector<std::string> live_out;
  std::map<std::string, std::vector<std::string>> original_successors;
  std::map<std::string, Instruction> original_returns;
};

/// Throws std::invalid_argument if the region has more than one entry.
EncapsulatedRegion encapsulate(const Procedure& proc, const std::set<std::string>& region, const std::string& entry);

/// Throws std::invalid_argument if the unit does not belong to `proc`.
Procedure reintegrate(const EncapsulatedRegion& unit, const Procedure& proc);

/// Block-local constant folding and dead-instruction elimination. Never
/// grows the unit and never touches live-out registers.
EncapsulatedRegion optimize_region(const EncapsulatedRegion& unit);

/// Registers live on entry to each block.
std::map<std::string, std::set<std::string>> live_in_sets(const Procedure& proc);

}  // namespace regionc
