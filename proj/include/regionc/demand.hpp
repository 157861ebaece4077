#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regionc/heuristics.hpp"
#include "regionc/inliner.hpp"
#include "regionc/profiler.hpp"
#include "regionc/regions.hpp"

namespace regionc {

enum class TraceKind { EnterProcedure, LeaveProcedure, RegionCompleted, InlinePerformed, InlineRefused };

std::string_view trace_kind_name(TraceKind k);

struct TraceEvent {
  std::size_t seq = 0;
  TraceKind kind = TraceKind::EnterProcedure;
  std::string procedure;       // enter/leave/region_completed
  std::size_t size = 0;        // enter/leave: procedure size; region_completed: region size
  bool pass_through = false;   // leave
  std::size_t returned_size = 0;  // leave: entry/exit region code handed to the caller
  std::size_t absorbed = 0;    // leave: returned code from deeper calls now inside the handed-back regions
  int region = -1;             // region_completed
  RegionKind region_kind = RegionKind::Unclassified;
  std::size_t released = 0;    // region_completed: returned callee code retired with the region
  std::string caller, block, callee;  // inline events
  Reason reason = Reason::Ok;  // inline_refused
};

struct FormationTrace {
  std::vector<TraceEvent> events;
  std::vector<std::size_t> live_size_samples;  // after each event
};

/// Throws std::invalid_argument on an unbalanced or improperly nested trace.
std::size_t peak_live_size(const FormationTrace& trace);

struct RegionClassification {
  int entry_region = -1;
  int exit_region = -1;
  bool pass_through = false;
  std::vector<int> locals;
};

/// Regions among `regions` holding `entry`/`exit`; the rest of `members` are
/// local. Throws std::invalid_argument when entry or exit is uncovered.
RegionClassification classify_regions(const BlockRef& entry, const BlockRef& exit,
                                      const std::set<BlockRef>& members, const RegionSet& regions);
RegionClassification classify_regions(const Procedure& proc, const RegionSet& regions);

struct DemandResult {
  Program program;
  RegionSet regions;
  FormationTrace trace;
  std::vector<InlineRecord> inlines;
  std::size_t inlined_size = 0;  // original size plus inlining growth
  std::vector<std::string> removed;  // procedures left unreachable by inlining
};

DemandResult form_regions_demand(const Program& program, const HeuristicCombo& combo, const RegionParams& params,
                                 bool optimize = true);

}  // namespace regionc
