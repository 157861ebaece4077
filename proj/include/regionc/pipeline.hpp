#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regionc/demand.hpp"
#include "regionc/heuristics.hpp"
#include "regionc/inliner.hpp"
#include "regionc/ir.hpp"
#include "regionc/metrics.hpp"
#include "regionc/profiler.hpp"
#include "regionc/regions.hpp"

namespace regionc {

struct CompileOptions {
  HeuristicCombo combo = combo_config("H0");
  RegionParams params;
  std::vector<std::int64_t> input;
  /// Re-profile even when the source carries weights.
  bool reprofile = false;
  bool optimize = true;
  std::uint64_t call_overhead = kDefaultCallOverhead;
  std::uint64_t fuel = kDefaultFuel;
};

struct CompilationResult {
  std::string combo;
  Strategy strategy = Strategy::ProcedureBased;
  SecondOrderPolicy policy;
  Program program_in;   // profiled source
  Program program_out;
  RegionSet regions;
  std::optional<FormationTrace> trace;
  std::vector<InlineRecord> inlines;
  std::vector<std::string> removed_procedures;
  ExecutionProfile profile_in;
  ExecutionProfile profile_out;
  std::size_t inlined_size = 0;
  std::size_t memory_phased = 0;
  std::uint64_t call_overhead = kDefaultCallOverhead;
  std::vector<std::int64_t> input;
  double compile_ms = 0;
  MetricsReport report;
};

/// Uses the weights in `program` when it carries any and `reprofile` is off;
/// otherwise profiles it on `input` first.
CompilationResult compile(const Program& program, const CompileOptions& options);

MetricsReport compute_report(const CompilationResult& result);

struct Comparison {
  std::vector<std::string> combos;
  std::vector<std::string> metrics;
  std::vector<std::vector<double>> values;  // [metric][combo]
  std::vector<std::string> delta_labels;    // "H1-H0", ...
  std::vector<std::vector<double>> deltas;  // [metric][pair]
};

/// Columns per combo plus deltas of every later combo against the first.
/// Throws std::invalid_argument when results come from different sources.
Comparison compare(const std::vector<CompilationResult>& results);

std::string format_table(const Comparison& c);
std::string format_csv(const Comparison& c);

struct GenShape {
  std::size_t procs = 4;
  std::size_t max_blocks = 12;
  double call_density = 0.3;
  double loop_prob = 0.3;
  bool recursive = false;
  bool call_free() const { return procs == 1 || call_density <= 0; }
};

Program generate_program(std::uint64_t seed, const GenShape& shape);
/// The input fed to a generated program's entry procedure.
std::vector<std::int64_t> generated_input(std::uint64_t seed);

/// Structural checks of one compilation: partition, single entry, semantics,
/// validity, growth cap, recursion gate. Each failure is one message.
std::vector<std::string> check_result(const CompilationResult& result);

/// Blocks of `program` that appear in zero or several regions, and region
/// blocks missing from the program.
std::vector<std::string> partition_violations(const Program& program, const RegionSet& regions);
std::vector<std::string> side_entry_violations(const Program& program, const RegionSet& regions);

}  // namespace regionc
