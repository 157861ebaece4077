#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "regionc/ir.hpp"
#include "regionc/profiler.hpp"

namespace regionc {

inline constexpr std::int64_t kLoopDepthWeight = 10;

enum class FirstOrder { None, ProfileTimeDesc, CallsitesDescSizeAsc, LoopCallWeightDescSizeAsc };
enum class Strategy { ProcedureBased, Phased, Demand };

std::string_view first_order_name(FirstOrder f);
std::string_view strategy_name(Strategy s);

struct SecondOrderPolicy {
  std::optional<Weight> frequency_ratio;
  std::optional<std::size_t> max_callee_size;
  bool block_recursion = false;
  Weight growth_limit = Weight(1, 5);
  std::optional<std::int64_t> min_loop_call_weight;
};

struct HeuristicCombo {
  std::string name;
  FirstOrder first = FirstOrder::None;
  SecondOrderPolicy second;
  Strategy strategy = Strategy::ProcedureBased;
  std::int64_t loop_depth_weight = kLoopDepthWeight;
};

/// Throws std::invalid_argument for names outside H0..H6.
HeuristicCombo combo_config(const std::string& name);

/// Applies a `key=value` override (frequency_ratio, max_callee_size,
/// block_recursion, growth_limit, min_loop_call_weight, loop_depth_weight).
void apply_override(HeuristicCombo& combo, const std::string& assignment);

/// Parses "0.2", "1/5" or "3" into an exact rational.
Weight parse_fraction(const std::string& text);

std::int64_t loop_call_weight(const Procedure& proc, const LoopInfo& loops, std::int64_t w = kLoopDepthWeight);

/// Self time of each procedure: Σ block weight × block length.
std::map<std::string, Weight> execution_cycles(const Program& program);

std::vector<std::string> order_procedures(const Program& program, FirstOrder policy,
                                          std::int64_t loop_depth_weight = kLoopDepthWeight);

enum class Reason { Ok, ParamMismatch, RecursiveBlocked, GrowthLimit, External, PolicySize, PolicyFrequency, PolicyLoopWeight };

std::string_view reason_name(Reason r);

struct Eligibility {
  bool allowed = true;
  Reason reason = Reason::Ok;
};

struct Callsite {
  std::string caller;
  std::string block;
  std::string callee;
  Weight frequency = 0;
};

struct GrowthState {
  std::size_t original = 0;
  std::size_t current = 0;
};

bool growth_allows(const GrowthState& growth, const Weight& limit);

struct CalleeStats {
  bool internal = true;
  std::size_t params = 0;
  std::size_t size = 0;
  std::int64_t loop_call_weight = 0;
  bool recursive = false;
};

/// Gate check in fixed order: external, arity, recursion, growth, size,
/// frequency, loop weight. `seed_weight` absent means no region is being
/// grown, which passes the frequency gate.
Eligibility should_inline(const Callsite& site, std::size_t arg_count, const CalleeStats& callee,
                          const SecondOrderPolicy& policy, const GrowthState& growth,
                          const std::optional<Weight>& seed_weight);

/// Procedures on a cycle of the static call graph (including self calls).
std::set<std::string> recursive_procedures(const Program& program);

/// Callsite census for the gates, computed once on the original program.
struct CallGraphFacts {
  std::set<std::string> recursive;
  std::map<std::string, std::int64_t> loop_call_weights;
  std::map<std::string, std::size_t> sizes;
};

CallGraphFacts call_graph_facts(const Program& program, std::int64_t loop_depth_weight = kLoopDepthWeight);

CalleeStats callee_stats(const Program& program, const CallGraphFacts& facts, const std::string& callee);

Eligibility inline_eligibility(const Program& program, const Callsite& site, const SecondOrderPolicy& policy,
                               const GrowthState& growth, const CallGraphFacts& facts,
                               const std::optional<Weight>& seed_weight = std::nullopt);

}  // namespace regionc
