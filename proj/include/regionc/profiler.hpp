#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "regionc/ir.hpp"

namespace regionc {

inline constexpr std::uint64_t kDefaultFuel = 10'000'000;
inline constexpr std::uint64_t kDefaultCallOverhead = 5;

struct ExecutionProfile {
  std::map<BlockRef, std::uint64_t> block_counts;
  std::uint64_t dynamic_instructions = 0;
  std::uint64_t dynamic_calls = 0;
  std::vector<std::int64_t> outputs;

  std::uint64_t count(const std::string& proc, const std::string& block) const;
  bool operator==(const ExecutionProfile&) const = default;
};

class RuntimeError : public std::runtime_error {
 public:
  enum class Kind { FuelExhausted, DivisionByZero, ArityMismatch, UndefinedRegister, StackOverflow };
  RuntimeError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct InterpretOptions {
  std::uint64_t fuel = kDefaultFuel;
  std::size_t max_call_depth = 4096;
};

/// Runs the entry procedure with `input` bound to its parameters (missing
/// values are 0, extras ignored). External callees return 0.
ExecutionProfile interpret(const Program& program, const std::vector<std::int64_t>& input,
                           const InterpretOptions& options = {});

/// Executed instructions plus `call_overhead` per dynamic call.
std::uint64_t dynamic_cost(const ExecutionProfile& profile, std::uint64_t call_overhead = kDefaultCallOverhead);

Program annotate_profile(const Program& program, const ExecutionProfile& profile);

struct LoopInfo {
  std::map<std::string, int> depth;

  int at(const std::string& block) const;
};

LoopInfo loop_depths(const Procedure& proc);

/// Immediate dominator of each block by CfgIndex position; the entry maps to
/// itself and unreachable blocks to SIZE_MAX.
std::vector<std::size_t> immediate_dominators(const CfgIndex& cfg);

}  // namespace regionc
