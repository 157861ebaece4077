#pragma once

#include <map>
#include <string>
#include <vector>

#include "regionc/heuristics.hpp"
#include "regionc/ir.hpp"

namespace regionc {

struct InlineRecord {
  std::string caller;
  std::string call_block;
  std::string callee;
  Weight frequency = 0;
  std::map<std::string, std::string> block_map;  // callee block id -> id in caller
  std::string entry_copy;
  std::string first_block;  // entry copy, or the parameter-binding block in front of it
  std::string exit_copy;
  std::size_t callee_size = 0;
  long growth = 0;
};

/// Replaces `call_block` of `caller` with a renamed copy of `body`. The copy
/// takes the call block's place in block order; weights are scaled by the
/// call block's weight over the body's entry weight.
InlineRecord inline_body(Program& program, const std::string& caller, const std::string& call_block,
                         const Procedure& body);

/// Inlines the site using the callee's current body. Throws
/// std::invalid_argument for external or arity-mismatched callees.
Program inline_at(const Program& program, const Callsite& site);

struct AggressiveResult {
  Program program;
  std::vector<InlineRecord> inlined;
};

/// Inlines the most frequent eligible site until none remains under the
/// growth limit. Ties: smaller callee, then caller and block name.
AggressiveResult aggressive_inline(const Program& program, const Weight& growth_limit);

std::vector<Callsite> callsites(const Program& program);

/// Procedures reachable from the entry through the static call graph.
std::set<std::string> reachable_procedures(const Program& program);

}  // namespace regionc
