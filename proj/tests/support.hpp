#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "regionc/pipeline.hpp"

namespace regionc::testing {

inline std::string fixture_path(const std::string& name) { return std::string(REGIONC_FIXTURE_DIR) + "/" + name; }

inline Program load_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

inline CompilationResult compile_with(const Program& p, const std::string& combo,
                                      const std::vector<std::string>& overrides = {},
                                      const std::vector<std::int64_t>& input = {}) {
  CompileOptions o;
  o.combo = combo_config(combo);
  for (const auto& s : overrides) apply_override(o.combo, s);
  o.input = input;
  return compile(p, o);
}

using Partition = std::set<std::set<std::string>>;

/// Region contents restricted to blocks that exist under the same id in
/// their origin procedure of `source`; clones drop out and empty sets vanish.
inline Partition original_partition(const CompilationResult& r, const Program& source) {
  Partition out;
  for (const auto& reg : r.regions.regions) {
    std::set<std::string> ids;
    for (const auto& ref : reg.blocks) {
      const Block& b = r.program_out.at(ref.procedure).at(ref.block);
      const Procedure* origin = source.find(b.origin);
      if (origin && origin->find(ref.block)) ids.insert(ref.block);
    }
    if (!ids.empty()) out.insert(ids);
  }
  return out;
}

/// Exact region contents with procedure-qualified block names.
inline Partition full_partition(const RegionSet& regions) {
  Partition out;
  for (const auto& reg : regions.regions) {
    std::set<std::string> ids;
    for (const auto& ref : reg.blocks) ids.insert(ref.str());
    out.insert(ids);
  }
  return out;
}

struct CorpusEntry {
  std::uint64_t seed;
  GenShape shape;
};

/// Mixed shapes: 2 to 8 procedures, a fifth of them cyclically recursive.
inline std::vector<CorpusEntry> corpus(std::size_t count, std::uint64_t base = 1000) {
  std::vector<CorpusEntry> out;
  for (std::size_t i = 0; i < count; ++i) {
    GenShape s;
    s.procs = 2 + i % 7;
    s.max_blocks = 6 + i % 15;
    s.call_density = 0.2 + 0.1 * static_cast<double>(i % 4);
    s.loop_prob = 0.3;
    s.recursive = i % 5 == 0;
    out.push_back({base + i, s});
  }
  return out;
}

inline Program scale_weights(Program p, const Weight& factor) {
  for (auto& proc : p.procedures)
    for (auto& b : proc.blocks) b.weight *= factor;
  return p;
}

}  // namespace regionc::testing
