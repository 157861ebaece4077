#include "regionc/metrics.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace regionc {

std::size_t memory_requirement_phased(const Program& program_after_aggressive_inline) {
  return code_size(program_after_aggressive_inline);
}

ChainMemory memory_requirement_demand(const Program& program) {
  std::map<std::string, std::vector<std::string>> callees;
  for (const auto& p : program.procedures) {
    std::set<std::string> seen;
    for (const auto& b : p.blocks)
      if (const Instruction* c = call_of(b); c && program.find(c->callee) && seen.insert(c->callee).second)
        callees[p.name].push_back(c->callee);
  }
  ChainMemory out;
  if (!program.find(program.entry)) return out;
  double total = 0;
  std::vector<std::string> path;
  std::set<std::string> on_path;
  std::function<void(const std::string&, std::size_t)> walk = [&](const std::string& n, std::size_t cost) {
    path.push_back(n);
    on_path.insert(n);
    cost += code_size(program.at(n));
    bool extended = false;
    for (const auto& c : callees[n]) {
      if (on_path.count(c)) continue;
      extended = true;
      walk(c, cost);
    }
    if (!extended) {
      ++out.chains;
      total += static_cast<double>(cost);
      out.worst = std::max(out.worst, cost);
    }
    on_path.erase(n);
    path.pop_back();
  };
  walk(program.entry, 0);
  out.avg = total / static_cast<double>(out.chains);
  return out;
}

double code_growth_pct(std::size_t original, std::size_t compiled) {
  if (original == 0) throw std::invalid_argument("code growth of an empty program");
  return 100.0 * (static_cast<double>(compiled) - static_cast<double>(original)) / static_cast<double>(original);
}

double code_growth_pct(const Program& original, const Program& compiled) {
  return code_growth_pct(code_size(original), code_size(compiled));
}

UnitStats unit_stats(const Program& program, const RegionSet& regions) {
  if (regions.regions.empty()) throw std::invalid_argument("unit statistics of an empty region set");
  std::size_t total = 0;
  for (const auto& r : regions.regions) total += code_size(program, r);
  return {regions.regions.size(), static_cast<double>(total) / static_cast<double>(regions.regions.size())};
}

Variance profile_variance(const std::vector<Weight>& weights, double threshold) {
  if (weights.empty()) return {};
  Weight max = 0;
  for (const auto& w : weights) max = std::max(max, w);
  if (max == 0) return {0, 0 <= threshold};
  Weight mean = 0;
  std::vector<Weight> norm;
  norm.reserve(weights.size());
  for (const auto& w : weights) {
    norm.push_back(w / max);
    mean += norm.back();
  }
  mean /= Weight(weights.size());
  Weight var = 0;
  for (const auto& n : norm) var += (n - mean) * (n - mean);
  var /= Weight(weights.size());
  double sd = std::sqrt(var.convert_to<double>());
  return {sd, sd <= threshold};
}

Variance profile_variance(const Program& program, const Region& unit, double threshold) {
  std::vector<Weight> w;
  for (const auto& ref : unit.blocks) w.push_back(program.at(ref.procedure).at(ref.block).weight);
  return profile_variance(w, threshold);
}

Scope interprocedural_scope(const Program& program, const RegionSet& regions) {
  std::size_t total = 0, inter = 0;
  Scope s;
  for (const auto& r : regions.regions) {
    const std::string& home = program.at(r.seed.procedure).at(r.seed.block).origin;
    std::set<std::string> origins;
    for (const auto& ref : r.blocks) {
      const Block& b = program.at(ref.procedure).at(ref.block);
      if (b.origin.empty()) throw std::invalid_argument("block " + ref.str() + " has no origin");
      total += b.instructions.size();
      if (b.origin != home) inter += b.instructions.size();
      if (!b.instructions.empty()) origins.insert(b.origin);
    }
    if (origins.size() > 1) ++s.interprocedural_regions;
  }
  s.pct_interprocedural_ops = total == 0 ? 0 : 100.0 * static_cast<double>(inter) / static_cast<double>(total);
  return s;
}

}  // namespace regionc
