#include "regionc/heuristics.hpp"

#include <algorithm>
#include <stdexcept>

namespace regionc {

std::string_view first_order_name(FirstOrder f) {
  switch (f) {
    case FirstOrder::None: return "none";
    case FirstOrder::ProfileTimeDesc: return "profile_time_desc";
    case FirstOrder::CallsitesDescSizeAsc: return "callsites_desc_then_size_asc";
    case FirstOrder::LoopCallWeightDescSizeAsc: return "loop_call_weight_desc_then_size_asc";
  }
  return "?";
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::ProcedureBased: return "procedure_based";
    case Strategy::Phased: return "phased";
    case Strategy::Demand: return "demand";
  }
  return "?";
}

std::string_view reason_name(Reason r) {
  switch (r) {
    case Reason::Ok: return "ok";
    case Reason::ParamMismatch: return "param_mismatch";
    case Reason::RecursiveBlocked: return "recursive_blocked";
    case Reason::GrowthLimit: return "growth_limit";
    case Reason::External: return "external";
    case Reason::PolicySize: return "policy_rejected(size)";
    case Reason::PolicyFrequency: return "policy_rejected(frequency)";
    case Reason::PolicyLoopWeight: return "policy_rejected(loopweight)";
  }
  return "?";
}

HeuristicCombo combo_config(const std::string& name) {
  HeuristicCombo c;
  c.name = name;
  const Weight half(1, 2);
  if (name == "H0") {
    c.strategy = Strategy::ProcedureBased;
    c.first = FirstOrder::None;
  } else if (name == "H1") {
    c.strategy = Strategy::Phased;
    c.first = FirstOrder::ProfileTimeDesc;
    c.second.frequency_ratio = half;
  } else if (name == "H2") {
    c.strategy = Strategy::Demand;
    c.first = FirstOrder::CallsitesDescSizeAsc;
    c.second.frequency_ratio = half;
    c.second.max_callee_size = 25;
  } else if (name == "H3") {
    c.strategy = Strategy::Demand;
    c.first = FirstOrder::CallsitesDescSizeAsc;
    c.second.frequency_ratio = half;
    c.second.block_recursion = true;
  } else if (name == "H4") {
    c.strategy = Strategy::Demand;
    c.first = FirstOrder::LoopCallWeightDescSizeAsc;
    c.second.frequency_ratio = half;
    c.second.block_recursion = true;
  } else if (name == "H5" || name == "H6") {
    c.strategy = Strategy::Demand;
    c.first = FirstOrder::ProfileTimeDesc;
    c.second.frequency_ratio = half;
    c.second.block_recursion = true;
    if (name == "H6") c.second.min_loop_call_weight = 10;
  } else {
    throw std::invalid_argument("unknown heuristic combination '" + name + "'");
  }
  return c;
}

Weight parse_fraction(const std::string& text) {
  using boost::multiprecision::cpp_int;
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string t = text;
  bool neg = !t.empty() && t[0] == '-';
  if (neg) t.erase(0, 1);
  Weight out;
  if (auto slash = t.find('/'); slash != std::string::npos) {
    std::string n = t.substr(0, slash), d = t.substr(slash + 1);
    if (!digits(n) || !digits(d) || cpp_int(d) == 0) throw std::invalid_argument("bad fraction '" + text + "'");
    out = Weight(cpp_int(n), cpp_int(d));
  } else {
    auto dot = t.find('.');
    std::string ip = dot == std::string::npos ? t : t.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : t.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!digits(ip) || (!fp.empty() && !digits(fp)) || (dot != std::string::npos && fp.empty() && ip == "0" && t == "."))
      throw std::invalid_argument("bad number '" + text + "'");
    cpp_int scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    out = Weight(cpp_int(ip) * scale + (fp.empty() ? cpp_int(0) : cpp_int(fp)), scale);
  }
  return neg ? Weight(-out) : out;
}

void apply_override(HeuristicCombo& combo, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq), value = assignment.substr(eq + 1);
  auto positive = [&](const Weight& w) {
    if (w <= 0) throw std::invalid_argument(key + " must be positive");
    return w;
  };
  auto integer = [&]() {
    Weight w = parse_fraction(value);
    if (boost::multiprecision::denominator(w) != 1) throw std::invalid_argument(key + " must be an integer");
    return static_cast<std::int64_t>(boost::multiprecision::numerator(w));
  };
  bool off = value == "none" || value == "off";
  if (key == "frequency_ratio") {
    combo.second.frequency_ratio = off ? std::nullopt : std::optional<Weight>(positive(parse_fraction(value)));
  } else if (key == "max_callee_size") {
    if (off) combo.second.max_callee_size.reset();
    else combo.second.max_callee_size = static_cast<std::size_t>(std::max<std::int64_t>(1, integer()));
  } else if (key == "block_recursion") {
    combo.second.block_recursion = value == "1" || value == "true" || value == "on";
  } else if (key == "growth_limit") {
    Weight w = parse_fraction(value);
    if (w < 0) throw std::invalid_argument("growth_limit must be nonnegative");
    combo.second.growth_limit = w;
  } else if (key == "min_loop_call_weight") {
    if (off) combo.second.min_loop_call_weight.reset();
    else combo.second.min_loop_call_weight = integer();
  } else if (key == "strategy") {
    if (value == "procedure_based") combo.strategy = Strategy::ProcedureBased;
    else if (value == "phased") combo.strategy = Strategy::Phased;
    else if (value == "demand") combo.strategy = Strategy::Demand;
    else throw std::invalid_argument("unknown strategy '" + value + "'");
  } else if (key == "loop_depth_weight") {
    combo.loop_depth_weight = integer();
  } else {
    throw std::invalid_argument("unknown setting '" + key + "'");
  }
}

std::int64_t loop_call_weight(const Procedure& proc, const LoopInfo& loops, std::int64_t w) {
  std::int64_t total = 0;
  for (const auto& b : proc.blocks)
    if (is_call_block(b)) total += loops.at(b.id) * w;
  return total;
}

std::map<std::string, Weight> execution_cycles(const Program& program) {
  std::map<std::string, Weight> out;
  for (const auto& p : program.procedures) {
    Weight t = 0;
    for (const auto& b : p.blocks) t += b.weight * Weight(b.instructions.size());
    out[p.name] = t;
  }
  return out;
}

std::vector<std::string> order_procedures(const Program& program, FirstOrder policy,
                                          std::int64_t loop_depth_weight) {
  std::vector<std::string> names;
  for (const auto& p : program.procedures) names.push_back(p.name);
  if (policy == FirstOrder::None) return names;

  std::map<std::string, std::size_t> size;
  for (const auto& p : program.procedures) size[p.name] = code_size(p);
  std::map<std::string, Weight> key;  // larger first
  switch (policy) {
    case FirstOrder::ProfileTimeDesc:
      key = execution_cycles(program);
      break;
    case FirstOrder::CallsitesDescSizeAsc:
      for (const auto& p : program.procedures) {
        std::int64_t k = 0;
        for (const auto& b : p.blocks) k += is_call_block(b) ? 1 : 0;
        key[p.name] = k;
      }
      break;
    case FirstOrder::LoopCallWeightDescSizeAsc:
      for (const auto& p : program.procedures) key[p.name] = loop_call_weight(p, loop_depths(p), loop_depth_weight);
      break;
    case FirstOrder::None: break;
  }
  std::stable_sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
    if (key[a] != key[b]) return key[a] > key[b];
    if (size[a] != size[b]) return size[a] < size[b];
    return a < b;
  });
  return names;
}

bool growth_allows(const GrowthState& growth, const Weight& limit) {
  return Weight(growth.current) < Weight(growth.original) * (1 + limit);
}

Eligibility should_inline(const Callsite& site, std::size_t arg_count, const CalleeStats& callee,
                          const SecondOrderPolicy& policy, const GrowthState& growth,
                          const std::optional<Weight>& seed_weight) {
  auto refuse = [](Reason r) { return Eligibility{false, r}; };
  if (!callee.internal) return refuse(Reason::External);
  if (arg_count != callee.params) return refuse(Reason::ParamMismatch);
  if (policy.block_recursion && callee.recursive) return refuse(Reason::RecursiveBlocked);
  if (!growth_allows(growth, policy.growth_limit)) return refuse(Reason::GrowthLimit);
  if (policy.max_callee_size && callee.size > *policy.max_callee_size) return refuse(Reason::PolicySize);
  if (policy.frequency_ratio && seed_weight && site.frequency < *policy.frequency_ratio * *seed_weight)
    return refuse(Reason::PolicyFrequency);
  if (policy.min_loop_call_weight && callee.loop_call_weight < *policy.min_loop_call_weight)
    return refuse(Reason::PolicyLoopWeight);
  return {};
}

std::set<std::string> recursive_procedures(const Program& program) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& p : program.procedures)
    for (const auto& b : p.blocks)
      if (const Instruction* c = call_of(b); c && program.find(c->callee)) edges[p.name].insert(c->callee);
  std::set<std::string> out;
  for (const auto& p : program.procedures) {
    std::set<std::string> seen;
    std::vector<std::string> work(edges[p.name].begin(), edges[p.name].end());
    while (!work.empty()) {
      std::string n = work.back();
      work.pop_back();
      if (n == p.name) {
        out.insert(p.name);
        break;
      }
      if (!seen.insert(n).second) continue;
      for (const auto& m : edges[n]) work.push_back(m);
    }
  }
  return out;
}

CallGraphFacts call_graph_facts(const Program& program, std::int64_t loop_depth_weight) {
  CallGraphFacts f;
  f.recursive = recursive_procedures(program);
  for (const auto& p : program.procedures) {
    f.loop_call_weights[p.name] = loop_call_weight(p, loop_depths(p), loop_depth_weight);
    f.sizes[p.name] = code_size(p);
  }
  return f;
}

CalleeStats callee_stats(const Program& program, const CallGraphFacts& facts, const std::string& callee) {
  CalleeStats s;
  const Procedure* p = program.find(callee);
  if (!p) {
    s.internal = false;
    return s;
  }
  s.params = p->params.size();
  auto size_it = facts.sizes.find(callee);
  s.size = size_it == facts.sizes.end() ? code_size(*p) : size_it->second;
  auto lw = facts.loop_call_weights.find(callee);
  s.loop_call_weight = lw == facts.loop_call_weights.end() ? 0 : lw->second;
  s.recursive = facts.recursive.count(callee) > 0;
  return s;
}

Eligibility inline_eligibility(const Program& program, const Callsite& site, const SecondOrderPolicy& policy,
                               const GrowthState& growth, const CallGraphFacts& facts,
                               const std::optional<Weight>& seed_weight) {
  const Procedure* caller = program.find(site.caller);
  const Block* block = caller ? caller->find(site.block) : nullptr;
  const Instruction* call = block ? call_of(*block) : nullptr;
  if (!call) throw std::invalid_argument("no callsite at " + site.caller + "." + site.block);
  return should_inline(site, call->operands.size(), callee_stats(program, facts, call->callee), policy, growth,
                       seed_weight);
}

}  // namespace regionc
