#include "regionc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace regionc {

namespace {

bool has_weights(const Program& p) {
  for (const auto& proc : p.procedures)
    for (const auto& b : proc.blocks)
      if (b.weight != 0) return true;
  return false;
}

Procedure optimize_unit(const Procedure& proc, const Region& r) {
  std::set<std::string> ids;
  for (const auto& ref : r.blocks) ids.insert(ref.block);
  EncapsulatedRegion unit = encapsulate(proc, ids, r.entry.block);
  return reintegrate(optimize_region(unit), proc);
}

void optimize_regions(Program& program, const RegionSet& regions) {
  for (const auto& r : regions.regions) {
    Procedure& proc = *program.find(r.entry.procedure);
    proc = optimize_unit(proc, r);
  }
}

// Procedures reachable from the entry or from anything the source never reached.
std::set<std::string> live_procedures(const Program& source, const Program& compiled) {
  std::set<std::string> reach = reachable_procedures(source);
  std::vector<std::string> work{compiled.entry};
  for (const auto& p : source.procedures)
    if (!reach.count(p.name)) work.push_back(p.name);
  std::set<std::string> seen;
  while (!work.empty()) {
    std::string n = work.back();
    work.pop_back();
    const Procedure* p = compiled.find(n);
    if (!p || !seen.insert(n).second) continue;
    for (const auto& b : p->blocks)
      if (const Instruction* c = call_of(b)) work.push_back(c->callee);
  }
  return seen;
}

void compile_procedure_based(CompilationResult& res, bool optimize) {
  for (const auto& proc : res.program_out.procedures) {
    Region r;
    r.id = static_cast<int>(res.regions.regions.size());
    std::set<std::string> all;
    for (const auto& b : proc.blocks) {
      r.blocks.push_back({proc.name, b.id});
      all.insert(b.id);
    }
    r.seed = {proc.name, select_seed(proc, all)};
    r.entry = {proc.name, proc.entry_block};
    r.kind = RegionKind::PassThrough;
    res.regions.regions.push_back(std::move(r));
  }
  res.inlined_size = code_size(res.program_in);
  if (optimize) optimize_regions(res.program_out, res.regions);
}

void compile_phased(CompilationResult& res, const CompileOptions& o, const AggressiveResult& agg) {
  res.program_out = agg.program;
  res.inlines = agg.inlined;
  res.inlined_size = code_size(agg.program);
  std::set<std::string> live = live_procedures(res.program_in, res.program_out);
  auto& procs = res.program_out.procedures;
  for (const auto& p : procs)
    if (!live.count(p.name)) res.removed_procedures.push_back(p.name);
  procs.erase(std::remove_if(procs.begin(), procs.end(), [&](const Procedure& p) { return !live.count(p.name); }),
              procs.end());

  GrowthBudget budget{code_size(res.program_in), code_size(res.program_out), o.combo.second.growth_limit};
  for (const auto& name : order_procedures(res.program_in, o.combo.first, o.combo.loop_depth_weight)) {
    Procedure* proc = res.program_out.find(name);
    if (!proc) continue;
    PhasedRegions pr = form_regions_phased(*proc, o.params, &budget);
    *proc = std::move(pr.procedure);
    for (auto& r : pr.regions.regions) {
      r.id = static_cast<int>(res.regions.regions.size());
      res.regions.regions.push_back(std::move(r));
    }
  }
  if (o.optimize) optimize_regions(res.program_out, res.regions);
}

}  // namespace

CompilationResult compile(const Program& program, const CompileOptions& o) {
  auto start = std::chrono::steady_clock::now();
  CompilationResult res;
  res.combo = o.combo.name;
  res.strategy = o.combo.strategy;
  res.policy = o.combo.second;
  res.call_overhead = o.call_overhead;
  res.input = o.input;

  InterpretOptions io;
  io.fuel = o.fuel;
  res.profile_in = interpret(program, o.input, io);
  res.program_in = (has_weights(program) && !o.reprofile) ? program : annotate_profile(program, res.profile_in);
  res.program_out = res.program_in;

  AggressiveResult agg = aggressive_inline(res.program_in, o.combo.second.growth_limit);
  res.memory_phased = memory_requirement_phased(agg.program);

  switch (o.combo.strategy) {
    case Strategy::ProcedureBased:
      compile_procedure_based(res, o.optimize);
      break;
    case Strategy::Phased:
      compile_phased(res, o, agg);
      break;
    case Strategy::Demand: {
      DemandResult d = form_regions_demand(res.program_in, o.combo, o.params, o.optimize);
      res.program_out = std::move(d.program);
      res.regions = std::move(d.regions);
      res.trace = std::move(d.trace);
      res.inlines = std::move(d.inlines);
      res.inlined_size = d.inlined_size;
      res.removed_procedures = std::move(d.removed);
      break;
    }
  }

  res.profile_out = interpret(res.program_out, o.input, io);
  res.compile_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  res.report = compute_report(res);
  return res;
}

MetricsReport compute_report(const CompilationResult& res) {
  MetricsReport m;
  m.strategy = res.combo;
  m.original_size = code_size(res.program_in);
  m.final_size = code_size(res.program_out);
  m.inlined_size = res.inlined_size;
  m.code_growth_pct = code_growth_pct(m.original_size, m.final_size);
  m.memory_phased = res.memory_phased;
  switch (res.strategy) {
    case Strategy::ProcedureBased: {
      std::size_t total = 0, worst = 0;
      for (const auto& p : res.program_in.procedures) {
        total += code_size(p);
        worst = std::max(worst, code_size(p));
      }
      m.memory_avg = res.program_in.procedures.empty()
                         ? 0
                         : static_cast<double>(total) / static_cast<double>(res.program_in.procedures.size());
      m.memory_worst = worst;
      break;
    }
    case Strategy::Phased:
      m.memory_avg = static_cast<double>(res.memory_phased);
      m.memory_worst = res.memory_phased;
      break;
    case Strategy::Demand: {
      ChainMemory c = memory_requirement_demand(res.program_in);
      m.memory_avg = c.avg;
      m.memory_worst = c.worst;
      break;
    }
  }
  if (res.trace) m.peak_live_size = peak_live_size(*res.trace);

  if (!res.regions.regions.empty()) {
    UnitStats u = unit_stats(res.program_out, res.regions);
    m.unit_count = u.count;
    m.unit_avg_size = u.avg_size;
    double var = 0;
    std::size_t invariant = 0;
    for (const auto& r : res.regions.regions) {
      Variance v = profile_variance(res.program_out, r);
      var += v.variance;
      invariant += v.invariant ? 1 : 0;
    }
    m.profile_variance = var / static_cast<double>(u.count);
    m.pct_invariant_units = 100.0 * static_cast<double>(invariant) / static_cast<double>(u.count);
    Scope s = interprocedural_scope(res.program_out, res.regions);
    m.pct_interprocedural_ops = s.pct_interprocedural_ops;
    m.interprocedural_regions = s.interprocedural_regions;
  }
  m.inlined_sites = res.inlines.size();
  m.dynamic_cost = dynamic_cost(res.profile_out, res.call_overhead);
  m.original_dynamic_cost = dynamic_cost(res.profile_in, res.call_overhead);
  return m;
}

Comparison compare(const std::vector<CompilationResult>& results) {
  Comparison c;
  if (results.empty()) return c;
  const std::string source = unparse(results.front().program_in);
  for (const auto& r : results) {
    if (unparse(r.program_in) != source || r.input != results.front().input)
      throw std::invalid_argument("results come from different programs or inputs");
    c.combos.push_back(r.combo);
  }
  using Get = double (*)(const MetricsReport&);
  const std::vector<std::pair<std::string, Get>> rows = {
      {"code_growth_pct", [](const MetricsReport& m) { return m.code_growth_pct; }},
      {"unit_count", [](const MetricsReport& m) { return static_cast<double>(m.unit_count); }},
      {"unit_avg_size", [](const MetricsReport& m) { return m.unit_avg_size; }},
      {"profile_variance", [](const MetricsReport& m) { return m.profile_variance; }},
      {"pct_invariant_units", [](const MetricsReport& m) { return m.pct_invariant_units; }},
      {"pct_interprocedural_ops", [](const MetricsReport& m) { return m.pct_interprocedural_ops; }},
      {"memory_avg", [](const MetricsReport& m) { return m.memory_avg; }},
      {"memory_worst", [](const MetricsReport& m) { return static_cast<double>(m.memory_worst); }},
      {"memory_phased", [](const MetricsReport& m) { return static_cast<double>(m.memory_phased); }},
      {"peak_live_size", [](const MetricsReport& m) { return static_cast<double>(m.peak_live_size); }},
      {"inlined_sites", [](const MetricsReport& m) { return static_cast<double>(m.inlined_sites); }},
      {"dynamic_cost", [](const MetricsReport& m) { return static_cast<double>(m.dynamic_cost); }},
  };
  for (std::size_t i = 1; i < results.size(); ++i) c.delta_labels.push_back(c.combos[i] + "-" + c.combos[0]);
  for (const auto& [name, get] : rows) {
    c.metrics.push_back(name);
    std::vector<double> vals;
    for (const auto& r : results) vals.push_back(get(r.report));
    std::vector<double> d;
    for (std::size_t i = 1; i < vals.size(); ++i) d.push_back(vals[i] - vals[0]);
    c.values.push_back(std::move(vals));
    c.deltas.push_back(std::move(d));
  }
  return c;
}

namespace {

std::string num(double v) {
  char buf[64];
  if (v == static_cast<double>(static_cast<long long>(v))) std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  else std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<std::vector<std::string>> cells(const Comparison& c) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> head{"metric"};
  head.insert(head.end(), c.combos.begin(), c.combos.end());
  head.insert(head.end(), c.delta_labels.begin(), c.delta_labels.end());
  out.push_back(head);
  for (std::size_t i = 0; i < c.metrics.size(); ++i) {
    std::vector<std::string> row{c.metrics[i]};
    for (double v : c.values[i]) row.push_back(num(v));
    for (double v : c.deltas[i]) row.push_back(num(v));
    out.push_back(row);
  }
  return out;
}

}  // namespace

std::string format_table(const Comparison& c) {
  auto rows = cells(c);
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], row[i].size());
    }
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << "  ";
      if (i == 0) os << row[i] << std::string(width[i] - row[i].size(), ' ');
      else os << std::string(width[i] - row[i].size(), ' ') << row[i];
    }
    os << '\n';
  }
  return os.str();
}

std::string format_csv(const Comparison& c) {
  std::ostringstream os;
  for (const auto& row : cells(c)) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> partition_violations(const Program& program, const RegionSet& regions) {
  std::map<BlockRef, int> seen;
  std::vector<std::string> out;
  for (const auto& r : regions.regions)
    for (const auto& ref : r.blocks) {
      const Procedure* p = program.find(ref.procedure);
      if (!p || !p->find(ref.block)) out.push_back("region " + std::to_string(r.id) + " names missing block " + ref.str());
      ++seen[ref];
    }
  for (const auto& p : program.procedures)
    for (const auto& b : p.blocks) {
      int n = seen[BlockRef{p.name, b.id}];
      if (n != 1) out.push_back("block " + p.name + "." + b.id + " is in " + std::to_string(n) + " regions");
    }
  return out;
}

std::vector<std::string> side_entry_violations(const Program& program, const RegionSet& regions) {
  std::vector<std::string> out;
  for (const auto& r : regions.regions) {
    const Procedure* p = program.find(r.entry.procedure);
    if (!p) continue;
    std::set<std::string> ids;
    bool mixed = false;
    for (const auto& ref : r.blocks) {
      ids.insert(ref.block);
      mixed |= ref.procedure != r.entry.procedure;
    }
    if (mixed) out.push_back("region " + std::to_string(r.id) + " spans procedures");
    if (!ids.count(r.entry.block)) out.push_back("region " + std::to_string(r.id) + " does not hold its entry");
    if (!ids.count(r.seed.block)) out.push_back("region " + std::to_string(r.id) + " does not hold its seed");
    for (const auto& s : side_entries(*p, ids, r.entry.block))
      out.push_back("region " + std::to_string(r.id) + " has side entry " + r.entry.procedure + "." + s);
  }
  return out;
}

std::vector<std::string> check_result(const CompilationResult& res) {
  std::vector<std::string> out;
  for (const auto& d : validate(res.program_out)) out.push_back("invalid output: " + d.invariant + ": " + d.message);
  for (auto& v : partition_violations(res.program_out, res.regions)) out.push_back(std::move(v));
  for (auto& v : side_entry_violations(res.program_out, res.regions)) out.push_back(std::move(v));
  if (res.profile_out.outputs != res.profile_in.outputs) out.push_back("printed outputs differ");

  std::size_t original = code_size(res.program_in);
  std::size_t largest = 0;
  for (const auto& rec : res.inlines) largest = std::max(largest, rec.callee_size);
  Weight cap = Weight(original) * (1 + res.policy.growth_limit) + Weight(largest);
  if (Weight(res.inlined_size) > cap) out.push_back("inlining growth exceeds the limit");
  if (res.inlines.empty() && res.inlined_size != original) out.push_back("inlined size changed without inlining");

  if (res.strategy == Strategy::Demand) {
    std::set<std::string> recursive = recursive_procedures(res.program_in);
    for (const auto& rec : res.inlines) {
      if (res.policy.block_recursion && recursive.count(rec.callee))
        out.push_back("recursive procedure " + rec.callee + " was inlined");
      if (res.policy.max_callee_size && rec.callee_size > *res.policy.max_callee_size)
        out.push_back("callee " + rec.callee + " exceeds the size cap");
    }
  }
  return out;
}

}  // namespace regionc
