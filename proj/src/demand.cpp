#include "regionc/demand.hpp"

#include <algorithm>
#include <stdexcept>

#include "region_former.hpp"

namespace regionc {

std::string_view trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::EnterProcedure: return "enter_procedure";
    case TraceKind::LeaveProcedure: return "leave_procedure";
    case TraceKind::RegionCompleted: return "region_completed";
    case TraceKind::InlinePerformed: return "inline_performed";
    case TraceKind::InlineRefused: return "inline_refused";
  }
  return "?";
}

std::size_t peak_live_size(const FormationTrace& trace) {
  std::vector<std::string> open;
  long live = 0, peak = 0;
  for (const auto& e : trace.events) {
    switch (e.kind) {
      case TraceKind::EnterProcedure:
        open.push_back(e.procedure);
        live += static_cast<long>(e.size);
        break;
      case TraceKind::LeaveProcedure:
        if (open.empty() || open.back() != e.procedure)
          throw std::invalid_argument("unbalanced trace: leave of " + e.procedure);
        open.pop_back();
        live += static_cast<long>(e.returned_size) - static_cast<long>(e.size) - static_cast<long>(e.absorbed);
        break;
      case TraceKind::RegionCompleted:
        live -= static_cast<long>(e.released);
        break;
      default:
        break;
    }
    if (live < 0) throw std::invalid_argument("unbalanced trace: negative live size");
    peak = std::max(peak, live);
  }
  if (!open.empty()) throw std::invalid_argument("unbalanced trace: " + open.back() + " never left");
  return static_cast<std::size_t>(peak);
}

RegionClassification classify_regions(const BlockRef& entry, const BlockRef& exit, const std::set<BlockRef>& members,
                                      const RegionSet& regions) {
  RegionClassification c;
  for (const auto& r : regions.regions) {
    bool has_entry = false, has_exit = false, touches = false;
    for (const auto& b : r.blocks) {
      has_entry |= b == entry;
      has_exit |= b == exit;
      touches |= members.count(b) > 0;
    }
    if (has_entry) c.entry_region = r.id;
    if (has_exit) c.exit_region = r.id;
    if (touches && !has_entry && !has_exit) c.locals.push_back(r.id);
  }
  if (c.entry_region < 0 || c.exit_region < 0) throw std::invalid_argument("regions do not cover the procedure");
  c.pass_through = c.entry_region == c.exit_region;
  return c;
}

RegionClassification classify_regions(const Procedure& proc, const RegionSet& regions) {
  std::set<BlockRef> members;
  for (const auto& b : proc.blocks) members.insert(BlockRef{proc.name, b.id});
  return classify_regions(BlockRef{proc.name, proc.entry_block}, BlockRef{proc.name, proc.exit_block}, members,
                          regions);
}

namespace {

class Driver;

class DemandFormer : public detail::RegionFormer {
 public:
  DemandFormer(Driver& driver, Procedure& proc, const RegionParams& params)
      : RegionFormer(proc, params), driver_(driver) {}

 protected:
  std::optional<detail::CallExpansion> expand(const std::string& block, const std::optional<Weight>& seed_weight) override;
  bool expands_calls() const override { return true; }
  void on_clones(const std::map<std::string, std::string>& clone_of) override;
  bool admit_clones(std::size_t n) override;

 private:
  Driver& driver_;
};

class Driver {
 public:
  Driver(const Program& original, const HeuristicCombo& combo, const RegionParams& params, bool optimize)
      : original_(original), combo_(combo), params_(params), optimize_(optimize) {
    res_.program = original;
    facts_ = call_graph_facts(original, combo.loop_depth_weight);
    growth_.original = growth_.current = code_size(original);
  }

  DemandResult run() {
    std::vector<std::string> order = order_procedures(original_, combo_.first, combo_.loop_depth_weight);
    std::set<std::string> reach = reachable_procedures(original_);
    roots_ = {original_.entry};
    for (const auto& n : order)
      if (!reach.count(n)) roots_.push_back(n);

    std::set<std::string> processed;

    process_isolated(original_.entry);
    processed.insert(original_.entry);
    while (true) {
      std::set<std::string> live = needed();
      auto next = std::find_if(order.begin(), order.end(),
                               [&](const std::string& n) { return live.count(n) && !processed.count(n); });
      if (next == order.end()) break;
      process_isolated(*next);
      processed.insert(*next);
    }
    std::set<std::string> live = needed();
    auto& procs = res_.program.procedures;
    for (const auto& p : procs)
      if (!live.count(p.name)) res_.removed.push_back(p.name);
    procs.erase(std::remove_if(procs.begin(), procs.end(), [&](const Procedure& p) { return !live.count(p.name); }),
                procs.end());
    auto& regs = res_.regions.regions;
    regs.erase(std::remove_if(regs.begin(), regs.end(),
                              [&](const Region& r) { return !live.count(r.entry.procedure); }),
               regs.end());
    res_.inlined_size = growth_.current;
    return std::move(res_);
  }

  std::optional<detail::CallExpansion> expand(Procedure& w, const std::string& block,
                                              const std::optional<Weight>& seed_weight) {
    const Block& b = w.at(block);
    const Instruction* call = call_of(b);
    Callsite site{w.name, block, call->callee, b.weight};
    CalleeStats stats = callee_stats(original_, facts_, call->callee);
    Eligibility e = should_inline(site, call->operands.size(), stats, combo_.second, growth_, seed_weight);
    if (e.allowed && std::find(stack_.begin(), stack_.end(), call->callee) != stack_.end())
      e = Eligibility{false, Reason::RecursiveBlocked};
    if (!e.allowed) {
      // A block reached again by another growth path repeats the same decision.
      std::string key = e.reason == Reason::PolicyFrequency && seed_weight ? seed_weight->str() : "*";
      if (!refused_[{w.name, block}].insert(key).second) return std::nullopt;
      TraceEvent ev{};
      ev.kind = TraceKind::InlineRefused;
      ev.caller = w.name;
      ev.block = block;
      ev.callee = site.callee;
      ev.reason = e.reason;
      emit(ev);
      return std::nullopt;
    }

    const Procedure& body = original_.at(site.callee);
    InlineRecord rec = inline_body(res_.program, w.name, block, body);
    growth_.current = static_cast<std::size_t>(static_cast<long>(growth_.current) + rec.growth);
    source_size_.erase(block);
    for (const auto& [from, to] : rec.block_map) source_size_[to] = code_size(body.at(from));
    if (rec.first_block != rec.entry_copy) source_size_[rec.first_block] = 0;
    TraceEvent ev{};
    ev.kind = TraceKind::InlinePerformed;
    ev.caller = w.name;
    ev.block = block;
    ev.callee = site.callee;
    emit(ev);

    std::set<std::string> pool;
    for (const auto& [from, to] : rec.block_map) pool.insert(to);
    pool.insert(rec.first_block);
    res_.inlines.push_back(rec);
    return run_frame(site.callee, w, pool, false, rec.first_block, rec.exit_copy);
  }

  void note_clones(const std::map<std::string, std::string>& clone_of) {
    for (const auto& [clone, orig] : clone_of) source_size_[clone] = 0;
  }

  // Procedures no longer called from the live program do not count.
  bool admit_clones(std::size_t n) {
    std::size_t live = 0;
    for (const auto& name : needed()) live += code_size(res_.program.at(name));
    GrowthBudget budget{growth_.original, live, combo_.second.growth_limit};
    return budget.admit(n);
  }

 private:
  std::set<std::string> needed() const {
    std::set<std::string> seen;
    std::vector<std::string> work = roots_;
    while (!work.empty()) {
      std::string n = work.back();
      work.pop_back();
      const Procedure* p = res_.program.find(n);
      if (!p || !seen.insert(n).second) continue;
      for (const auto& b : p->blocks)
        if (const Instruction* c = call_of(b)) work.push_back(c->callee);
    }
    return seen;
  }

  void emit(TraceEvent ev) {
    ev.seq = res_.trace.events.size();
    switch (ev.kind) {
      case TraceKind::EnterProcedure: live_ += static_cast<long>(ev.size); break;
      case TraceKind::LeaveProcedure:
        live_ += static_cast<long>(ev.returned_size) - static_cast<long>(ev.size) - static_cast<long>(ev.absorbed);
        break;
      case TraceKind::RegionCompleted: live_ -= static_cast<long>(ev.released); break;
      default: break;
    }
    res_.trace.events.push_back(std::move(ev));
    res_.trace.live_size_samples.push_back(static_cast<std::size_t>(std::max(0L, live_)));
  }

  void process_isolated(const std::string& name) {
    Procedure& w = res_.program.at(name);
    source_size_.clear();
    std::set<std::string> pool;
    for (const auto& b : w.blocks) {
      pool.insert(b.id);
      source_size_[b.id] = code_size(b);
    }
    run_frame(name, w, pool, true, w.entry_block, w.exit_block);
  }

  std::size_t source_size(const detail::FormedRegion& r) const {
    std::size_t n = 0;
    for (const auto& b : r.blocks)
      if (auto it = source_size_.find(b); it != source_size_.end()) n += it->second;
    return n;
  }

  void complete(Procedure& w, const detail::FormedRegion& r, RegionKind kind) {
    Region region;
    region.id = static_cast<int>(res_.regions.regions.size());
    for (const auto& b : r.blocks) region.blocks.push_back(BlockRef{w.name, b});
    region.seed = BlockRef{w.name, r.seed};
    region.entry = BlockRef{w.name, r.entry};
    region.kind = kind;
    if (optimize_) {
      std::set<std::string> members(r.blocks.begin(), r.blocks.end());
      w = reintegrate(optimize_region(encapsulate(w, members, r.entry)), w);
    }
    TraceEvent ev{};
    ev.kind = TraceKind::RegionCompleted;
    ev.procedure = w.name;
    ev.region = region.id;
    ev.region_kind = kind;
    ev.size = code_size(res_.program, region);
    ev.released = r.pending;
    res_.regions.regions.push_back(std::move(region));
    emit(ev);
  }

  std::optional<detail::CallExpansion> run_frame(const std::string& name, Procedure& w, std::set<std::string> pool,
                                                 bool isolated, const std::string& entry, const std::string& exit) {
    const std::size_t size = code_size(original_.at(name));
    TraceEvent enter{};
    enter.kind = TraceKind::EnterProcedure;
    enter.procedure = name;
    enter.size = size;
    emit(enter);
    stack_.push_back(name);

    DemandFormer former(*this, w, params_);
    std::vector<detail::FormedRegion> regions = former.run(std::move(pool));
    auto holding = [&](const std::string& id) {
      for (std::size_t i = 0; i < regions.size(); ++i)
        if (std::find(regions[i].blocks.begin(), regions[i].blocks.end(), id) != regions[i].blocks.end()) return i;
      throw std::logic_error("block " + id + " of " + name + " left without a region");
    };
    std::size_t ei = holding(entry), xi = holding(exit);

    stack_.pop_back();
    TraceEvent leave{};
    leave.kind = TraceKind::LeaveProcedure;
    leave.procedure = name;
    leave.size = size;
    leave.pass_through = ei == xi;

    if (isolated) {
      for (std::size_t i = 0; i < regions.size(); ++i) {
        RegionKind kind = RegionKind::Local;
        if (i == ei && i == xi) kind = RegionKind::PassThrough;
        else if (i == ei) kind = RegionKind::Entry;
        else if (i == xi) kind = RegionKind::Exit;
        complete(w, regions[i], kind);
      }
      emit(leave);
      return std::nullopt;
    }

    for (std::size_t i = 0; i < regions.size(); ++i)
      if (i != ei && i != xi) complete(w, regions[i], RegionKind::Local);
    detail::CallExpansion exp;
    exp.pass_through = ei == xi;
    exp.entry_region = regions[ei];
    exp.exit_region = regions[xi];
    exp.copy_entry = entry;
    exp.copy_exit = exit;
    leave.absorbed = regions[ei].pending + (exp.pass_through ? 0 : regions[xi].pending);
    exp.entry_region.pending = source_size(regions[ei]);
    exp.exit_region.pending = source_size(regions[xi]);
    leave.returned_size = exp.entry_region.pending + (exp.pass_through ? 0 : exp.exit_region.pending);
    emit(leave);
    return exp;
  }

  const Program& original_;
  const HeuristicCombo& combo_;
  const RegionParams& params_;
  bool optimize_;
  DemandResult res_;
  CallGraphFacts facts_;
  GrowthState growth_;
  std::vector<std::string> stack_;
  std::vector<std::string> roots_;
  std::map<std::string, std::size_t> source_size_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> refused_;
  long live_ = 0;
};

std::optional<detail::CallExpansion> DemandFormer::expand(const std::string& block,
                                                          const std::optional<Weight>& seed_weight) {
  return driver_.expand(proc_, block, seed_weight);
}

void DemandFormer::on_clones(const std::map<std::string, std::string>& clone_of) { driver_.note_clones(clone_of); }

bool DemandFormer::admit_clones(std::size_t n) { return driver_.admit_clones(n); }

}  // namespace

DemandResult form_regions_demand(const Program& program, const HeuristicCombo& combo, const RegionParams& params,
                                 bool optimize) {
  Driver d(program, combo, params, optimize);
  return d.run();
}

}  // namespace regionc
