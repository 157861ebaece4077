#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

#include <boost/dynamic_bitset.hpp>

#include "regionc/regions.hpp"

namespace regionc {

namespace {

using RegSet = std::set<std::string>;

void block_use_def(const Block& b, RegSet& use, RegSet& def) {
  for (const auto& inst : b.instructions) {
    for (const auto& r : uses_of(inst))
      if (!def.count(r)) use.insert(r);
    if (!inst.dest.empty()) def.insert(inst.dest);
  }
}

/// Backward liveness; `exit_uses` adds registers read after a block's last
/// instruction (return operands stripped by encapsulation, live-out sets).
std::map<std::string, RegSet> liveness(const Procedure& proc, const std::map<std::string, RegSet>& exit_uses,
                                       std::map<std::string, RegSet>* live_out_sets = nullptr) {
  using Bits = boost::dynamic_bitset<>;
  std::map<std::string, std::size_t> reg_index;
  std::vector<const std::string*> regs;
  auto index = [&](const std::string& r) {
    auto [it, fresh] = reg_index.emplace(r, regs.size());
    if (fresh) regs.push_back(&it->first);
    return it->second;
  };
  std::map<std::string, std::size_t> block_index;
  for (std::size_t i = 0; i < proc.blocks.size(); ++i) block_index[proc.blocks[i].id] = i;

  std::size_t n = proc.blocks.size();
  std::vector<std::vector<std::size_t>> use_list(n), def_list(n), exit_list(n), succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Block& b = proc.blocks[i];
    RegSet use, def;
    block_use_def(b, use, def);
    for (const auto& r : use) use_list[i].push_back(index(r));
    for (const auto& r : def) def_list[i].push_back(index(r));
    if (auto e = exit_uses.find(b.id); e != exit_uses.end())
      for (const auto& r : e->second) exit_list[i].push_back(index(r));
    for (const auto& s : b.successors)
      if (auto it = block_index.find(s); it != block_index.end()) succ[i].push_back(it->second);
  }
  std::size_t m = regs.size();
  std::vector<Bits> use(n, Bits(m)), keep(n, Bits(m)), in(n, Bits(m)), out(n, Bits(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto r : use_list[i]) use[i].set(r);
    keep[i].set();
    for (auto r : def_list[i]) keep[i].reset(r);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = n; k-- > 0;) {
      Bits o(m);
      for (auto s : succ[k]) o |= in[s];
      for (auto r : exit_list[k]) o.set(r);
      Bits i = use[k] | (o & keep[k]);
      if (i != in[k]) {
        in[k] = std::move(i);
        changed = true;
      }
      out[k] = std::move(o);
    }
  }
  auto to_set = [&](const Bits& bits) {
    RegSet s;
    for (auto r = bits.find_first(); r != Bits::npos; r = bits.find_next(r)) s.insert(*regs[r]);
    return s;
  };
  std::map<std::string, RegSet> result;
  for (std::size_t i = 0; i < n; ++i) {
    result[proc.blocks[i].id] = to_set(in[i]);
    if (live_out_sets) (*live_out_sets)[proc.blocks[i].id] = to_set(out[i]);
  }
  return result;
}

std::string fresh_block_id(const Procedure& proc, const std::string& base) {
  std::string id = base;
  for (std::size_t k = 1; proc.find(id); ++k) id = base + "_" + std::to_string(k);
  return id;
}

std::map<std::string, RegSet> unit_exit_uses(const EncapsulatedRegion& unit, bool with_live_out) {
  std::map<std::string, RegSet> uses;
  for (const auto& [id, ret] : unit.original_returns)
    for (const auto& r : uses_of(ret)) uses[id].insert(r);
  if (with_live_out) uses[unit.epilogue].insert(unit.live_out.begin(), unit.live_out.end());
  return uses;
}

bool removable(const Instruction& inst) {
  switch (inst.op) {
    case Opcode::Const:
    case Opcode::Move:
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Lt:
    case Opcode::Eq:
      return true;
    case Opcode::Div:
      return inst.operands[1].is_literal && inst.operands[1].value != 0;
    default:
      return false;
  }
}

std::optional<std::int64_t> fold(Opcode op, std::int64_t a, std::int64_t b) {
  auto u = [](std::int64_t v) { return static_cast<std::uint64_t>(v); };
  switch (op) {
    case Opcode::Add: return static_cast<std::int64_t>(u(a) + u(b));
    case Opcode::Sub: return static_cast<std::int64_t>(u(a) - u(b));
    case Opcode::Mul: return static_cast<std::int64_t>(u(a) * u(b));
    case Opcode::Div:
      if (b == 0) return std::nullopt;
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
      return a / b;
    case Opcode::Lt: return a < b ? 1 : 0;
    case Opcode::Eq: return a == b ? 1 : 0;
    default: return std::nullopt;
  }
}

bool fold_constants(Block& b) {
  bool changed = false;
  std::map<std::string, std::int64_t> known;
  for (auto& inst : b.instructions) {
    for (auto& o : inst.operands) {
      if (o.is_literal) continue;
      if (auto it = known.find(o.reg); it != known.end()) {
        o = Operand::literal(it->second);
        changed = true;
      }
    }
    if (inst.op == Opcode::Move && inst.operands[0].is_literal) {
      inst.op = Opcode::Const;
      changed = true;
    } else if (is_binary(inst.op) && inst.operands[0].is_literal && inst.operands[1].is_literal) {
      if (auto v = fold(inst.op, inst.operands[0].value, inst.operands[1].value)) {
        inst.op = Opcode::Const;
        inst.operands = {Operand::literal(*v)};
        changed = true;
      }
    }
    if (inst.dest.empty()) continue;
    if (inst.op == Opcode::Const) known[inst.dest] = inst.operands[0].value;
    else known.erase(inst.dest);
  }
  return changed;
}

}  // namespace

std::map<std::string, std::set<std::string>> live_in_sets(const Procedure& proc) {
  return liveness(proc, {});
}

EncapsulatedRegion encapsulate(const Procedure& proc, const std::set<std::string>& region, const std::string& entry) {
  if (!region.count(entry)) throw std::invalid_argument("region entry " + entry + " is not in the region");
  for (const auto& id : region)
    if (!proc.find(id)) throw std::invalid_argument("region block " + id + " is not in " + proc.name);
  if (!side_entries(proc, region, entry).empty())
    throw std::invalid_argument("region entered at more than one block");

  EncapsulatedRegion unit;
  unit.procedure = proc.name;
  unit.prologue = fresh_block_id(proc, "prologue");
  unit.epilogue = fresh_block_id(proc, "epilogue");
  if (unit.epilogue == unit.prologue) unit.epilogue += "_e";
  unit.unit.name = proc.name;

  Block pro;
  pro.id = unit.prologue;
  pro.origin = proc.name;
  pro.instructions = {Instruction{Opcode::Jump, {}, {}, {}}};
  pro.successors = {entry};
  pro.weight = proc.at(entry).weight;
  unit.unit.blocks.push_back(pro);

  RegSet live_out;
  auto global_in = live_in_sets(proc);
  for (const auto& b : proc.blocks) {
    if (!region.count(b.id)) continue;
    Block c = b;
    unit.original_successors[b.id] = b.successors;
    if (!c.instructions.empty() && c.instructions.back().op == Opcode::Return) {
      unit.original_returns[b.id] = c.instructions.back();
      for (const auto& r : uses_of(c.instructions.back())) live_out.insert(r);
      c.instructions.back() = Instruction{Opcode::Jump, {}, {}, {}};
      c.successors = {unit.epilogue};
    } else {
      for (auto& s : c.successors) {
        if (region.count(s)) continue;
        live_out.insert(global_in[s].begin(), global_in[s].end());
        s = unit.epilogue;
      }
    }
    unit.unit.blocks.push_back(std::move(c));
  }
  Block epi;
  epi.id = unit.epilogue;
  epi.origin = proc.name;
  epi.instructions = {Instruction{Opcode::Return, {}, {}, {}}};
  unit.unit.blocks.push_back(epi);
  unit.unit.entry_block = unit.prologue;
  unit.unit.exit_block = unit.epilogue;
  unit.live_out.assign(live_out.begin(), live_out.end());

  auto in = liveness(unit.unit, unit_exit_uses(unit, false));
  unit.live_in.assign(in[entry].begin(), in[entry].end());
  unit.unit.params = unit.live_in;
  return unit;
}

Procedure reintegrate(const EncapsulatedRegion& unit, const Procedure& proc) {
  if (unit.procedure != proc.name)
    throw std::invalid_argument("unit from " + unit.procedure + " cannot be reintegrated into " + proc.name);
  Procedure out = proc;
  for (const auto& b : unit.unit.blocks) {
    if (b.id == unit.prologue || b.id == unit.epilogue) continue;
    Block* target = out.find(b.id);
    auto succ = unit.original_successors.find(b.id);
    if (!target || succ == unit.original_successors.end())
      throw std::invalid_argument("unit block " + b.id + " does not match procedure " + proc.name);
    target->instructions = b.instructions;
    target->successors = succ->second;
    if (auto ret = unit.original_returns.find(b.id); ret != unit.original_returns.end())
      target->instructions.back() = ret->second;
  }
  return out;
}

EncapsulatedRegion optimize_region(const EncapsulatedRegion& unit) {
  EncapsulatedRegion out = unit;
  auto exit_uses = unit_exit_uses(out, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& b : out.unit.blocks) changed |= fold_constants(b);

    std::map<std::string, RegSet> live_out;
    liveness(out.unit, exit_uses, &live_out);
    for (auto& b : out.unit.blocks) {
      RegSet live = live_out[b.id];
      std::vector<Instruction> kept;
      for (auto it = b.instructions.rbegin(); it != b.instructions.rend(); ++it) {
        if (!it->dest.empty() && !live.count(it->dest) && removable(*it)) {
          changed = true;
          continue;
        }
        if (!it->dest.empty()) live.erase(it->dest);
        for (const auto& r : uses_of(*it)) live.insert(r);
        kept.push_back(*it);
      }
      std::reverse(kept.begin(), kept.end());
      b.instructions = std::move(kept);
    }
  }
  return out;
}

}  // namespace regionc
