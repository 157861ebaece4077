#include "regionc/inliner.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace regionc {

namespace {

std::set<std::string> registers_of(const Procedure& p) {
  std::set<std::string> regs(p.params.begin(), p.params.end());
  for (const auto& b : p.blocks)
    for (const auto& inst : b.instructions) {
      if (!inst.dest.empty()) regs.insert(inst.dest);
      for (const auto& o : inst.operands)
        if (!o.is_literal) regs.insert(o.reg);
    }
  return regs;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (std::size_t k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!taken.count(cand)) return cand;
  }
}

}  // namespace

InlineRecord inline_body(Program& program, const std::string& caller_name, const std::string& call_block,
                         const Procedure& body) {
  Procedure& caller = program.at(caller_name);
  auto pos = std::find_if(caller.blocks.begin(), caller.blocks.end(),
                          [&](const Block& b) { return b.id == call_block; });
  if (pos == caller.blocks.end()) throw std::invalid_argument("no block " + caller_name + "." + call_block);
  const Instruction* call = call_of(*pos);
  if (!call) throw std::invalid_argument(caller_name + "." + call_block + " is not a call block");
  if (call->operands.size() != body.params.size())
    throw std::invalid_argument("arity mismatch inlining " + body.name + " into " + caller_name);
  if (pos->successors.size() != 1) throw std::invalid_argument("malformed call block " + call_block);

  const Instruction call_inst = *call;
  const std::string cont = pos->successors[0];
  const Weight freq = pos->weight;
  const std::size_t callee_size = code_size(body);

  InlineRecord rec;
  rec.caller = caller_name;
  rec.call_block = call_block;
  rec.callee = call_inst.callee;
  rec.frequency = freq;
  rec.callee_size = callee_size;

  // Parameters the body never writes are replaced by the argument operands.
  std::set<std::string> written;
  for (const auto& b : body.blocks)
    for (const auto& inst : b.instructions)
      if (!inst.dest.empty()) written.insert(inst.dest);

  std::set<std::string> taken_regs = registers_of(caller);
  std::map<std::string, Operand> subst;
  std::vector<Instruction> param_moves;
  for (std::size_t i = 0; i < body.params.size(); ++i) {
    const std::string& param = body.params[i];
    if (!written.count(param)) {
      subst[param] = call_inst.operands[i];
    } else {
      std::string fresh = fresh_name(param, taken_regs);
      taken_regs.insert(fresh);
      subst[param] = Operand::reg_ref(fresh);
      param_moves.push_back(Instruction{Opcode::Move, fresh, {call_inst.operands[i]}, {}});
    }
  }
  for (const auto& reg : registers_of(body)) {
    if (subst.count(reg)) continue;
    std::string fresh = fresh_name(reg, taken_regs);
    taken_regs.insert(fresh);
    subst[reg] = Operand::reg_ref(fresh);
  }
  auto rename = [&](const Operand& o) { return o.is_literal ? o : subst.at(o.reg); };

  std::set<std::string> taken_ids;
  for (const auto& b : caller.blocks)
    if (b.id != call_block) taken_ids.insert(b.id);
  for (const auto& b : body.blocks) {
    std::string id = fresh_name(b.id, taken_ids);
    taken_ids.insert(id);
    rec.block_map[b.id] = id;
  }
  rec.entry_copy = rec.block_map.at(body.entry_block);
  rec.exit_copy = rec.block_map.at(body.exit_block);

  Weight entry_w = body.at(body.entry_block).weight;
  Weight scale = freq / (entry_w < 1 ? Weight(1) : entry_w);

  std::vector<Block> copies;
  std::string first_id = rec.entry_copy;
  if (!param_moves.empty()) {
    Block pre;
    pre.id = fresh_name(body.entry_block, taken_ids);
    taken_ids.insert(pre.id);
    pre.instructions = param_moves;
    pre.instructions.push_back(Instruction{Opcode::Jump, {}, {}, {}});
    pre.successors = {rec.entry_copy};
    pre.weight = freq;
    pre.origin = body.at(body.entry_block).origin;
    first_id = pre.id;
    copies.push_back(std::move(pre));
  }
  long growth = static_cast<long>(callee_size) - 2 + static_cast<long>(copies.empty() ? 0 : param_moves.size() + 1);
  for (const auto& b : body.blocks) {
    Block c;
    c.id = rec.block_map.at(b.id);
    c.origin = b.origin;
    c.weight = b.weight * scale;
    for (const auto& s : b.successors) c.successors.push_back(rec.block_map.at(s));
    for (const auto& inst : b.instructions) {
      if (inst.op == Opcode::Return) {
        Instruction mv;
        mv.dest = call_inst.dest;
        if (inst.operands.empty()) {
          mv.op = Opcode::Const;
          mv.operands = {Operand::literal(0)};
        } else {
          Operand r = rename(inst.operands[0]);
          mv.op = r.is_literal ? Opcode::Const : Opcode::Move;
          mv.operands = {r};
        }
        c.instructions.push_back(std::move(mv));
        c.instructions.push_back(Instruction{Opcode::Jump, {}, {}, {}});
        c.successors = {cont};
        ++growth;
        continue;
      }
      Instruction ni = inst;
      if (!ni.dest.empty()) ni.dest = subst.at(ni.dest).reg;
      for (auto& o : ni.operands) o = rename(o);
      c.instructions.push_back(std::move(ni));
    }
    copies.push_back(std::move(c));
  }
  rec.growth = growth;
  rec.first_block = first_id;

  std::size_t at = static_cast<std::size_t>(pos - caller.blocks.begin());
  caller.blocks.erase(caller.blocks.begin() + static_cast<long>(at));
  for (auto& b : caller.blocks)
    for (auto& s : b.successors)
      if (s == call_block) s = first_id;
  caller.blocks.insert(caller.blocks.begin() + static_cast<long>(at), std::make_move_iterator(copies.begin()),
                       std::make_move_iterator(copies.end()));
  if (caller.entry_block == call_block) caller.entry_block = first_id;
  return rec;
}

Program inline_at(const Program& program, const Callsite& site) {
  const Procedure* callee = program.find(site.callee);
  if (!callee) throw std::invalid_argument("cannot inline external procedure " + site.callee);
  const Block& b = program.at(site.caller).at(site.block);
  const Instruction* call = call_of(b);
  if (!call || call->callee != site.callee) throw std::invalid_argument("no call to " + site.callee + " at " + site.block);
  Program out = program;
  Procedure body = *callee;
  inline_body(out, site.caller, site.block, body);
  return out;
}

std::vector<Callsite> callsites(const Program& program) {
  std::vector<Callsite> out;
  for (const auto& p : program.procedures)
    for (const auto& b : p.blocks)
      if (const Instruction* c = call_of(b)) out.push_back(Callsite{p.name, b.id, c->callee, b.weight});
  return out;
}

std::set<std::string> reachable_procedures(const Program& program) {
  std::set<std::string> seen;
  std::vector<std::string> work{program.entry};
  while (!work.empty()) {
    std::string n = work.back();
    work.pop_back();
    const Procedure* p = program.find(n);
    if (!p || !seen.insert(n).second) continue;
    for (const auto& b : p->blocks)
      if (const Instruction* c = call_of(b)) work.push_back(c->callee);
  }
  return seen;
}

AggressiveResult aggressive_inline(const Program& program, const Weight& growth_limit) {
  AggressiveResult res{program, {}};
  GrowthState growth{code_size(program), code_size(program)};
  while (growth_allows(growth, growth_limit)) {
    const Callsite* best = nullptr;
    std::size_t best_size = 0;
    std::vector<Callsite> sites = callsites(res.program);
    for (const auto& s : sites) {
      const Procedure* callee = res.program.find(s.callee);
      if (!callee) continue;
      if (call_of(res.program.at(s.caller).at(s.block))->operands.size() != callee->params.size()) continue;
      std::size_t sz = code_size(*callee);
      if (best) {
        if (s.frequency != best->frequency) {
          if (s.frequency < best->frequency) continue;
        } else if (sz != best_size) {
          if (sz > best_size) continue;
        } else if (s.caller != best->caller) {
          if (s.caller > best->caller) continue;
        } else if (!natural_less(s.block, best->block)) {
          continue;
        }
      }
      best = &s;
      best_size = sz;
    }
    if (!best) break;
    Procedure body = res.program.at(best->callee);
    InlineRecord rec = inline_body(res.program, best->caller, best->block, body);
    growth.current = code_size(res.program);
    res.inlined.push_back(std::move(rec));
  }
  return res;
}

}  // namespace regionc
