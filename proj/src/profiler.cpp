#include "regionc/profiler.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace regionc {

std::uint64_t ExecutionProfile::count(const std::string& proc, const std::string& block) const {
  auto it = block_counts.find(BlockRef{proc, block});
  return it == block_counts.end() ? 0 : it->second;
}

namespace {

struct Slot {
  bool literal = false;
  std::int64_t value = 0;
  std::size_t reg = 0;
};

struct CInst {
  Opcode op;
  std::size_t dest = 0;
  std::vector<Slot> args;
  long callee = -1;  // -1: external
};

struct CBlock {
  std::vector<CInst> insts;
  std::vector<std::size_t> succs;
};

struct CProc {
  std::vector<CBlock> blocks;
  std::size_t entry = 0;
  std::size_t num_regs = 0;
  std::vector<std::size_t> params;
  std::vector<std::string> reg_names;
};

struct Frame {
  std::size_t proc;
  std::vector<std::int64_t> regs;
  std::vector<char> defined;
  std::size_t block;
  std::size_t pc;
};

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class Machine {
 public:
  explicit Machine(const Program& program) : program_(program) {
    std::unordered_map<std::string, std::size_t> proc_index;
    for (std::size_t i = 0; i < program.procedures.size(); ++i) proc_index[program.procedures[i].name] = i;
    for (const auto& p : program.procedures) {
      CProc cp;
      std::unordered_map<std::string, std::size_t> regs;
      auto slot_of = [&](const std::string& name) {
        auto [it, inserted] = regs.emplace(name, cp.num_regs);
        if (inserted) {
          ++cp.num_regs;
          cp.reg_names.push_back(name);
        }
        return it->second;
      };
      for (const auto& param : p.params) cp.params.push_back(slot_of(param));
      CfgIndex cfg(p);
      cp.entry = cfg.index_of(p.entry_block);
      for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
        const Block& b = p.blocks[bi];
        CBlock cb;
        cb.succs = cfg.succs(bi);
        for (const auto& inst : b.instructions) {
          CInst ci{inst.op};
          for (const auto& o : inst.operands)
            ci.args.push_back(o.is_literal ? Slot{true, o.value, 0} : Slot{false, 0, slot_of(o.reg)});
          if (!inst.dest.empty()) ci.dest = slot_of(inst.dest);
          if (inst.op == Opcode::Call) {
            auto it = proc_index.find(inst.callee);
            ci.callee = it == proc_index.end() ? -1 : static_cast<long>(it->second);
          }
          cb.insts.push_back(std::move(ci));
        }
        cp.blocks.push_back(std::move(cb));
      }
      procs_.push_back(std::move(cp));
    }
    counts_.resize(procs_.size());
    for (std::size_t i = 0; i < procs_.size(); ++i) counts_[i].assign(procs_[i].blocks.size(), 0);
  }

  ExecutionProfile run(const std::vector<std::int64_t>& input, const InterpretOptions& opts) {
    const Procedure* entry = program_.find(program_.entry);
    if (!entry) throw RuntimeError(RuntimeError::Kind::ArityMismatch, "no entry procedure");
    std::size_t ep = static_cast<std::size_t>(entry - program_.procedures.data());
    std::vector<std::int64_t> args(procs_[ep].params.size(), 0);
    for (std::size_t i = 0; i < args.size() && i < input.size(); ++i) args[i] = input[i];

    ExecutionProfile prof;
    std::vector<Frame> stack;
    push_frame(stack, ep, args, opts);
    std::int64_t ret = 0;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const CProc& cp = procs_[f.proc];
      const CBlock& cb = cp.blocks[f.block];
      const CInst& ci = cb.insts[f.pc];
      if (++prof.dynamic_instructions > opts.fuel)
        throw RuntimeError(RuntimeError::Kind::FuelExhausted,
                           "fuel exhausted after " + std::to_string(opts.fuel) + " instructions");
      auto val = [&](const Slot& s) -> std::int64_t {
        if (s.literal) return s.value;
        if (!f.defined[s.reg])
          throw RuntimeError(RuntimeError::Kind::UndefinedRegister,
                             "read of unassigned register '" + cp.reg_names[s.reg] + "' in " +
                                 program_.procedures[f.proc].name);
        return f.regs[s.reg];
      };
      auto set = [&](std::size_t r, std::int64_t v) {
        f.regs[r] = v;
        f.defined[r] = 1;
      };
      switch (ci.op) {
        case Opcode::Const:
        case Opcode::Move: set(ci.dest, val(ci.args[0])); ++f.pc; break;
        case Opcode::Add: set(ci.dest, wrap_add(val(ci.args[0]), val(ci.args[1]))); ++f.pc; break;
        case Opcode::Sub: set(ci.dest, wrap_sub(val(ci.args[0]), val(ci.args[1]))); ++f.pc; break;
        case Opcode::Mul: set(ci.dest, wrap_mul(val(ci.args[0]), val(ci.args[1]))); ++f.pc; break;
        case Opcode::Div: {
          std::int64_t a = val(ci.args[0]), b = val(ci.args[1]);
          if (b == 0) throw RuntimeError(RuntimeError::Kind::DivisionByZero, "division by zero");
          set(ci.dest, (a == std::numeric_limits<std::int64_t>::min() && b == -1) ? a : a / b);
          ++f.pc;
          break;
        }
        case Opcode::Lt: set(ci.dest, val(ci.args[0]) < val(ci.args[1]) ? 1 : 0); ++f.pc; break;
        case Opcode::Eq: set(ci.dest, val(ci.args[0]) == val(ci.args[1]) ? 1 : 0); ++f.pc; break;
        case Opcode::Print: prof.outputs.push_back(val(ci.args[0])); ++f.pc; break;
        case Opcode::Jump: enter_block(f, cb.succs[0]); break;
        case Opcode::Branch: enter_block(f, val(ci.args[0]) != 0 ? cb.succs[0] : cb.succs[1]); break;
        case Opcode::Call: {
          ++prof.dynamic_calls;
          std::vector<std::int64_t> a;
          a.reserve(ci.args.size());
          for (const auto& s : ci.args) a.push_back(val(s));
          if (ci.callee < 0) {
            set(ci.dest, 0);
            ++f.pc;
            break;
          }
          const CProc& callee = procs_[static_cast<std::size_t>(ci.callee)];
          if (callee.params.size() != a.size())
            throw RuntimeError(RuntimeError::Kind::ArityMismatch,
                               "call to " + program_.procedures[static_cast<std::size_t>(ci.callee)].name +
                                   " with " + std::to_string(a.size()) + " arguments");
          push_frame(stack, static_cast<std::size_t>(ci.callee), a, opts);
          break;
        }
        case Opcode::Return: {
          ret = ci.args.empty() ? 0 : val(ci.args[0]);
          stack.pop_back();
          if (!stack.empty()) {
            Frame& caller = stack.back();
            const CInst& call = procs_[caller.proc].blocks[caller.block].insts[caller.pc];
            caller.regs[call.dest] = ret;
            caller.defined[call.dest] = 1;
            ++caller.pc;
          }
          break;
        }
      }
    }
    for (std::size_t p = 0; p < procs_.size(); ++p) {
      const Procedure& proc = program_.procedures[p];
      for (std::size_t b = 0; b < proc.blocks.size(); ++b)
        prof.block_counts[BlockRef{proc.name, proc.blocks[b].id}] = counts_[p][b];
    }
    return prof;
  }

 private:
  void push_frame(std::vector<Frame>& stack, std::size_t proc, const std::vector<std::int64_t>& args,
                  const InterpretOptions& opts) {
    if (stack.size() >= opts.max_call_depth)
      throw RuntimeError(RuntimeError::Kind::StackOverflow, "call depth limit exceeded");
    const CProc& cp = procs_[proc];
    Frame f{proc, std::vector<std::int64_t>(cp.num_regs, 0), std::vector<char>(cp.num_regs, 0), cp.entry, 0};
    for (std::size_t i = 0; i < cp.params.size(); ++i) {
      f.regs[cp.params[i]] = args[i];
      f.defined[cp.params[i]] = 1;
    }
    ++counts_[proc][cp.entry];
    stack.push_back(std::move(f));
  }

  void enter_block(Frame& f, std::size_t block) {
    f.block = block;
    f.pc = 0;
    ++counts_[f.proc][block];
  }

  const Program& program_;
  std::vector<CProc> procs_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

}  // namespace

ExecutionProfile interpret(const Program& program, const std::vector<std::int64_t>& input,
                           const InterpretOptions& options) {
  Machine m(program);
  return m.run(input, options);
}

std::uint64_t dynamic_cost(const ExecutionProfile& profile, std::uint64_t call_overhead) {
  return profile.dynamic_instructions + call_overhead * profile.dynamic_calls;
}

Program annotate_profile(const Program& program, const ExecutionProfile& profile) {
  Program out = program;
  for (const auto& [ref, n] : profile.block_counts) {
    const Procedure* p = program.find(ref.procedure);
    if (!p || !p->find(ref.block)) throw std::invalid_argument("profile references unknown block " + ref.str());
  }
  for (auto& p : out.procedures)
    for (auto& b : p.blocks) b.weight = Weight(profile.count(p.name, b.id));
  return out;
}

int LoopInfo::at(const std::string& block) const {
  auto it = depth.find(block);
  return it == depth.end() ? 0 : it->second;
}

std::vector<std::size_t> immediate_dominators(const CfgIndex& cfg) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> rpo = cfg.reverse_postorder();
  std::vector<std::size_t> order(cfg.size(), kNone);
  for (std::size_t i = 0; i < rpo.size(); ++i) order[rpo[i]] = i;
  std::vector<std::size_t> idom(cfg.size(), kNone);
  if (rpo.empty()) return idom;
  idom[cfg.entry()] = cfg.entry();
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (order[a] > order[b]) a = idom[a];
      while (order[b] > order[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 1; k < rpo.size(); ++k) {
      std::size_t n = rpo[k];
      std::size_t nd = kNone;
      for (std::size_t p : cfg.preds(n)) {
        if (idom[p] == kNone) continue;
        nd = nd == kNone ? p : intersect(p, nd);
      }
      if (nd != idom[n]) {
        idom[n] = nd;
        changed = true;
      }
    }
  }
  return idom;
}

LoopInfo loop_depths(const Procedure& proc) {
  CfgIndex cfg(proc);
  std::vector<std::size_t> idom = immediate_dominators(cfg);
  auto dominates = [&](std::size_t a, std::size_t b) {
    if (idom[b] == std::numeric_limits<std::size_t>::max()) return false;
    while (true) {
      if (a == b) return true;
      if (idom[b] == b) return false;
      b = idom[b];
    }
  };

  // One natural loop per header: the union of the bodies of its back edges.
  std::map<std::size_t, std::vector<bool>> loops;
  for (std::size_t n = 0; n < cfg.size(); ++n) {
    for (std::size_t h : cfg.succs(n)) {
      if (!dominates(h, n)) continue;
      auto& body = loops[h];
      if (body.empty()) body.assign(cfg.size(), false);
      body[h] = true;
      std::vector<std::size_t> work;
      if (!body[n]) {
        body[n] = true;
        work.push_back(n);
      }
      while (!work.empty()) {
        std::size_t m = work.back();
        work.pop_back();
        for (std::size_t p : cfg.preds(m)) {
          if (!body[p]) {
            body[p] = true;
            work.push_back(p);
          }
        }
      }
    }
  }
  LoopInfo info;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    int d = 0;
    for (const auto& [h, body] : loops)
      if (body[i]) ++d;
    info.depth[proc.blocks[i].id] = d;
  }
  return info;
}

}  // namespace regionc
