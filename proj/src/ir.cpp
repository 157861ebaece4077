#include "regionc/ir.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>

namespace regionc {

namespace {

constexpr std::pair<Opcode, std::string_view> kOpcodeNames[] = {
    {Opcode::Const, "const"}, {Opcode::Add, "add"},       {Opcode::Sub, "sub"},
    {Opcode::Mul, "mul"},     {Opcode::Div, "div"},       {Opcode::Lt, "lt"},
    {Opcode::Eq, "eq"},       {Opcode::Branch, "branch"}, {Opcode::Jump, "jump"},
    {Opcode::Call, "call"},   {Opcode::Return, "return"}, {Opcode::Print, "print"},
    {Opcode::Move, "move"},
};

bool is_ident(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_integer(std::string_view s) {
  if (!s.empty() && s[0] == '-') s.remove_prefix(1);
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    auto word_char = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
    if (word_char(c) || (c == '-' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      ++i;
      while (i < line.size() && word_char(line[i])) ++i;
      out.push_back({std::string(line.substr(start, i - start)), start + 1});
      continue;
    }
    if (std::string_view("(){}[],:=/").find(c) != std::string_view::npos) {
      out.push_back({std::string(1, c), start + 1});
      ++i;
      continue;
    }
    throw ParseError(line_no, start + 1, std::string("unexpected character '") + c + "'");
  }
  return out;
}

class LineCursor {
 public:
  LineCursor(std::vector<Token> toks, std::size_t line_no, std::size_t line_len)
      : toks_(std::move(toks)), line_(line_no), end_col_(line_len + 1) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek() const { return done() ? nullptr : &toks_[pos_]; }
  bool peek_is(std::string_view s) const { return !done() && toks_[pos_].text == s; }

  const Token& next(std::string_view what) {
    if (done()) fail("expected " + std::string(what));
    return toks_[pos_++];
  }
  void expect(std::string_view s) {
    const Token& t = next("'" + std::string(s) + "'");
    if (t.text != s) fail_at(t, "expected '" + std::string(s) + "', found '" + t.text + "'");
  }
  std::string ident(std::string_view what) {
    const Token& t = next(what);
    if (!is_ident(t.text)) fail_at(t, "expected " + std::string(what) + ", found '" + t.text + "'");
    return t.text;
  }
  std::string word(std::string_view what) {
    const Token& t = next(what);
    if (!is_word(t.text)) fail_at(t, "expected " + std::string(what) + ", found '" + t.text + "'");
    return t.text;
  }
  std::int64_t integer(std::string_view what) {
    const Token& t = next(what);
    if (!is_integer(t.text)) fail_at(t, "expected " + std::string(what) + ", found '" + t.text + "'");
    try {
      return std::stoll(t.text);
    } catch (const std::out_of_range&) {
      fail_at(t, "integer literal out of range");
    }
  }
  Operand operand() {
    const Token& t = next("operand");
    if (is_integer(t.text)) {
      try {
        return Operand::literal(std::stoll(t.text));
      } catch (const std::out_of_range&) {
        fail_at(t, "integer literal out of range");
      }
    }
    if (!is_ident(t.text)) fail_at(t, "expected register or integer, found '" + t.text + "'");
    return Operand::reg_ref(t.text);
  }
  void end() {
    if (!done()) fail_at(toks_[pos_], "unexpected '" + toks_[pos_].text + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, end_col_, msg); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(line_, t.column, msg);
  }
  std::size_t line() const { return line_; }
  std::size_t column() const { return done() ? end_col_ : toks_[pos_].column; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t end_col_;
};

struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;
};

Instruction parse_instruction(LineCursor& cur, Block& block) {
  Instruction inst;
  const Token& first = cur.next("instruction");
  if (first.text == "print") {
    inst.op = Opcode::Print;
    inst.operands.push_back(cur.operand());
  } else if (first.text == "return") {
    inst.op = Opcode::Return;
    if (!cur.done()) inst.operands.push_back(cur.operand());
  } else if (first.text == "jump") {
    inst.op = Opcode::Jump;
    block.successors = {cur.word("block id")};
  } else if (first.text == "branch") {
    inst.op = Opcode::Branch;
    inst.operands.push_back(cur.operand());
    std::string t = cur.word("block id");
    std::string f = cur.word("block id");
    block.successors = {t, f};
  } else {
    if (!is_ident(first.text)) cur.fail_at(first, "expected instruction, found '" + first.text + "'");
    inst.dest = first.text;
    cur.expect("=");
    const Token& optok = cur.next("opcode");
    auto op = opcode_from_name(optok.text);
    if (!op || *op == Opcode::Branch || *op == Opcode::Jump || *op == Opcode::Return ||
        *op == Opcode::Print)
      cur.fail_at(optok, "unknown opcode '" + optok.text + "'");
    inst.op = *op;
    if (*op == Opcode::Const) {
      inst.operands.push_back(Operand::literal(cur.integer("integer constant")));
    } else if (*op == Opcode::Move) {
      inst.operands.push_back(cur.operand());
    } else if (*op == Opcode::Call) {
      inst.callee = cur.ident("procedure name");
      cur.expect("(");
      if (!cur.peek_is(")")) {
        inst.operands.push_back(cur.operand());
        while (cur.peek_is(",")) {
          cur.expect(",");
          inst.operands.push_back(cur.operand());
        }
      }
      cur.expect(")");
    } else {
      inst.operands.push_back(cur.operand());
      inst.operands.push_back(cur.operand());
    }
  }
  cur.end();
  return inst;
}

Weight parse_weight(LineCursor& cur) {
  const Token& t = cur.next("weight");
  if (!is_integer(t.text) || t.text[0] == '-') cur.fail_at(t, "weight must be a nonnegative integer");
  boost::multiprecision::cpp_int num(t.text);
  if (cur.peek_is("/")) {
    cur.expect("/");
    const Token& d = cur.next("denominator");
    if (!is_integer(d.text) || d.text[0] == '-') cur.fail_at(d, "bad weight denominator");
    boost::multiprecision::cpp_int den(d.text);
    if (den == 0) cur.fail_at(d, "zero weight denominator");
    return Weight(num, den);
  }
  return Weight(num);
}

}  // namespace

std::string_view opcode_name(Opcode op) {
  for (const auto& [o, n] : kOpcodeNames)
    if (o == op) return n;
  return "?";
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (const auto& [o, n] : kOpcodeNames)
    if (n == name) return o;
  return std::nullopt;
}

bool is_terminator(Opcode op) {
  return op == Opcode::Branch || op == Opcode::Jump || op == Opcode::Return;
}

bool is_binary(Opcode op) {
  switch (op) {
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Div:
    case Opcode::Lt:
    case Opcode::Eq:
      return true;
    default:
      return false;
  }
}

const Block* Procedure::find(std::string_view id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

Block* Procedure::find(std::string_view id) {
  for (auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

const Block& Procedure::at(std::string_view id) const {
  if (const Block* b = find(id)) return *b;
  throw std::out_of_range("no block '" + std::string(id) + "' in procedure " + name);
}

Block& Procedure::at(std::string_view id) {
  if (Block* b = find(id)) return *b;
  throw std::out_of_range("no block '" + std::string(id) + "' in procedure " + name);
}

const Procedure* Program::find(std::string_view name) const {
  for (const auto& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

Procedure* Program::find(std::string_view name) {
  for (auto& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

const Procedure& Program::at(std::string_view name) const {
  if (const Procedure* p = find(name)) return *p;
  throw std::out_of_range("no procedure '" + std::string(name) + "'");
}

Procedure& Program::at(std::string_view name) {
  if (Procedure* p = find(name)) return *p;
  throw std::out_of_range("no procedure '" + std::string(name) + "'");
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

Program parse_program(std::string_view text) {
  Program program;
  std::map<std::string, SourcePos> proc_pos;
  std::map<std::string, SourcePos> block_pos;  // "proc.block"
  std::vector<std::pair<SourcePos, std::string>> callees;
  std::vector<std::tuple<SourcePos, std::string, std::string>> targets;  // pos, proc, target
  std::optional<std::pair<SourcePos, std::string>> entry_directive;

  Procedure* proc = nullptr;
  Block* block = nullptr;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineCursor cur(tokenize(line, line_no), line_no, line.size());
    if (cur.done()) continue;

    if (!proc) {
      const Token& kw = cur.next("declaration");
      if (kw.text == "extern") {
        program.externals.insert(cur.ident("procedure name"));
        cur.end();
      } else if (kw.text == "entry") {
        SourcePos pos{line_no, cur.column()};
        entry_directive = {pos, cur.ident("procedure name")};
        cur.end();
      } else if (kw.text == "proc") {
        SourcePos pos{line_no, cur.column()};
        Procedure p;
        p.name = cur.ident("procedure name");
        if (proc_pos.count(p.name)) throw ParseError(pos.line, pos.column, "duplicate procedure '" + p.name + "'");
        proc_pos[p.name] = pos;
        cur.expect("(");
        if (!cur.peek_is(")")) {
          p.params.push_back(cur.ident("parameter"));
          while (cur.peek_is(",")) {
            cur.expect(",");
            p.params.push_back(cur.ident("parameter"));
          }
        }
        cur.expect(")");
        cur.expect("{");
        cur.end();
        program.procedures.push_back(std::move(p));
        proc = &program.procedures.back();
        block = nullptr;
      } else {
        cur.fail_at(kw, "expected 'proc', 'extern' or 'entry', found '" + kw.text + "'");
      }
      continue;
    }

    if (cur.peek_is("}")) {
      cur.expect("}");
      cur.end();
      if (proc->blocks.empty())
        throw ParseError(line_no, 1, "procedure '" + proc->name + "' has no blocks");
      proc = nullptr;
      block = nullptr;
      continue;
    }
    if (cur.peek_is("block")) {
      cur.expect("block");
      SourcePos pos{line_no, cur.column()};
      Block b;
      b.id = cur.word("block id");
      b.origin = proc->name;
      std::string key = proc->name + "." + b.id;
      if (block_pos.count(key)) throw ParseError(pos.line, pos.column, "duplicate block '" + b.id + "'");
      block_pos[key] = pos;
      while (cur.peek_is("[")) {
        cur.expect("[");
        const Token& attr = cur.next("attribute");
        if (attr.text == "weight") {
          b.weight = parse_weight(cur);
        } else if (attr.text == "origin") {
          b.origin = cur.ident("origin procedure");
        } else {
          cur.fail_at(attr, "unknown block attribute '" + attr.text + "'");
        }
        cur.expect("]");
      }
      cur.expect(":");
      cur.end();
      proc->blocks.push_back(std::move(b));
      block = &proc->blocks.back();
      continue;
    }
    if (!block) cur.fail("instruction outside of a block");
    SourcePos pos{line_no, cur.column()};
    Instruction inst = parse_instruction(cur, *block);
    if (inst.op == Opcode::Call) callees.push_back({pos, inst.callee});
    if (inst.op == Opcode::Jump || inst.op == Opcode::Branch)
      for (const auto& t : block->successors) targets.emplace_back(pos, proc->name, t);
    block->instructions.push_back(std::move(inst));
  }
  if (proc) throw ParseError(line_no, 1, "unterminated procedure '" + proc->name + "'");

  for (const auto& [pos, proc_name, target] : targets)
    if (!block_pos.count(proc_name + "." + target))
      throw ParseError(pos.line, pos.column, "undefined branch target '" + target + "'");
  for (const auto& [pos, callee] : callees)
    if (!proc_pos.count(callee) && !program.externals.count(callee))
      throw ParseError(pos.line, pos.column, "undefined callee '" + callee + "'");
  for (const auto& ext : program.externals)
    if (proc_pos.count(ext)) throw ParseError(proc_pos[ext].line, proc_pos[ext].column,
                                              "procedure '" + ext + "' is also declared extern");

  if (program.procedures.empty()) throw ParseError(line_no, 1, "program has no procedures");
  if (entry_directive) {
    if (!proc_pos.count(entry_directive->second))
      throw ParseError(entry_directive->first.line, entry_directive->first.column,
                       "undefined entry procedure '" + entry_directive->second + "'");
    program.entry = entry_directive->second;
  } else if (program.find("main")) {
    program.entry = "main";
  } else {
    program.entry = program.procedures.front().name;
  }

  for (auto& p : program.procedures) {
    p.entry_block = p.blocks.front().id;
    for (const auto& b : p.blocks) {
      if (!b.instructions.empty() && b.instructions.back().op == Opcode::Return) {
        p.exit_block = b.id;
        break;
      }
    }
  }

  auto diags = validate(program);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    SourcePos pos;
    if (auto it = block_pos.find(d.location); it != block_pos.end()) pos = it->second;
    else if (auto jt = proc_pos.find(d.location); jt != proc_pos.end()) pos = jt->second;
    throw ParseError(pos.line, pos.column, d.invariant + ": " + d.message);
  }
  return program;
}

namespace {

std::string operand_str(const Operand& o) {
  return o.is_literal ? std::to_string(o.value) : o.reg;
}

}  // namespace

std::string weight_to_string(const Weight& w) {
  auto num = boost::multiprecision::numerator(w);
  auto den = boost::multiprecision::denominator(w);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double weight_to_double(const Weight& w) { return w.convert_to<double>(); }

std::string unparse(const Program& program) {
  std::ostringstream os;
  for (const auto& ext : program.externals) os << "extern " << ext << "\n";
  os << "entry " << program.entry << "\n";
  for (const auto& p : program.procedures) {
    os << "\nproc " << p.name << "(";
    for (std::size_t i = 0; i < p.params.size(); ++i) os << (i ? ", " : "") << p.params[i];
    os << ") {\n";
    for (const auto& b : p.blocks) {
      os << "block " << b.id;
      if (b.weight != 0) os << " [weight " << weight_to_string(b.weight) << "]";
      if (b.origin != p.name) os << " [origin " << b.origin << "]";
      os << ":\n";
      for (const auto& inst : b.instructions) {
        os << "  ";
        switch (inst.op) {
          case Opcode::Print:
            os << "print " << operand_str(inst.operands.at(0));
            break;
          case Opcode::Return:
            os << "return";
            if (!inst.operands.empty()) os << " " << operand_str(inst.operands[0]);
            break;
          case Opcode::Jump:
            os << "jump " << (b.successors.empty() ? "?" : b.successors[0]);
            break;
          case Opcode::Branch:
            os << "branch " << operand_str(inst.operands.at(0)) << " "
               << (b.successors.size() > 0 ? b.successors[0] : "?") << " "
               << (b.successors.size() > 1 ? b.successors[1] : "?");
            break;
          case Opcode::Call:
            os << inst.dest << " = call " << inst.callee << "(";
            for (std::size_t i = 0; i < inst.operands.size(); ++i)
              os << (i ? ", " : "") << operand_str(inst.operands[i]);
            os << ")";
            break;
          default:
            os << inst.dest << " = " << opcode_name(inst.op);
            for (const auto& o : inst.operands) os << " " << operand_str(o);
            break;
        }
        os << "\n";
      }
    }
    os << "}\n";
  }
  return os.str();
}

std::vector<Diagnostic> validate(const Program& program) {
  std::vector<Diagnostic> out;
  auto diag = [&](std::string inv, std::string loc, std::string msg) {
    out.push_back({std::move(inv), std::move(loc), std::move(msg)});
  };

  if (!program.find(program.entry)) diag("entry procedure", program.entry, "entry procedure is not defined");

  std::set<std::string> names;
  for (const auto& p : program.procedures) {
    if (!names.insert(p.name).second) diag("duplicate procedure", p.name, "procedure defined twice");
    if (program.externals.count(p.name)) diag("duplicate procedure", p.name, "procedure also declared extern");
  }

  for (const auto& p : program.procedures) {
    if (p.blocks.empty()) {
      diag("empty procedure", p.name, "procedure has no blocks");
      continue;
    }
    std::set<std::string> ids;
    bool ids_ok = true;
    for (const auto& b : p.blocks) {
      if (!ids.insert(b.id).second) {
        diag("duplicate block", p.name + "." + b.id, "block id used twice");
        ids_ok = false;
      }
    }
    bool edges_ok = ids_ok;
    for (const auto& b : p.blocks) {
      std::string loc = p.name + "." + b.id;
      if (b.successors.size() > 2) {
        diag("successor arity", loc, "block has " + std::to_string(b.successors.size()) + " successors");
        edges_ok = false;
      }
      for (const auto& s : b.successors) {
        if (!ids.count(s)) {
          diag("undefined successor", loc, "successor '" + s + "' does not exist");
          edges_ok = false;
        }
      }
      if (b.origin.empty()) diag("origin", loc, "block has no procedure of origin");
      if (b.weight < 0) diag("weight", loc, "negative weight");

      if (b.instructions.empty()) {
        diag("terminator", loc, "block is empty");
        continue;
      }
      const Instruction& last = b.instructions.back();
      std::size_t expected_succs = 0;
      switch (last.op) {
        case Opcode::Branch: expected_succs = 2; break;
        case Opcode::Jump: expected_succs = 1; break;
        case Opcode::Return: expected_succs = 0; break;
        default:
          diag("terminator", loc, "block does not end in branch, jump or return");
          expected_succs = b.successors.size();
          break;
      }
      if (b.successors.size() != expected_succs && b.successors.size() <= 2)
        diag("successor arity", loc, "terminator '" + std::string(opcode_name(last.op)) + "' expects " +
                                         std::to_string(expected_succs) + " successors");
      std::size_t calls = 0;
      for (std::size_t i = 0; i < b.instructions.size(); ++i) {
        const Instruction& inst = b.instructions[i];
        if (is_terminator(inst.op) && i + 1 != b.instructions.size())
          diag("terminator", loc, "terminator in the middle of a block");
        std::size_t want = 0;
        bool needs_dest = true;
        switch (inst.op) {
          case Opcode::Const:
          case Opcode::Move: want = 1; break;
          case Opcode::Branch:
          case Opcode::Print: want = 1; needs_dest = false; break;
          case Opcode::Jump: want = 0; needs_dest = false; break;
          case Opcode::Return: want = inst.operands.size() > 1 ? 1 : inst.operands.size(); needs_dest = false; break;
          case Opcode::Call: want = inst.operands.size(); break;
          default: want = 2; break;
        }
        if (inst.operands.size() != want) diag("operand count", loc, "wrong operand count for '" + std::string(opcode_name(inst.op)) + "'");
        if (needs_dest && inst.dest.empty()) diag("operand count", loc, "missing destination register");
        if (!needs_dest && !inst.dest.empty()) diag("operand count", loc, "unexpected destination register");
        if (inst.op == Opcode::Const && (inst.operands.empty() || !inst.operands[0].is_literal))
          diag("operand count", loc, "const takes an integer literal");
        if (inst.op == Opcode::Call) {
          ++calls;
          if (!program.find(inst.callee) && !program.externals.count(inst.callee))
            diag("undefined callee", loc, "call to undefined procedure '" + inst.callee + "'");
        }
      }
      if (calls > 1) diag("call block shape", loc, "more than one call in a block");
      if (calls == 1 && !(b.instructions.size() == 2 && b.instructions[0].op == Opcode::Call &&
                          b.instructions[1].op == Opcode::Jump))
        diag("call block shape", loc, "a call block holds exactly the call and a jump");
    }
    if (!edges_ok) continue;

    CfgIndex cfg(p);
    if (!ids.count(p.entry_block)) {
      diag("entry block", p.name, "entry block '" + p.entry_block + "' does not exist");
      continue;
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < cfg.size(); ++i)
      if (cfg.preds(i).empty()) ++roots;
    if (!cfg.preds(cfg.index_of(p.entry_block)).empty())
      diag("entry block", p.name + "." + p.entry_block, "entry block has predecessors");
    if (roots > 1) diag("multiple entries", p.name, std::to_string(roots) + " blocks lack predecessors");

    const Block* exit = p.find(p.exit_block);
    if (!exit || exit->instructions.empty() || exit->instructions.back().op != Opcode::Return)
      diag("exit block", p.name, "exit block must end in return");

    std::vector<bool> seen(cfg.size(), false);
    for (std::size_t i : cfg.reverse_postorder()) seen[i] = true;
    for (std::size_t i = 0; i < cfg.size(); ++i)
      if (!seen[i]) diag("unreachable block", p.name + "." + p.blocks[i].id, "block unreachable from entry");
  }
  return out;
}

std::size_t code_size(const Block& block) { return block.instructions.size(); }

std::size_t code_size(const Procedure& proc) {
  std::size_t n = 0;
  for (const auto& b : proc.blocks) n += code_size(b);
  return n;
}

std::size_t code_size(const Program& program) {
  std::size_t n = 0;
  for (const auto& p : program.procedures) n += code_size(p);
  return n;
}

const Instruction* call_of(const Block& block) {
  for (const auto& inst : block.instructions)
    if (inst.op == Opcode::Call) return &inst;
  return nullptr;
}

bool is_call_block(const Block& block) { return call_of(block) != nullptr; }

bool natural_less(std::string_view a, std::string_view b) {
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    bool da = digit(a[i]), db = digit(b[j]);
    if (da && db) {
      std::size_t si = i, sj = j;
      while (i < a.size() && digit(a[i])) ++i;
      while (j < b.size() && digit(b[j])) ++j;
      std::string_view na = a.substr(si, i - si), nb = b.substr(sj, j - sj);
      while (na.size() > 1 && na[0] == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb[0] == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
    } else if (da != db) {
      return da;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

std::vector<std::string> uses_of(const Instruction& inst) {
  std::vector<std::string> regs;
  for (const auto& o : inst.operands)
    if (!o.is_literal) regs.push_back(o.reg);
  return regs;
}

CfgIndex::CfgIndex(const Procedure& proc) {
  ids_.reserve(proc.blocks.size());
  for (std::size_t i = 0; i < proc.blocks.size(); ++i) ids_.emplace_back(proc.blocks[i].id, i);
  std::sort(ids_.begin(), ids_.end());
  succs_.resize(proc.blocks.size());
  preds_.resize(proc.blocks.size());
  for (std::size_t i = 0; i < proc.blocks.size(); ++i) {
    for (const auto& s : proc.blocks[i].successors) {
      if (!contains(s)) continue;
      std::size_t j = index_of(s);
      succs_[i].push_back(j);
      preds_[j].push_back(i);
    }
  }
  entry_ = contains(proc.entry_block) ? index_of(proc.entry_block) : 0;
}

bool CfgIndex::contains(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id,
                             [](const auto& e, std::string_view v) { return e.first < v; });
  return it != ids_.end() && it->first == id;
}

std::size_t CfgIndex::index_of(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id,
                             [](const auto& e, std::string_view v) { return e.first < v; });
  if (it == ids_.end() || it->first != id) throw std::out_of_range("unknown block '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::size_t> CfgIndex::reverse_postorder() const {
  std::vector<std::size_t> post;
  if (succs_.empty()) return post;
  std::vector<bool> seen(succs_.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{entry_, 0}};
  seen[entry_] = true;
  while (!stack.empty()) {
    auto& [node, child] = stack.back();
    if (child < succs_[node].size()) {
      std::size_t next = succs_[node][child++];
      if (!seen[next]) {
        seen[next] = true;
        stack.emplace_back(next, 0);
      }
    } else {
      post.push_back(node);
      stack.pop_back();
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

}  // namespace regionc
