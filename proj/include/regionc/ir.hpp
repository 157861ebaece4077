#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace regionc {

/// Execution frequency of a block. Weights start as integer profile counts;
/// inlining and tail duplication apportion them exactly, so the type is an
/// arbitrary-precision rational rather than a rounded integer.
using Weight = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

enum class Opcode {
  Const,
  Add,
  Sub,
  Mul,
  Div,
  Lt,
  Eq,
  Branch,
  Jump,
  Call,
  Return,
  Print,
  Move,
};

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);
bool is_terminator(Opcode op);
/// add/sub/mul/div/lt/eq
bool is_binary(Opcode op);

struct Operand {
  bool is_literal = false;
  std::int64_t value = 0;
  std::string reg;

  static Operand literal(std::int64_t v) { return Operand{true, v, {}}; }
  static Operand reg_ref(std::string name) { return Operand{false, 0, std::move(name)}; }

  bool operator==(const Operand&) const = default;
};

/// Branch and jump targets live in Block::successors, not in the instruction.
struct Instruction {
  Opcode op = Opcode::Const;
  std::string dest;  // empty for branch/jump/return/print
  std::vector<Operand> operands;
  std::string callee;  // call only

  bool operator==(const Instruction&) const = default;
};

struct Block {
  std::string id;
  std::vector<Instruction> instructions;
  std::vector<std::string> successors;
  Weight weight = 0;
  std::string origin;  // procedure the block came from, fixed before inlining

  bool operator==(const Block&) const = default;
};

struct Procedure {
  std::string name;
  std::vector<std::string> params;
  std::vector<Block> blocks;
  std::string entry_block;
  std::string exit_block;

  const Block* find(std::string_view id) const;
  Block* find(std::string_view id);
  const Block& at(std::string_view id) const;
  Block& at(std::string_view id);

  bool operator==(const Procedure&) const = default;
};

struct Program {
  std::vector<Procedure> procedures;
  std::set<std::string> externals;
  std::string entry;

  const Procedure* find(std::string_view name) const;
  Procedure* find(std::string_view name);
  const Procedure& at(std::string_view name) const;
  Procedure& at(std::string_view name);

  bool operator==(const Program&) const = default;
};

/// A block named by its owning procedure; serialized as "proc.block".
struct BlockRef {
  std::string procedure;
  std::string block;

  std::string str() const { return procedure + "." + block; }
  auto operator<=>(const BlockRef&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses the line-oriented IR text. Throws ParseError on syntax errors,
/// name-resolution errors, and structural invariant violations.
Program parse_program(std::string_view text);
std::string unparse(const Program& program);

struct Diagnostic {
  std::string invariant;  // e.g. "successor arity", "multiple entries"
  std::string location;   // "proc" or "proc.block"
  std::string message;
};

std::vector<Diagnostic> validate(const Program& program);

std::size_t code_size(const Block& block);
std::size_t code_size(const Procedure& proc);
std::size_t code_size(const Program& program);

/// The call instruction of a call block, or nullptr.
const Instruction* call_of(const Block& block);
bool is_call_block(const Block& block);

/// Orders identifiers with embedded numbers numerically ("9" < "10" < "10_1").
bool natural_less(std::string_view a, std::string_view b);
struct NaturalLess {
  bool operator()(std::string_view a, std::string_view b) const { return natural_less(a, b); }
};

/// Registers read and written by an instruction.
std::vector<std::string> uses_of(const Instruction& inst);

std::string weight_to_string(const Weight& w);
double weight_to_double(const Weight& w);

/// Dense index over one procedure's CFG. Invalidated by any structural edit.
class CfgIndex {
 public:
  explicit CfgIndex(const Procedure& proc);

  std::size_t size() const { return succs_.size(); }
  bool contains(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  const std::vector<std::size_t>& succs(std::size_t i) const { return succs_[i]; }
  const std::vector<std::size_t>& preds(std::size_t i) const { return preds_[i]; }
  /// Reverse postorder from the entry block; unreachable blocks omitted.
  std::vector<std::size_t> reverse_postorder() const;
  std::size_t entry() const { return entry_; }

 private:
  std::vector<std::pair<std::string, std::size_t>> ids_;  // sorted by id
  std::vector<std::vector<std::size_t>> succs_;
  std::vector<std::vector<std::size_t>> preds_;
  std::size_t entry_ = 0;
};

}  // namespace regionc
