#include <random>
#include <sstream>

#include "regionc/pipeline.hpp"

namespace regionc {

namespace {

constexpr int kPool = 4;
constexpr int kRecursionDepth = 3;
constexpr std::uint64_t kGenFuel = 200'000;

struct GenBlock {
  std::string id;
  std::vector<std::string> lines;
};

class ProcBuilder {
 public:
  ProcBuilder(std::mt19937_64& rng, const GenShape& shape, std::size_t index, std::vector<std::size_t> forced)
      : rng_(rng), shape_(shape), index_(index), forced_(std::move(forced)) {}

  std::string build() {
    std::string name = proc_name(index_);
    bool main = index_ == 0;
    std::vector<std::string> params;
    if (main) params = {"n"};
    else if (shape_.recursive) params = {"d", "a"};
    else params = {"a"};

    std::size_t entry = open();
    const std::string& src = params.back();
    for (int r = 0; r < kPool; ++r) {
      if (r == 0) line(entry, "r0 = move " + src);
      else line(entry, reg(r) + " = add " + src + " " + std::to_string(pick(0, 9)));
    }
    std::size_t cur = seq(entry, 0, true);
    line(cur, "print r" + std::to_string(pick(0, kPool - 1)));
    line(cur, "return r0");

    std::ostringstream os;
    os << "proc " << name << "(";
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? ", " : "") << params[i];
    os << ") {\n";
    for (const auto& b : blocks_) {
      os << "  block " << b.id << ":\n";
      for (const auto& l : b.lines) os << "    " << l << "\n";
    }
    os << "}\n";
    return os.str();
  }

  static std::string proc_name(std::size_t i) { return i == 0 ? "main" : "p" + std::to_string(i); }

 private:
  std::size_t open() {
    blocks_.push_back({std::to_string(blocks_.size() + 1), {}});
    return blocks_.size() - 1;
  }
  void line(std::size_t b, std::string l) { blocks_[b].lines.push_back(std::move(l)); }
  std::string id(std::size_t b) const { return blocks_[b].id; }
  static std::string reg(int r) { return "r" + std::to_string(r); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  bool full() const { return blocks_.size() >= shape_.max_blocks; }

  void arith(std::size_t b) {
    static const char* ops[] = {"add", "sub", "mul", "div", "lt", "eq"};
    int n = pick(1, 3);
    for (int i = 0; i < n; ++i) {
      std::string op = ops[pick(0, 5)];
      std::string rhs = op == "div" ? std::to_string(pick(1, 7))
                                    : (chance(0.5) ? reg(pick(0, kPool - 1)) : std::to_string(pick(0, 9)));
      line(b, reg(pick(0, kPool - 1)) + " = " + op + " " + reg(pick(0, kPool - 1)) + " " + rhs);
    }
    if (chance(0.2)) line(b, "print " + reg(pick(0, kPool - 1)));
  }

  std::size_t call(std::size_t cur, std::size_t callee) {
    std::string args = reg(pick(0, kPool - 1));
    if (shape_.recursive) {
      if (index_ == 0) {
        args = "0, " + args;
      } else {
        line(cur, "dn = add d 1");
        args = "dn, " + args;
      }
    }
    std::size_t blk = open();
    line(cur, "jump " + id(blk));
    line(blk, reg(pick(0, kPool - 1)) + " = call " + proc_name(callee) + "(" + args + ")");
    std::size_t next = open();
    line(blk, "jump " + id(next));
    return next;
  }

  // Guarded call for back edges in recursive mode.
  std::size_t guarded_call(std::size_t cur, std::size_t callee) {
    line(cur, "g = lt d " + std::to_string(kRecursionDepth));
    std::size_t pre = open();
    std::size_t after = call(pre, callee);
    line(cur, "branch g " + id(pre) + " " + id(after));
    return after;
  }

  std::size_t statement(std::size_t cur, int loop_depth) {
    double r = std::uniform_real_distribution<double>(0, 1)(rng_);
    std::size_t nprocs = shape_.procs;
    bool can_call = shape_.call_density > 0 && nprocs > 1;
    if (can_call && r < shape_.call_density) {
      if (shape_.recursive && index_ > 0 && chance(0.3)) return guarded_call(cur, pick(1, static_cast<int>(index_)));
      if (index_ + 1 < nprocs) return call(cur, pick(static_cast<int>(index_) + 1, static_cast<int>(nprocs) - 1));
    }
    if (loop_depth < 2 && chance(shape_.loop_prob)) {
      std::string ctr = "l" + std::to_string(loops_++);
      line(cur, ctr + " = const " + std::to_string(pick(1, 5)));
      std::size_t head = open();
      line(cur, "jump " + id(head));
      std::size_t body = open();
      std::size_t exit = open();
      line(head, "c = lt 0 " + ctr);
      line(head, "branch c " + id(body) + " " + id(exit));
      arith(body);
      std::size_t end = seq(body, loop_depth + 1, false);
      line(end, ctr + " = sub " + ctr + " 1");
      line(end, "jump " + id(head));
      return exit;
    }
    if (chance(0.5)) {
      line(cur, "c = lt " + reg(pick(0, kPool - 1)) + " " + std::to_string(pick(0, 9)));
      std::size_t t = open(), f = open();
      line(cur, "branch c " + id(t) + " " + id(f));
      arith(t);
      std::size_t te = chance(0.3) && !full() ? statement(t, loop_depth) : t;
      arith(f);
      std::size_t join = open();
      line(te, "jump " + id(join));
      line(f, "jump " + id(join));
      return join;
    }
    arith(cur);
    std::size_t next = open();
    line(cur, "jump " + id(next));
    return next;
  }

  std::size_t seq(std::size_t cur, int loop_depth, bool top) {
    arith(cur);
    int n = top ? pick(1, 4) : pick(0, 2);
    for (int i = 0; i < n && !full(); ++i) cur = statement(cur, loop_depth);
    if (top)
      for (std::size_t f : forced_) cur = call(cur, f);
    return cur;
  }

  std::mt19937_64& rng_;
  const GenShape& shape_;
  std::size_t index_;
  std::vector<std::size_t> forced_;
  std::vector<GenBlock> blocks_;
  int loops_ = 0;
};

std::string generate_text(std::uint64_t seed, const GenShape& shape) {
  std::mt19937_64 rng(seed);
  std::size_t n = std::max<std::size_t>(1, shape.procs);
  std::vector<std::vector<std::size_t>> forced(n);
  if (!shape.call_free())
    for (std::size_t j = 1; j < n; ++j) forced[std::uniform_int_distribution<std::size_t>(0, j - 1)(rng)].push_back(j);
  GenShape s = shape;
  s.procs = n;
  std::ostringstream os;
  os << "entry main\n";
  for (std::size_t i = 0; i < (shape.call_free() ? 1 : n); ++i) os << ProcBuilder(rng, s, i, forced[i]).build();
  return os.str();
}

}  // namespace

std::vector<std::int64_t> generated_input(std::uint64_t seed) { return {static_cast<std::int64_t>(seed % 23)}; }

Program generate_program(std::uint64_t seed, const GenShape& shape) {
  InterpretOptions io;
  io.fuel = kGenFuel;
  io.max_call_depth = 256;
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    Program p = parse_program(generate_text(seed * 1000003 + attempt, shape));
    try {
      interpret(p, generated_input(seed), io);
      return p;
    } catch (const RuntimeError&) {
    }
  }
  GenShape plain = shape;
  plain.loop_prob = 0;
  plain.recursive = false;
  return parse_program(generate_text(seed, plain));
}

}  // namespace regionc
