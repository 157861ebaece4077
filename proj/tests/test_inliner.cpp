#include <gtest/gtest.h>

#include "support.hpp"

using namespace regionc;
using regionc::testing::load_fixture;

namespace {

std::size_t returns_in(const Procedure& p) {
  std::size_t n = 0;
  for (const auto& b : p.blocks)
    for (const auto& i : b.instructions) n += i.op == Opcode::Return;
  return n;
}

bool writes_param(const Procedure& p) {
  for (const auto& b : p.blocks)
    for (const auto& i : b.instructions)
      for (const auto& param : p.params)
        if (i.dest == param) return true;
  return false;
}

Program profiled(std::uint64_t seed, const GenShape& s) {
  Program raw = generate_program(seed, s);
  return annotate_profile(raw, interpret(raw, generated_input(seed)));
}

}  // namespace

TEST(InlineAt, Fig2Shape) {
  Program p = load_fixture("fig2.ir");
  Program q = inline_at(p, Callsite{"F", "4", "G", 100});
  EXPECT_TRUE(validate(q).empty());
  const Procedure& f = q.at("F");
  EXPECT_EQ(f.find("4"), nullptr);
  for (const char* id : {"1", "2", "3", "5", "6", "7", "8", "9", "10", "11"}) ASSERT_NE(f.find(id), nullptr) << id;
  EXPECT_EQ(f.at("2").successors, std::vector<std::string>{"8"});
  EXPECT_EQ(f.at("3").successors, std::vector<std::string>{"8"});
  EXPECT_EQ(f.at("11").successors, std::vector<std::string>{"5"});
  for (const char* id : {"8", "9", "10", "11"}) EXPECT_EQ(f.at(id).origin, "G");
  for (const char* id : {"1", "2", "3", "5", "6", "7"}) EXPECT_EQ(f.at(id).origin, "F");
  // Single caller: weights carry over unchanged.
  for (const char* id : {"8", "9", "10", "11"}) EXPECT_EQ(f.at(id).weight, p.at("G").at(id).weight);
  EXPECT_EQ(code_size(q.at("F")), code_size(p.at("F")) + code_size(p.at("G")) - 1);
  for (std::int64_t n : {0, 1, 3, 7, 20}) EXPECT_EQ(interpret(q, {n}).outputs, interpret(p, {n}).outputs);
}

TEST(InlineAt, SingleBlockCallee) {
  Program p = parse_program(
      "entry main\nproc main() {\n  block 1:\n    x = call z()\n    jump 2\n  block 2:\n    print x\n    return x\n}\n"
      "proc z() {\n  block 1:\n    return 0\n}\n");
  Program q = inline_at(p, Callsite{"main", "1", "z", 0});
  EXPECT_EQ(code_size(q.at("main")), code_size(p.at("main")) + code_size(p.at("z")) - 1);
  EXPECT_EQ(interpret(q, {}).outputs, std::vector<std::int64_t>{0});
}

TEST(InlineAt, Errors) {
  Program p = parse_program(
      "entry main\nextern ext\nproc main() {\n  block 1:\n    x = call ext(1)\n    jump 2\n  block 2:\n"
      "    y = call two(1)\n    jump 3\n  block 3:\n    return y\n}\n"
      "proc two(a, b) {\n  block 1:\n    return a\n}\n");
  EXPECT_THROW(inline_at(p, Callsite{"main", "1", "ext", 0}), std::invalid_argument);
  EXPECT_THROW(inline_at(p, Callsite{"main", "2", "two", 0}), std::invalid_argument);
  auto facts = call_graph_facts(p);
  EXPECT_EQ(inline_eligibility(p, Callsite{"main", "2", "two", 0}, combo_config("H1").second, {10, 10}, facts).reason,
            Reason::ParamMismatch);
  EXPECT_EQ(inline_eligibility(p, Callsite{"main", "1", "ext", 0}, combo_config("H1").second, {10, 10}, facts).reason,
            Reason::External);
}

TEST(InlineAt, RandomSitesPreserveSemantics) {
  std::size_t checked = 0;
  for (std::uint64_t i = 0; checked < 200 && i < 400; ++i) {
    GenShape s;
    s.procs = 2 + i % 5;
    s.recursive = i % 4 == 0;
    Program p = profiled(6000 + i, s);
    auto sites = callsites(p);
    if (sites.empty()) continue;
    const Callsite& site = sites[i % sites.size()];
    Program q = inline_at(p, site);
    const Procedure& callee = p.at(site.callee);
    ASSERT_TRUE(validate(q).empty()) << i;
    auto in = generated_input(6000 + i);
    EXPECT_EQ(interpret(q, in).outputs, interpret(p, in).outputs) << i;

    // Origins survive; new blocks carry the callee's origins.
    std::map<std::string, std::string> before;
    for (const auto& b : p.at(site.caller).blocks) before[b.id] = b.origin;
    Weight copied = 0, callee_total = 0;
    for (const auto& b : callee.blocks) callee_total += b.weight;
    std::set<std::string> callee_origins;
    for (const auto& b : callee.blocks) callee_origins.insert(b.origin);
    for (const auto& b : q.at(site.caller).blocks) {
      if (before.count(b.id) && b.id != site.block) {
        EXPECT_EQ(b.origin, before[b.id]);
      } else {
        EXPECT_TRUE(callee_origins.count(b.origin)) << b.id;
        copied += b.weight;
      }
    }
    std::size_t pre = writes_param(callee) ? 1 : 0;
    if (!pre) EXPECT_LE(copied, callee_total) << i;

    if (returns_in(callee) == 1 && !writes_param(callee))
      EXPECT_EQ(code_size(q), code_size(p) + code_size(callee) - 1) << i;
    ++checked;
  }
  EXPECT_EQ(checked, 200u);
}

TEST(Aggressive, NoCallsUnchanged) {
  GenShape s;
  s.procs = 1;
  Program p = profiled(11, s);
  auto r = aggressive_inline(p, Weight(1, 5));
  EXPECT_EQ(r.program, p);
  EXPECT_TRUE(r.inlined.empty());
}

TEST(Aggressive, Fig2InlinesG) {
  Program p = load_fixture("fig2.ir");
  auto r = aggressive_inline(p, Weight(1, 5));
  ASSERT_EQ(r.inlined.size(), 1u);
  EXPECT_EQ(r.inlined[0].caller, "F");
  EXPECT_EQ(r.inlined[0].callee, "G");
  EXPECT_EQ(r.program.at("F"), inline_at(p, Callsite{"F", "4", "G", 100}).at("F"));
}

TEST(Aggressive, GrowthBound) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    GenShape s;
    s.procs = 2 + i % 7;
    s.max_blocks = 6 + i % 10;
    s.recursive = i % 5 == 0;
    Program p = profiled(7000 + i, s);
    auto r = aggressive_inline(p, Weight(1, 5));
    std::size_t largest = 0;
    for (const auto& rec : r.inlined) largest = std::max(largest, rec.callee_size);
    EXPECT_LE(Weight(code_size(r.program)), Weight(code_size(p)) * Weight(6, 5) + largest) << i;
    // Every inline but the last started under the limit.
    EXPECT_TRUE(validate(r.program).empty());
    auto in = generated_input(7000 + i);
    EXPECT_EQ(interpret(r.program, in).outputs, interpret(p, in).outputs);
  }
}
