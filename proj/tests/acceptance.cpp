// One line per acceptance criterion; exits nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

#include "support.hpp"

using namespace regionc;
using namespace regionc::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 5) failures.push_back(why);
  }
};

const std::vector<std::string> kAllCombos = {"H0", "H1", "H2", "H3", "H4", "H5", "H6"};

// Every combo on every corpus program, compiled once and shared by 4 through 8.
struct CorpusRun {
  std::uint64_t seed;
  Program program;
  std::map<std::string, CompilationResult> results;
};

std::vector<CorpusRun>& corpus_runs() {
  static std::vector<CorpusRun> runs = [] {
    std::vector<CorpusRun> out;
    for (const auto& e : corpus(1000)) {
      CorpusRun run{e.seed, generate_program(e.seed, e.shape), {}};
      for (const auto& c : kAllCombos) run.results.emplace(c, compile_with(run.program, c, {}, generated_input(e.seed)));
      out.push_back(std::move(run));
    }
    return out;
  }();
  return runs;
}

std::string where(const CorpusRun& run, const std::string& combo) {
  return "seed " + std::to_string(run.seed) + " " + combo;
}

Outcome fig2() {
  Outcome o;
  auto t = Clock::now();
  Program p = load_fixture("fig2.ir");
  CompilationResult r = compile_with(p, "H1");
  Partition want = {{"1", "2", "3", "5", "7", "8", "10", "11"}, {"6"}, {"9"}};
  Partition got = original_partition(r, p);
  if (got != want) o.fail("partition differs");
  bool seeded = false;
  for (const auto& reg : r.regions.regions)
    for (const auto& b : reg.blocks)
      if (b.block == "8") seeded = reg.seed.block == "8";
  if (!seeded) o.fail("region holding block 8 is not seeded there");
  double s = seconds_since(t);
  if (s >= 1) o.fail("took " + std::to_string(s) + " s");
  o.detail = std::to_string(got.size()) + " regions, seed 8";
  return o;
}

Outcome fig6() {
  Outcome o;
  Program p = load_fixture("fig6.ir");
  CompilationResult r = compile_with(p, "H1", {"strategy=demand"});
  Partition want = {{"1", "2", "3", "5", "7", "8", "10", "11"}, {"6"}, {"9"}};
  if (original_partition(r, p) != want) o.fail("partition differs");
  bool g_pass_through = false;
  for (const auto& e : r.trace->events)
    if (e.kind == TraceKind::LeaveProcedure && e.procedure == "G") g_pass_through = e.pass_through;
  if (!g_pass_through) o.fail("G is not pass-through at F's callsite");
  // G's blocks sit inside F's main region beside F's own blocks.
  for (const auto& reg : r.regions.regions) {
    std::set<std::string> origins;
    for (const auto& b : reg.blocks) origins.insert(r.program_out.at(b.procedure).at(b.block).origin);
    bool has_1 = std::any_of(reg.blocks.begin(), reg.blocks.end(), [](const BlockRef& b) { return b.block == "1"; });
    if (has_1 && origins != std::set<std::string>{"F", "G"}) o.fail("F's region does not absorb G");
  }
  if (r.program_out.at("F").find("4")) o.fail("call block 4 survived the splice");
  o.detail = "G pass-through merged into F";
  return o;
}

Outcome fig3() {
  Outcome o;
  Program p = load_fixture("fig3.ir");
  CompilationResult r = compile_with(p, "H3", {"growth_limit=1"});
  std::map<std::string, int> pass;  // 1 pass-through, 0 not
  for (const auto& e : r.trace->events)
    if (e.kind == TraceKind::LeaveProcedure) pass[e.procedure] = e.pass_through ? 1 : 0;
  if (!pass.count("B") || pass["B"] != 1) o.fail("B is not pass-through at A's callsite");
  if (!pass.count("C") || pass["C"] != 0) o.fail("C's entry region is pass-through");
  for (const auto& reg : r.regions.regions) {
    bool c1 = false, c6 = false;
    for (const auto& b : reg.blocks) {
      c1 |= b.block == "c1";
      c6 |= b.block == "c6";
    }
    if (c1 && c6) o.fail("C's entry and exit share a region");
  }
  o.detail = "B pass-through, C entry region non-pass-through";
  return o;
}

Outcome memory_dominance() {
  Outcome o;
  double ratio_sum = 0;
  std::size_t n = 0;
  for (const auto& run : corpus_runs())
    for (const auto& c : {"H2", "H3", "H4", "H5", "H6"}) {
      const CompilationResult& r = run.results.at(c);
      ChainMemory chain = memory_requirement_demand(r.program_in);
      if (chain.worst > r.memory_phased) o.fail(where(run, c) + ": chain worst above phased");
      if (r.report.peak_live_size > r.memory_phased) o.fail(where(run, c) + ": peak live size above phased");
      ratio_sum += static_cast<double>(r.report.peak_live_size) / static_cast<double>(r.memory_phased);
      ++n;
    }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu compilations, mean peak/phased %.3f", n, ratio_sum / static_cast<double>(n));
  o.detail = buf;
  return o;
}

Outcome growth_cap() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& run : corpus_runs())
    for (const auto& c : {"H1", "H2", "H3", "H4", "H5", "H6"}) {
      const CompilationResult& r = run.results.at(c);
      std::size_t largest = 0;
      for (const auto& rec : r.inlines) {
        largest = std::max(largest, rec.callee_size);
        if (std::string(c) == "H2" && rec.callee_size > 25) o.fail(where(run, c) + ": callee above 25");
      }
      Weight cap = Weight(r.report.original_size) * Weight(6, 5) + Weight(largest);
      if (Weight(r.report.final_size) > cap)
        o.fail(where(run, c) + ": final size " + std::to_string(r.report.final_size) + " over cap");
      ++n;
    }
  o.detail = std::to_string(n) + " compilations";
  return o;
}

Outcome partition() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& run : corpus_runs())
    for (const auto& [c, r] : run.results) {
      for (const auto& v : partition_violations(r.program_out, r.regions)) o.fail(where(run, c) + ": " + v);
      for (const auto& v : side_entry_violations(r.program_out, r.regions)) o.fail(where(run, c) + ": " + v);
      ++n;
    }
  o.detail = std::to_string(n) + " compilations";
  return o;
}

Outcome semantics() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& run : corpus_runs())
    for (const auto& [c, r] : run.results) {
      if (r.profile_out.outputs != r.profile_in.outputs) o.fail(where(run, c) + ": outputs differ");
      for (const auto& d : validate(r.program_out)) o.fail(where(run, c) + ": " + d.invariant);
      ++n;
    }
  const std::vector<std::pair<std::string, std::vector<std::int64_t>>> fixtures = {
      {"fig2.ir", {1}}, {"fig3.ir", {7}}, {"fig6.ir", {1}}, {"hot_call.ir", {2}}, {"context.ir", {3}}};
  for (const auto& [f, input] : fixtures) {
    Program p = load_fixture(f);
    for (const auto& c : kAllCombos) {
      CompilationResult r = compile_with(p, c, {}, input);
      if (r.profile_out.outputs != r.profile_in.outputs) o.fail(f + " " + c + ": outputs differ");
      ++n;
    }
  }
  o.detail = std::to_string(n) + " compilations";
  return o;
}

Outcome recursion_gate() {
  Outcome o;
  std::size_t refused = 0, cyclic_programs = 0;
  for (const auto& run : corpus_runs()) {
    std::set<std::string> cyclic = recursive_procedures(run.program);
    cyclic_programs += cyclic.empty() ? 0 : 1;
    for (const auto& c : {"H3", "H4", "H5", "H6"}) {
      for (const auto& e : run.results.at(c).trace->events) {
        if (e.kind == TraceKind::InlinePerformed && cyclic.count(e.callee))
          o.fail(where(run, c) + ": inlined recursive " + e.callee);
        if (e.kind == TraceKind::InlineRefused && e.reason == Reason::RecursiveBlocked) ++refused;
      }
    }
  }
  if (cyclic_programs == 0) o.fail("corpus holds no recursive programs");
  o.detail = std::to_string(cyclic_programs) + " recursive programs, " + std::to_string(refused) + " refusals";
  return o;
}

Outcome loop_weight() {
  Outcome o;
  Program p = parse_program(R"(
proc none(a) {
  block 1:
    return a
}
proc one(a) {
  block 1:
    i = const 3
    jump 2
  block 2:
    c = lt 0 i
    branch c 3 5
  block 3:
    x = call none(a)
    jump 4
  block 4:
    i = sub i 1
    jump 2
  block 5:
    return a
}
proc two(a) {
  block 1:
    i = const 3
    jump 2
  block 2:
    c = lt 0 i
    branch c 3 9
  block 3:
    x = call none(a)
    jump 4
  block 4:
    j = const 2
    jump 5
  block 5:
    d = lt 0 j
    branch d 6 8
  block 6:
    y = call none(a)
    jump 7
  block 7:
    j = sub j 1
    jump 5
  block 8:
    i = sub i 1
    jump 2
  block 9:
    return a
}
)");
  auto lcw = [&](const std::string& n) { return loop_call_weight(p.at(n), loop_depths(p.at(n))); };
  if (lcw("none") != 0) o.fail("no callsites: " + std::to_string(lcw("none")));
  if (lcw("one") != 10) o.fail("one depth-1 callsite: " + std::to_string(lcw("one")));
  if (lcw("two") != 30) o.fail("depths {1,2}: " + std::to_string(lcw("two")));
  o.detail = "0 / 10 / 30";
  return o;
}

struct Decisions {
  std::vector<std::string> inline_events;
  Partition partition;
  std::vector<double> variance;
  bool operator==(const Decisions&) const = default;
};

Decisions decisions_of(const CompilationResult& r) {
  Decisions d;
  if (r.trace)
    for (const auto& e : r.trace->events)
      if (e.kind == TraceKind::InlinePerformed || e.kind == TraceKind::InlineRefused)
        d.inline_events.push_back(std::string(trace_kind_name(e.kind)) + " " + e.caller + "." + e.block + " " +
                                  e.callee + " " + std::string(reason_name(e.reason)));
  for (const auto& rec : r.inlines) d.inline_events.push_back("record " + rec.caller + "." + rec.call_block);
  d.partition = full_partition(r.regions);
  for (const auto& reg : r.regions.regions) d.variance.push_back(profile_variance(r.program_out, reg).variance);
  return d;
}

Outcome scale_invariance() {
  Outcome o;
  const std::vector<FirstOrder> orders = {FirstOrder::ProfileTimeDesc, FirstOrder::CallsitesDescSizeAsc,
                                          FirstOrder::LoopCallWeightDescSizeAsc};
  std::size_t n = 0;
  for (const auto& e : corpus(100, 50'000)) {
    Program raw = generate_program(e.seed, e.shape);
    std::vector<std::int64_t> input = generated_input(e.seed);
    Program base = annotate_profile(raw, interpret(raw, input));
    Program scaled = scale_weights(base, 7);
    for (auto f : orders)
      if (order_procedures(base, f) != order_procedures(scaled, f))
        o.fail("seed " + std::to_string(e.seed) + ": ordering " + std::string(first_order_name(f)) + " changed");
    for (const auto& c : kAllCombos) {
      if (decisions_of(compile_with(base, c, {}, input)) != decisions_of(compile_with(scaled, c, {}, input)))
        o.fail("seed " + std::to_string(e.seed) + " " + c + ": decisions changed");
      ++n;
    }
  }
  o.detail = std::to_string(n) + " compilation pairs";
  return o;
}

Outcome call_free_equivalence() {
  Outcome o;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GenShape s;
    s.procs = 1;
    s.call_density = 0;
    s.max_blocks = 4 + i % 30;
    s.loop_prob = 0.2 + 0.1 * static_cast<double>(i % 5);
    Program p = generate_program(90'000 + i, s);
    std::vector<std::int64_t> input = generated_input(90'000 + i);
    CompilationResult phased = compile_with(p, "H1", {}, input);
    CompilationResult demand = compile_with(p, "H1", {"strategy=demand"}, input);
    if (full_partition(phased.regions) != full_partition(demand.regions))
      o.fail("seed " + std::to_string(90'000 + i) + ": partitions differ");
  }
  o.detail = "500 programs";
  return o;
}

Outcome dynamic_cost_proxy() {
  Outcome o;
  auto t = Clock::now();
  Program p = load_fixture("hot_call.ir");
  CompilationResult h0 = compile_with(p, "H0", {}, {2});
  if (h0.profile_out.dynamic_calls < 10'000) o.fail("fewer than 10^4 dynamic calls");
  std::string detail;
  for (const auto& c : {"H1", "H4"}) {
    CompilationResult r = compile_with(p, c, {}, {2});
    std::uint64_t removed = h0.profile_out.dynamic_calls - r.profile_out.dynamic_calls;
    double need = static_cast<double>(kDefaultCallOverhead * removed) * 0.9;
    double saved = static_cast<double>(h0.report.dynamic_cost) - static_cast<double>(r.report.dynamic_cost);
    if (removed == 0 || saved < need)
      o.fail(std::string(c) + ": saved " + std::to_string(saved) + " of " + std::to_string(need));
    detail += std::string(c) + " saves " + std::to_string(static_cast<long long>(saved)) + " ";
  }
  double s = seconds_since(t);
  if (s >= 10) o.fail("took " + std::to_string(s) + " s");
  o.detail = detail;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 fig2 partition", fig2},
      {"2 fig6 demand partition", fig6},
      {"3 fig3 classification", fig3},
      {"4 memory dominance", memory_dominance},
      {"5 growth cap", growth_cap},
      {"6 partition and single entry", partition},
      {"7 semantics preservation", semantics},
      {"8 recursion gate", recursion_gate},
      {"9 loop call weight", loop_weight},
      {"10 scale invariance", scale_invariance},
      {"11 call-free equivalence", call_free_equivalence},
      {"12 dynamic cost proxy", dynamic_cost_proxy},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << name << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    for (const auto& f : o.failures) std::cout << "    " << f << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
