#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "support.hpp"

using regionc::testing::fixture_path;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(REGIONC_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path tmp(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("regionc_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, CompileJson) {
  auto r = run("compile " + fixture_path("fig2.ir") + " --heuristic H1");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["strategy"], "H1");
  EXPECT_EQ(j["inlined_sites"], 1);
  EXPECT_EQ(j["original_size"], 25);
}

TEST(Cli, CompileFormats) {
  auto t = run("compile " + fixture_path("fig2.ir") + " --heuristic H0 --format table");
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("unit_count"), std::string::npos);
  auto c = run("compile " + fixture_path("fig2.ir") + " --heuristic H0 --format csv");
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find(','), std::string::npos);
}

TEST(Cli, EmitArtifacts) {
  auto regions = tmp("regions.json"), trace = tmp("trace.json"), prog = tmp("out.ir");
  auto r = run("compile " + fixture_path("fig6.ir") + " --heuristic H3 --emit-regions " + regions.string() +
               " --emit-trace " + trace.string() + " --emit-program " + prog.string());
  ASSERT_EQ(r.code, 0);
  auto regs = json::parse(slurp(regions));
  ASSERT_TRUE(regs.is_array());
  ASSERT_FALSE(regs.empty());
  for (const auto& reg : regs) {
    for (const char* k : {"id", "kind", "seed", "blocks", "size"}) EXPECT_TRUE(reg.contains(k)) << k;
  }
  auto events = json::parse(slurp(trace));
  ASSERT_TRUE(events.is_array());
  long last = -1;
  for (const auto& e : events) {
    EXPECT_GT(e["seq"].get<long>(), last);
    last = e["seq"].get<long>();
  }
  auto p = regionc::parse_program(slurp(prog));
  EXPECT_TRUE(regionc::validate(p).empty());
  std::filesystem::remove_all(regions.parent_path());
}

TEST(Cli, ProfileRoundTrip) {
  auto r = run("profile " + fixture_path("fig2.ir") + " --input 3");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["blocks"]["G.8"], 1);
  EXPECT_EQ(j["blocks"]["F.3"], 0);
  EXPECT_EQ(j["dynamic_calls"], 1);
  auto prof = regionc::interpret(regionc::testing::load_fixture("fig2.ir"), {3});
  EXPECT_EQ(j["dynamic_instructions"].get<std::uint64_t>(), prof.dynamic_instructions);
}

TEST(Cli, Compare) {
  auto r = run("compare " + fixture_path("context.ir") + " --heuristics H0,H3 --format csv --input 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("metric,H0,H3,H3-H0", 0), 0u);
}

TEST(Cli, GenParsesBack) {
  auto r = run("gen --seed 17 --procs 4");
  ASSERT_EQ(r.code, 0);
  auto p = regionc::parse_program(r.out);
  EXPECT_EQ(p.procedures.size(), 4u);
  EXPECT_EQ(run("gen --seed 17 --procs 4").out, r.out);
}

TEST(Cli, Check) {
  auto r = run("check --seed 5 --count 10");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0 violations"), std::string::npos);
}

TEST(Cli, Diagnostics) {
  EXPECT_EQ(run("compile /nonexistent/file.ir").code, 1);
  auto bad = tmp("bad.ir");
  std::ofstream(bad) << "proc main( {\n";
  EXPECT_EQ(run("compile " + bad.string()).code, 1);
  EXPECT_EQ(run("compile " + fixture_path("fig2.ir") + " --heuristic H9").code, 1);
  EXPECT_EQ(run("compile " + fixture_path("fig2.ir") + " --set nonsense=1").code, 1);
  std::filesystem::remove_all(bad.parent_path());
}
