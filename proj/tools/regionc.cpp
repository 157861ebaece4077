#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regionc/pipeline.hpp"

using namespace regionc;
using nlohmann::json;

namespace {

struct Diagnostics : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Diagnostics("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Diagnostics("cannot write " + path);
  out << text;
}

std::vector<std::int64_t> parse_input(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<std::int64_t> out;
  std::string word;
  while (is >> word) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(word, &used));
      if (used != word.size()) throw std::invalid_argument(word);
    } catch (const std::exception&) {
      throw Diagnostics("bad input value '" + word + "'");
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

json profile_json(const ExecutionProfile& p) {
  json blocks = json::object();
  for (const auto& [ref, n] : p.block_counts) blocks[ref.str()] = n;
  return {{"blocks", blocks}, {"dynamic_instructions", p.dynamic_instructions}, {"dynamic_calls", p.dynamic_calls}};
}

json regions_json(const Program& program, const RegionSet& set) {
  json out = json::array();
  for (const auto& r : set.regions) {
    json blocks = json::array();
    for (const auto& b : r.blocks) blocks.push_back(b.str());
    out.push_back({{"id", r.id},
                   {"kind", region_kind_name(r.kind)},
                   {"seed", r.seed.str()},
                   {"blocks", blocks},
                   {"size", code_size(program, r)}});
  }
  return out;
}

json trace_json(const FormationTrace& t) {
  json out = json::array();
  for (const auto& e : t.events) {
    json j{{"seq", e.seq}, {"kind", trace_kind_name(e.kind)}};
    switch (e.kind) {
      case TraceKind::EnterProcedure:
        j["procedure"] = e.procedure;
        j["size"] = e.size;
        break;
      case TraceKind::LeaveProcedure:
        j["procedure"] = e.procedure;
        j["size"] = e.size;
        j["pass_through"] = e.pass_through;
        j["returned_size"] = e.returned_size;
        j["absorbed"] = e.absorbed;
        break;
      case TraceKind::RegionCompleted:
        j["procedure"] = e.procedure;
        j["region"] = e.region;
        j["region_kind"] = region_kind_name(e.region_kind);
        j["size"] = e.size;
        j["released"] = e.released;
        break;
      case TraceKind::InlinePerformed:
      case TraceKind::InlineRefused:
        j["caller"] = e.caller;
        j["block"] = e.block;
        j["callee"] = e.callee;
        if (e.kind == TraceKind::InlineRefused) j["reason"] = reason_name(e.reason);
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

json report_json(const MetricsReport& m) {
  return {{"strategy", m.strategy},
          {"memory_avg", m.memory_avg},
          {"memory_worst", m.memory_worst},
          {"memory_phased", m.memory_phased},
          {"peak_live_size", m.peak_live_size},
          {"original_size", m.original_size},
          {"final_size", m.final_size},
          {"inlined_size", m.inlined_size},
          {"code_growth_pct", m.code_growth_pct},
          {"unit_count", m.unit_count},
          {"unit_avg_size", m.unit_avg_size},
          {"profile_variance", m.profile_variance},
          {"pct_invariant_units", m.pct_invariant_units},
          {"pct_interprocedural_ops", m.pct_interprocedural_ops},
          {"interprocedural_regions", m.interprocedural_regions},
          {"inlined_sites", m.inlined_sites},
          {"dynamic_cost", m.dynamic_cost},
          {"original_dynamic_cost", m.original_dynamic_cost}};
}

json comparison_json(const Comparison& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.metrics.size(); ++i) {
    json row{{"metric", c.metrics[i]}};
    for (std::size_t k = 0; k < c.combos.size(); ++k) row[c.combos[k]] = c.values[i][k];
    for (std::size_t k = 0; k < c.delta_labels.size(); ++k) row[c.delta_labels[k]] = c.deltas[i][k];
    rows.push_back(std::move(row));
  }
  return rows;
}

struct CompileFlags {
  std::string input;
  std::vector<std::string> sets;
  std::string growth_limit;
  std::uint64_t call_overhead = kDefaultCallOverhead;
  std::uint64_t fuel = kDefaultFuel;
  bool reprofile = false;
  bool no_optimize = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--input", input, "Entry arguments, e.g. \"1 2 3\"");
    cmd->add_option("--set", sets, "Override a threshold, key=value");
    cmd->add_option("--growth-limit", growth_limit, "Code growth limit (default 0.20)");
    cmd->add_option("--call-overhead", call_overhead, "Cost units per dynamic call");
    cmd->add_option("--fuel", fuel, "Interpreter instruction budget");
    cmd->add_flag("--reprofile", reprofile, "Profile even when the program carries weights");
    cmd->add_flag("--no-optimize", no_optimize, "Skip region optimization");
  }

  CompileOptions options(const std::string& heuristic) const {
    CompileOptions o;
    try {
      o.combo = combo_config(heuristic);
      if (!growth_limit.empty()) apply_override(o.combo, "growth_limit=" + growth_limit);
      for (const auto& s : sets) apply_override(o.combo, s);
    } catch (const std::invalid_argument& e) {
      throw Diagnostics(e.what());
    }
    o.input = parse_input(input);
    o.call_overhead = call_overhead;
    o.fuel = fuel;
    o.reprofile = reprofile;
    o.optimize = !no_optimize;
    return o;
  }
};

Program load(const std::string& path) {
  std::string text = read_file(path);
  try {
    return parse_program(text);
  } catch (const ParseError& e) {
    throw Diagnostics(path + ":" + e.what());
  }
}

CompilationResult run_compile(const Program& p, const CompileOptions& o) {
  try {
    return compile(p, o);
  } catch (const RuntimeError& e) {
    throw Diagnostics(std::string("runtime error: ") + e.what());
  }
}

GenShape shape_from(std::size_t procs, std::size_t max_blocks, double density, double loops, bool recursive) {
  if (procs == 0 || max_blocks == 0) throw Diagnostics("shape bounds must be positive");
  GenShape s;
  s.procs = procs;
  s.max_blocks = max_blocks;
  s.call_density = density;
  s.loop_prob = loops;
  s.recursive = recursive;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-based compilation laboratory"};
  app.require_subcommand(1);

  CompileFlags cflags;
  std::string file, heuristic = "H0", format = "json", regions_path, trace_path, program_path;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a program under one heuristic combination");
  compile_cmd->add_option("file", file)->required();
  compile_cmd->add_option("--heuristic", heuristic, "H0..H6");
  compile_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "table", "csv"}));
  compile_cmd->add_option("--emit-regions", regions_path, "Write the region set as JSON");
  compile_cmd->add_option("--emit-trace", trace_path, "Write the formation trace as JSON");
  compile_cmd->add_option("--emit-program", program_path, "Write the compiled program");
  cflags.add(compile_cmd);

  std::string profile_input, profile_out;
  std::uint64_t profile_fuel = kDefaultFuel;
  bool annotate = false;
  auto* profile_cmd = app.add_subcommand("profile", "Interpret a program and print its block profile");
  profile_cmd->add_option("file", file)->required();
  profile_cmd->add_option("--input", profile_input);
  profile_cmd->add_option("--fuel", profile_fuel);
  profile_cmd->add_flag("--annotate", annotate, "Print the program with profile weights instead");

  std::string heuristics = "H0,H1,H4";
  auto* compare_cmd = app.add_subcommand("compare", "Compare heuristic combinations on one program");
  compare_cmd->add_option("file", file)->required();
  compare_cmd->add_option("--heuristics", heuristics);
  compare_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "table", "csv"}));
  CompileFlags compare_flags;
  compare_flags.add(compare_cmd);

  std::uint64_t seed = 1;
  std::size_t procs = 4, max_blocks = 12, count = 100, batch = 0;
  double density = 0.3, loops = 0.3;
  bool recursive = false;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random program");
  gen_cmd->add_option("--seed", seed);
  gen_cmd->add_option("--procs", procs);
  gen_cmd->add_option("--max-blocks", max_blocks);
  gen_cmd->add_option("--call-density", density);
  gen_cmd->add_option("--loop-prob", loops);
  gen_cmd->add_flag("--recursive", recursive);

  auto* check_cmd = app.add_subcommand("check", "Run the property checks on a generated corpus");
  check_cmd->add_option("--seed", seed);
  check_cmd->add_option("--count", count);
  check_cmd->add_option("--batch", batch, "Alias for --count");
  check_cmd->add_option("--procs", procs);
  check_cmd->add_option("--max-blocks", max_blocks);
  check_cmd->add_option("--call-density", density);
  check_cmd->add_option("--loop-prob", loops);
  check_cmd->add_flag("--recursive", recursive);
  check_cmd->add_option("--heuristics", heuristics)->default_val("H0,H1,H2,H3,H4,H5,H6");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*compile_cmd) {
      Program p = load(file);
      CompilationResult r = run_compile(p, cflags.options(heuristic));
      if (!regions_path.empty()) write_file(regions_path, regions_json(r.program_out, r.regions).dump(2) + "\n");
      if (!trace_path.empty()) {
        if (!r.trace) throw Diagnostics(heuristic + " produces no formation trace");
        write_file(trace_path, trace_json(*r.trace).dump(2) + "\n");
      }
      if (!program_path.empty()) write_file(program_path, unparse(r.program_out));
      if (format == "json") {
        std::cout << report_json(r.report).dump(2) << "\n";
      } else {
        Comparison c = compare({r});
        std::cout << (format == "table" ? format_table(c) : format_csv(c));
      }
    } else if (*profile_cmd) {
      Program p = load(file);
      InterpretOptions io;
      io.fuel = profile_fuel;
      ExecutionProfile prof;
      try {
        prof = interpret(p, parse_input(profile_input), io);
      } catch (const RuntimeError& e) {
        throw Diagnostics(std::string("runtime error: ") + e.what());
      }
      if (annotate) std::cout << unparse(annotate_profile(p, prof));
      else std::cout << profile_json(prof).dump(2) << "\n";
    } else if (*compare_cmd) {
      Program p = load(file);
      std::vector<CompilationResult> results;
      for (const auto& h : split(heuristics, ',')) results.push_back(run_compile(p, compare_flags.options(h)));
      Comparison c = compare(results);
      if (format == "json") std::cout << comparison_json(c).dump(2) << "\n";
      else std::cout << (format == "table" ? format_table(c) : format_csv(c));
    } else if (*gen_cmd) {
      std::cout << unparse(generate_program(seed, shape_from(procs, max_blocks, density, loops, recursive)));
    } else if (*check_cmd) {
      if (batch) count = batch;
      GenShape shape = shape_from(procs, max_blocks, density, loops, recursive);
      std::vector<std::string> combos = split(heuristics, ',');
      auto one = [&](std::uint64_t s) {
        std::vector<std::string> out;
        Program p = generate_program(s, shape);
        for (const auto& h : combos) {
          CompileOptions o;
          o.combo = combo_config(h);
          o.input = generated_input(s);
          for (auto& v : check_result(compile(p, o))) out.push_back("seed " + std::to_string(s) + " " + h + ": " + v);
        }
        return out;
      };
      std::vector<std::future<std::vector<std::string>>> jobs;
      for (std::size_t i = 0; i < count; ++i) jobs.push_back(std::async(std::launch::async, one, seed + i));
      std::size_t failures = 0;
      for (auto& j : jobs)
        for (const auto& v : j.get()) {
          std::cout << v << "\n";
          ++failures;
        }
      std::cout << count << " programs, " << failures << " violations\n";
      return failures ? 1 : 0;
    }
  } catch (const Diagnostics& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
