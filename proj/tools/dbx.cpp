// SPDX-License-Identifier: MIT
// dbx: compile, run, differential testing and benchmarks.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dbx/bench.hpp"
#include "dbx/difftest.hpp"
#include "dbx/pipeline.hpp"

namespace fs = std::filesystem;
using namespace dbx;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUser = 2, kDifftest = 3 };

struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write " + path.string());
  out << text;
}

pipeline::Stage stage_arg(const std::string& name) {
  pipeline::Stage s;
  if (!pipeline::parse_stage(name, s)) throw UserError("unknown stage " + name);
  return s;
}

int compile_cmd(const std::string& sql_path, const std::string& emit, bool optimize,
                const std::string& out_path) {
  pipeline::Stage stage = stage_arg(emit);
  pipeline::Options opts;
  opts.optimize = optimize;
  auto a = pipeline::compile(read_file(sql_path), opts);
  std::string text = pipeline::emit(a, stage);
  if (stage == pipeline::Stage::Js) {
    fs::path js = out_path.empty() ? fs::path(sql_path).replace_extension(".js") : fs::path(out_path);
    fs::path sidecar = js;
    sidecar.replace_extension(".schema.json");
    write_file(js, text);
    write_file(sidecar, print_ejson(js::schema_sidecar(a.front.schema)) + "\n");
    std::cerr << "wrote " << js.string() << " and " << sidecar.string() << "\n";
  } else if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

int run_cmd(const std::string& sql_path, const std::string& db_path, const std::string& stage,
            bool optimize) {
  pipeline::Stage s = stage_arg(stage);
  if (s == pipeline::Stage::Js)
    throw UserError("the js stage runs under Node; use compile --emit js and the runner");
  pipeline::Options opts;
  opts.optimize = optimize;
  auto a = pipeline::compile(read_file(sql_path), opts);
  Instance db = load_instance(a.front.schema, read_file(db_path));
  std::cout << result_to_json(pipeline::eval_at(a, pipeline::point_of(s), db)) << "\n";
  return kOk;
}

int difftest_cmd(std::uint64_t seed, int cases, int threads, const std::string& report) {
  difftest::Options o;
  o.seed = seed;
  o.cases = cases;
  o.threads = threads;
  auto r = difftest::run(o);
  write_file(report, r.to_json() + "\n");
  std::printf("difftest seed=%llu cases=%d passed=%d rejected=%d failed=%d env_checks=%d %.2fs\n",
              static_cast<unsigned long long>(r.seed), r.cases, r.passed, r.rejected, r.failed,
              r.env_checks, r.seconds);
  for (auto& f : r.failures)
    std::printf("  case %d: %s %s\n    %s\n", f.index, f.check.c_str(), f.pair.c_str(),
                f.min_sql.empty() ? f.sql.c_str() : f.min_sql.c_str());
  std::printf("report: %s\n", report.c_str());
  return r.failed ? kDifftest : kOk;
}

int bench_cmd(const std::string& dir) {
  auto outcomes = bench::run_all(bench::load_dir(dir));
  std::cout << bench::format_table(outcomes);
  for (auto& o : outcomes)
    if (!o.valid) return kDifftest;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dbx: SQL to JavaScript query compiler"};
  app.require_subcommand(1);
  std::string stages;
  for (auto& n : pipeline::stage_names()) stages += (stages.empty() ? "" : "|") + n;

  std::string sql_path, out_path, emit = "js", db_path, stage = "imp";
  bool optimize = false;
  auto* compile = app.add_subcommand("compile", "Compile a query file up to a stage");
  compile->add_option("sql", sql_path, "DDL prelude plus one query")->required();
  compile->add_option("--emit", emit, stages);
  compile->add_flag("-O", optimize, "Optimize the NRAe term");
  compile->add_option("-o", out_path, "Output path");

  auto* run = app.add_subcommand("run", "Evaluate a query over a JSON instance");
  run->add_option("sql", sql_path)->required();
  run->add_option("--db", db_path, "Instance: table name to array of flat objects")->required();
  run->add_option("--stage", stage, stages);
  run->add_flag("-O", optimize, "Optimize the NRAe term");

  std::uint64_t seed = 42;
  int cases = 1000, threads = 0;
  std::string report = "difftest-report.json";
  auto* diff = app.add_subcommand("difftest", "Differential test on generated queries");
  diff->add_option("--seed", seed);
  diff->add_option("--cases", cases)->check(CLI::NonNegativeNumber);
  diff->add_option("--threads", threads, "0 uses every core")->check(CLI::NonNegativeNumber);
  diff->add_option("--report", report, "JSON report path");

  std::string bench_dir = "bench";
  auto* bench = app.add_subcommand("bench", "Run the benchmark corpus at every stage");
  bench->add_option("dir", bench_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUser;
  }

  try {
    if (*compile) return compile_cmd(sql_path, emit, optimize, out_path);
    if (*run) return run_cmd(sql_path, db_path, stage, optimize);
    if (*diff) return difftest_cmd(seed, cases, threads, report);
    return bench_cmd(bench_dir);
  } catch (const sql::SqlError& e) {
    std::cerr << sql_path << ":" << e.what() << "\n";
    return kUser;
  } catch (const alg::WellFormedError& e) {
    std::cerr << sql_path << ": " << e.what() << "\n";
    return kUser;
  } catch (const InstanceError& e) {
    std::cerr << db_path << ": " << e.what() << "\n";
    return kUser;
  } catch (const EvalError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kUser;
  } catch (const UserError& e) {
    std::cerr << e.what() << "\n";
    return kUser;
  } catch (const bench::BenchError& e) {
    std::cerr << e.what() << "\n";
    return kUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
