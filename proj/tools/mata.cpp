#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mata/alloc.hpp"
#include "mata/bench.hpp"
#include "mata/io.hpp"
#include "mata/sim.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

int cmd_run(const std::string& file, const std::string& availability, const std::string& out_dir) {
  mata::alloc::AvailabilityMode mode;
  try {
    mode = mata::alloc::parse_availability_mode(availability);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  const auto parsed = mata::io::load_jobspec(file);
  if (!parsed.ok()) {
    for (const auto& err : parsed.errors) std::cerr << file << ": " << err << "\n";
    return kExitInvalid;
  }

  mata::sim::SimConfig config;
  config.mode = mode;
  const mata::SimTrace trace = mata::sim::run_simulation(*parsed.job, config);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path dir(out_dir);
  if (!write_file(dir / "gantt.csv", mata::io::emit_gantt_csv(trace)) ||
      !write_file(dir / "alloc_table.csv", mata::io::emit_alloc_table(*parsed.job, trace)) ||
      !write_file(dir / "trace.log", mata::io::emit_trace_log(trace))) {
    std::cerr << "error: cannot write results to " << out_dir << "\n";
    return kExitInvalid;
  }
  for (const auto& comm : trace.comms) std::cout << comm.log_line() << "\n";
  for (const auto& d : trace.diagnostics) std::cerr << "diagnostic: " << d << "\n";
  std::cout << "result " << mata::to_string(trace.result) << " makespan " << mata::format_number(trace.makespan)
            << "\n";
  return trace.succeeded() ? 0 : kExitFailure;
}

int cmd_bench(const std::string& axis_name, const mata::bench::BenchOptions& options) {
  const auto axis = mata::bench::parse_axis(axis_name);
  std::cout << mata::bench::to_csv(mata::bench::run_bench(axis, options));
  return 0;
}

int cmd_check_oracle(std::size_t seeds, std::size_t max_size, const std::string& replay_dir) {
  const auto report = mata::bench::check_oracle(seeds, max_size, mata::bench::seed_from_env());
  std::cout << "oracle: " << report.matches << "/" << report.instances << " instances match\n";
  if (report.passed()) return 0;
  std::error_code ec;
  fs::create_directories(replay_dir, ec);
  for (const auto& m : report.mismatches) {
    const fs::path replay = fs::path(replay_dir) / ("oracle_mismatch_seed_" + std::to_string(m.seed) + ".json");
    write_file(replay, mata::io::serialize_problem(m.problem));
    std::cout << "mismatch seed " << m.seed << " [" << m.solver << "]: " << m.detail << " -> " << replay.string()
              << "\n";
  }
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior-tree task allocation for mixed human-robot teams"};
  app.require_subcommand(1);

  std::string file, availability = "remaining", out_dir = ".";
  auto* run = app.add_subcommand("run", "Simulate a job file and write gantt.csv, alloc_table.csv, trace.log");
  run->add_option("file", file, "Job file (JSON)")->required();
  run->add_option("--availability", availability, "none|binary|remaining")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string axis;
  mata::bench::BenchOptions bench_options;
  auto* bench = app.add_subcommand("bench", "Planning time scaling benchmark (CSV on stdout)");
  bench->add_option("axis", axis, "series|parallel|workers")
      ->required()
      ->check(CLI::IsMember({"series", "parallel", "workers"}));
  bench->add_option("--max", bench_options.max_size, "Largest size")->capture_default_str();
  bench->add_option("--reps", bench_options.reps, "Repetitions per size")->capture_default_str();
  bench->add_option("--workers", bench_options.workers, "Team size for series/parallel")->capture_default_str();

  std::size_t seeds = 200, max_size = 7;
  std::string replay_dir = ".";
  auto* oracle = app.add_subcommand("check-oracle", "Compare the exact solvers with brute force on random instances");
  oracle->add_option("--seeds", seeds, "Number of instances")->capture_default_str();
  oracle->add_option("--max-size", max_size, "Largest worker/action count (<= 8)")->capture_default_str();
  oracle->add_option("--replay-dir", replay_dir, "Where mismatching instances are written")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(file, availability, out_dir);
    bench_options.seed = mata::bench::seed_from_env();
    if (*bench) return cmd_bench(axis, bench_options);
    if (*oracle) {
      if (max_size == 0 || max_size > 8) {
        std::cerr << "error: --max-size must be within 1..8\n";
        return kExitInvalid;
      }
      return cmd_check_oracle(seeds, max_size, replay_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInvalid;
}
