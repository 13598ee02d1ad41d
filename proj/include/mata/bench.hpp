#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mata/alloc.hpp"
#include "mata/core.hpp"

namespace mata::bench {

enum class Axis { Series, Parallel, Workers };

std::string_view to_string(Axis axis);
/// Throws std::invalid_argument for anything but series, parallel, workers.
Axis parse_axis(std::string_view text);

/// Stage widths of the fixed plan used by the worker axis (100 actions).
inline constexpr std::array<std::size_t, 11> kWorkerAxisStages{12, 8, 10, 12, 8, 10, 12, 8, 10, 5, 5};

/// Seed used when MATA_SEED is unset.
inline constexpr std::uint64_t kDefaultSeed = 20200901;

/// MATA_SEED when set to an unsigned integer, kDefaultSeed otherwise.
std::uint64_t seed_from_env();

/// Job for one benchmark point. All workers can do every action; costs are
/// uniform in [1, 100] and double as durations.
///   Series    `size` single-action stages in sequence, `workers` workers
///   Parallel  one stage of `size` actions, `workers` workers
///   Workers   the kWorkerAxisStages plan with `size` workers
JobSpec make_bench_job(Axis axis, std::size_t size, std::size_t workers, std::uint64_t seed);

/// Planning cost of one simulated run.
struct RunStats {
  double planning_seconds = 0.0;     // tree construction + every allocator solve
  double first_solve_seconds = 0.0;  // the first allocator solve alone
  std::size_t solves = 0;            // allocation rounds
  std::vector<std::size_t> rounds_per_stage;
  std::vector<std::size_t> round_widths;  // pairs produced by each round
};

RunStats measure_run(const JobSpec& job);

struct BenchPoint {
  std::size_t size = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
  std::size_t solves = 0;
};

struct BenchResult {
  Axis axis = Axis::Series;
  std::size_t reps = 0;
  std::vector<BenchPoint> points;
};

struct BenchOptions {
  std::size_t min_size = 1;
  std::size_t max_size = 100;
  std::size_t reps = 10;
  std::size_t workers = 4;
  std::uint64_t seed = kDefaultSeed;
};

/// One point per size in [min_size, max_size]; each mean and population
/// standard deviation is over exactly `reps` runs of the same job.
BenchResult run_bench(Axis axis, const BenchOptions& options);
BenchPoint run_point(Axis axis, std::size_t size, const BenchOptions& options);

/// `size,mean_seconds,std_seconds`
std::string to_csv(const BenchResult& result);

// Oracle harness ----------------------------------------------------------

/// Random instance with 1..max_size workers and actions: costs uniform in
/// [1, 100], random capability masks that always admit min(L, N) pairs and
/// give every action a capable worker, random availability penalties in a
/// random mode. Every tenth seed produces an all-ties instance.
alloc::AllocationProblem random_instance(std::uint64_t seed, std::size_t max_size);

struct NamedSolver {
  std::string name;
  std::function<alloc::Assignment(const alloc::AllocationProblem&)> solve;
};

/// Branch and bound, and the assignment fast path.
std::vector<NamedSolver> default_candidates();

struct OracleMismatch {
  std::uint64_t seed = 0;
  std::string solver;
  std::string detail;
  alloc::AllocationProblem problem;
};

struct OracleReport {
  std::size_t instances = 0;
  std::size_t matches = 0;
  std::vector<OracleMismatch> mismatches;
  bool passed() const { return mismatches.empty(); }
};

/// Compares every candidate with solve_bruteforce on `seeds` random
/// instances (seeds base_seed .. base_seed + seeds - 1): equal objectives,
/// identical pairs, and a feasible assignment. An instance matches when every
/// candidate agrees.
OracleReport check_oracle(std::size_t seeds, std::size_t max_size, std::uint64_t base_seed,
                          const std::vector<NamedSolver>& candidates = default_candidates());

}  // namespace mata::bench
