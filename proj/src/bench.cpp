#include "mata/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>

#include "mata/sim.hpp"

namespace mata::bench {

namespace {

std::string action_name(std::size_t i) { return "a_" + std::to_string(i + 1); }
std::string worker_name(std::size_t i) { return "w_" + std::to_string(i + 1); }

JobSpec make_job(const std::vector<std::size_t>& stage_widths, std::size_t workers, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(1.0, 100.0);

  JobSpec job;
  std::vector<PlanNode> stages;
  std::size_t next = 0;
  for (std::size_t width : stage_widths) {
    std::vector<ActionId> ids;
    for (std::size_t k = 0; k < width; ++k, ++next) {
      ids.push_back(action_name(next));
      job.actions.push_back(ActionSpec{ids.back(), "move", {}});
    }
    stages.push_back(PlanNode::allocate(std::move(ids)));
  }
  job.plan = stages.size() == 1 ? std::move(stages.front()) : PlanNode::sequence(std::move(stages));

  for (std::size_t i = 0; i < workers; ++i) {
    Worker w;
    w.id = worker_name(i);
    w.kind = i % 2 == 0 ? WorkerKind::Robot : WorkerKind::Human;
    for (const auto& a : job.actions) {
      const double c = std::round(cost(rng) * 100.0) / 100.0;
      w.capabilities.insert(a.id);
      w.durations[a.id] = c;
      job.costs[{w.id, a.id}] = c;
    }
    job.workers.push_back(std::move(w));
  }
  return job;
}

// Accepts and drops every message.
class NullSink : public MessageSink {
 public:
  bool deliver(const CommEvent&) override { return true; }
};

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::Series: return "series";
    case Axis::Parallel: return "parallel";
    case Axis::Workers: return "workers";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  if (text == "series") return Axis::Series;
  if (text == "parallel") return Axis::Parallel;
  if (text == "workers") return Axis::Workers;
  throw std::invalid_argument("unknown bench axis '" + std::string(text) + "'");
}

std::uint64_t seed_from_env() {
  const char* raw = std::getenv("MATA_SEED");
  if (!raw || !*raw) return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (*end != '\0') return kDefaultSeed;
  return value;
}

JobSpec make_bench_job(Axis axis, std::size_t size, std::size_t workers, std::uint64_t seed) {
  if (size == 0) throw std::invalid_argument("bench size must be positive");
  switch (axis) {
    case Axis::Series:
      return make_job(std::vector<std::size_t>(size, 1), workers, seed);
    case Axis::Parallel:
      return make_job({size}, workers, seed);
    case Axis::Workers:
      return make_job({kWorkerAxisStages.begin(), kWorkerAxisStages.end()}, size, seed);
  }
  throw std::invalid_argument("unknown bench axis");
}

RunStats measure_run(const JobSpec& job) {
  NullSink sink;
  sim::SimConfig config;
  config.sink = &sink;
  const SimTrace trace = sim::run_simulation(job, config);
  if (!trace.succeeded()) throw std::runtime_error("bench job failed to complete");

  RunStats stats;
  stats.planning_seconds = trace.planning_seconds();
  stats.solves = trace.allocations.size();
  if (!trace.allocations.empty()) stats.first_solve_seconds = trace.allocations.front().solve_seconds;

  std::map<std::string, std::size_t> per_allocator;
  for (const auto& record : trace.allocations) {
    ++per_allocator[record.allocator];
    stats.round_widths.push_back(record.pairs.size());
  }
  // Allocator names carry their plan order index: RoleAllocator#<k>.
  stats.rounds_per_stage.assign(allocate_stages(job.plan).size(), 0);
  for (const auto& [name, count] : per_allocator) {
    const std::size_t index = std::stoul(name.substr(name.find('#') + 1));
    stats.rounds_per_stage.at(index) = count;
  }
  return stats;
}

BenchPoint run_point(Axis axis, std::size_t size, const BenchOptions& options) {
  if (options.reps == 0) throw std::invalid_argument("bench needs at least one repetition");
  const JobSpec job = make_bench_job(axis, size, options.workers, options.seed + size);
  std::vector<double> samples;
  BenchPoint point;
  point.size = size;
  for (std::size_t r = 0; r < options.reps; ++r) {
    const RunStats stats = measure_run(job);
    samples.push_back(stats.planning_seconds);
    point.solves = stats.solves;
  }
  point.mean_seconds = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - point.mean_seconds) * (s - point.mean_seconds);
  point.std_seconds = std::sqrt(var / static_cast<double>(samples.size()));
  return point;
}

BenchResult run_bench(Axis axis, const BenchOptions& options) {
  BenchResult result;
  result.axis = axis;
  result.reps = options.reps;
  for (std::size_t size = options.min_size; size <= options.max_size; ++size) {
    result.points.push_back(run_point(axis, size, options));
  }
  return result;
}

std::string to_csv(const BenchResult& result) {
  std::string out = "size,mean_seconds,std_seconds\n";
  for (const auto& p : result.points) {
    out += std::to_string(p.size) + "," + format_number(p.mean_seconds) + "," + format_number(p.std_seconds) + "\n";
  }
  return out;
}

alloc::AllocationProblem random_instance(std::uint64_t seed, std::size_t max_size) {
  if (max_size == 0) throw std::invalid_argument("max_size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, max_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> cost(1.0, 100.0);

  const std::size_t n = dim(rng), m = dim(rng);
  std::vector<WorkerId> workers;
  std::vector<ActionId> actions;
  for (std::size_t i = 0; i < n; ++i) workers.push_back(worker_name(i));
  for (std::size_t j = 0; j < m; ++j) actions.push_back(action_name(j));

  const bool all_ties = seed % 10 == 0;
  std::vector<double> base(n * m, 0.0);
  std::vector<char> capable(n * m, 0);
  const double tie_cost = std::floor(cost(rng));
  const double density = 0.3 + 0.6 * unit(rng);
  for (std::size_t k = 0; k < n * m; ++k) {
    base[k] = all_ties ? tie_cost : cost(rng);
    capable[k] = all_ties || unit(rng) < density;
  }
  // A random matching of size min(L, N) keeps the cardinality target reachable.
  std::vector<std::size_t> wperm(n), aperm(m);
  std::iota(wperm.begin(), wperm.end(), 0);
  std::iota(aperm.begin(), aperm.end(), 0);
  std::shuffle(wperm.begin(), wperm.end(), rng);
  std::shuffle(aperm.begin(), aperm.end(), rng);
  for (std::size_t k = 0; k < std::min(n, m); ++k) capable[wperm[k] * m + aperm[k]] = 1;
  for (std::size_t j = 0; j < m; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any = any || capable[i * m + j];
    if (!any) capable[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng) * m + j] = 1;
  }

  std::vector<double> availability(n, 0.0);
  if (!all_ties) {
    const auto mode = static_cast<alloc::AvailabilityMode>(std::uniform_int_distribution<int>(0, 2)(rng));
    for (std::size_t i = 0; i < n; ++i) {
      alloc::WorkerState state;
      state.busy = unit(rng) < 0.5;
      state.action = "busy";
      state.nominal_duration = cost(rng);
      state.start = 0.0;
      const double now = unit(rng) * state.nominal_duration;
      std::vector<double> own;
      for (std::size_t k = 0; k < n * m; ++k) {
        const bool counted = mode == alloc::AvailabilityMode::Binary || k / m == i;
        if (counted && capable[k]) own.push_back(base[k]);
      }
      availability[i] = alloc::availability_cost(state, mode, alloc::compute_alpha(own, mode), now);
    }
  }
  return alloc::AllocationProblem::make(std::move(workers), std::move(actions), std::move(base), std::move(capable),
                                        std::move(availability));
}

std::vector<NamedSolver> default_candidates() {
  return {{"branch_and_bound", alloc::solve_branch_and_bound}, {"hungarian", alloc::solve_hungarian}};
}

OracleReport check_oracle(std::size_t seeds, std::size_t max_size, std::uint64_t base_seed,
                          const std::vector<NamedSolver>& candidates) {
  OracleReport report;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t seed = base_seed + s;
    const alloc::AllocationProblem problem = random_instance(seed, max_size);
    const alloc::Assignment expected = alloc::solve_bruteforce(problem);
    ++report.instances;
    bool all_agree = true;
    for (const auto& candidate : candidates) {
      std::string detail;
      try {
        const alloc::Assignment got = candidate.solve(problem);
        auto violations = alloc::check_assignment(problem, got);
        if (!violations.empty()) {
          detail = "infeasible assignment: " + violations.front();
        } else if (!alloc::same_objective(got.objective, expected.objective)) {
          detail = "objective " + format_number(got.objective) + " != brute force " + format_number(expected.objective);
        } else if (got.pairs != expected.pairs) {
          detail = "tie-break differs from brute force";
        }
      } catch (const std::exception& e) {
        detail = std::string("solver threw: ") + e.what();
      }
      if (!detail.empty()) {
        all_agree = false;
        report.mismatches.push_back(OracleMismatch{seed, candidate.name, detail, problem});
      }
    }
    if (all_agree) ++report.matches;
  }
  return report;
}

}  // namespace mata::bench
