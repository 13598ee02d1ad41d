#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mata/alloc.hpp"
#include "mata/core.hpp"
#include "mata/io.hpp"

namespace mata::fixtures {

// Worker-allocated column of the published allocation table.
inline const std::map<std::string, std::string> kTable2Allocated{
    {"a_1", "w_2"}, {"a_2", "w_4"},  {"a_3", "w_1"},  {"a_4", "w_3"},  {"a_5", "w_4"},
    {"a_6", "w_2"}, {"a_7", "w_1"},  {"a_8", "w_1"},  {"a_9", "w_2"},  {"a_10", "w_3"},
    {"a_11", "w_4"}, {"a_12", "w_1"}, {"a_13", "w_3"}, {"a_14", "w_2"},
};

inline std::string table2_path() { return std::string(MATA_DATA_DIR) + "/table2_job.json"; }

inline JobSpec load_table2() {
  auto parsed = io::load_jobspec(table2_path());
  if (!parsed.ok()) throw std::runtime_error("cannot load " + table2_path());
  return *parsed.job;
}

/// Reference optimum by enumerating every injective worker choice for the
/// actions (L <= N) or action choice for the workers (N < L). Independent of
/// the library solvers; returns +inf when nothing is feasible.
inline double enumerate_optimum(const alloc::AllocationProblem& p) {
  const std::size_t n = p.num_workers(), m = p.num_actions();
  double best = std::numeric_limits<double>::infinity();
  if (m <= n) {
    // Choose an ordered m-subset of workers: permute worker indices, take the prefix.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    do {
      double total = 0.0;
      bool ok = true;
      for (std::size_t a = 0; a < m && ok; ++a) {
        ok = p.is_capable(perm[a], a);
        if (ok) total += p.effective_cost(perm[a], a);
      }
      if (ok) best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<std::size_t> perm(m);
    for (std::size_t j = 0; j < m; ++j) perm[j] = j;
    do {
      double total = 0.0;
      bool ok = true;
      for (std::size_t w = 0; w < n && ok; ++w) {
        ok = p.is_capable(w, perm[w]);
        if (ok) total += p.effective_cost(w, perm[w]);
      }
      if (ok) best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return best;
}

/// Problem for a stage of the published job with every worker idle.
inline alloc::AllocationProblem idle_stage_problem(const JobSpec& job, const std::vector<ActionId>& pending,
                                                   alloc::AvailabilityMode mode = alloc::AvailabilityMode::None) {
  std::map<WorkerId, alloc::WorkerState> states;
  for (const auto& w : job.workers) states[w.id] = {};
  return alloc::build_problem(pending, job, states, mode, 0.0);
}

/// Worker/action ids of an assignment, for readable expectations.
inline std::vector<std::pair<std::string, std::string>> named(const alloc::AllocationProblem& p,
                                                              const alloc::Assignment& a) {
  return a.named(p);
}

}  // namespace mata::fixtures
