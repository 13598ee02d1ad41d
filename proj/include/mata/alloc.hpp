#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mata/core.hpp"

namespace mata::alloc {

enum class AvailabilityMode { None, Binary, RemainingTime };

std::string_view to_string(AvailabilityMode mode);
/// Accepts "none", "binary", "remaining". Throws std::invalid_argument otherwise.
AvailabilityMode parse_availability_mode(std::string_view text);

/// Strictness margin of the binary availability weight: alpha = (1 + margin) * max cost.
inline constexpr double kBinaryAlphaMargin = 0.01;

/// Live state of one worker as seen by the allocator.
struct WorkerState {
  bool busy = false;
  ActionId action;               // action being executed while busy
  double start = 0.0;            // simulated start time of that action
  double nominal_duration = 0.0; // its nominal duration for this worker
};

class AllocationError : public std::runtime_error {
 public:
  AllocationError(const std::string& what, std::vector<ActionId> unallocatable)
      : std::runtime_error(what), unallocatable_(std::move(unallocatable)) {}
  const std::vector<ActionId>& unallocatable() const { return unallocatable_; }

 private:
  std::vector<ActionId> unallocatable_;
};

/// Availability penalty of a worker at simulated time `now`.
///
///   None           0
///   Binary         0 when available, alpha otherwise
///   RemainingTime  0 when available, alpha * (T - t) / T otherwise,
///                  t = elapsed time of the running action, T its nominal duration
///
/// Throws std::domain_error when the elapsed time is negative.
double availability_cost(const WorkerState& state, AvailabilityMode mode, double alpha, double now);

/// Availability weight from a list of subproblem costs: their maximum for
/// RemainingTime, (1 + kBinaryAlphaMargin) times it for Binary, zero for None
/// or an empty list.
double compute_alpha(std::span<const double> subproblem_costs, AvailabilityMode mode);
/// RemainingTime uses the worker's own costs over the pending actions; Binary
/// uses every capable pair of the subproblem so that any busy worker costs
/// more than any available one.
double compute_alpha(const JobSpec& job, const WorkerId& worker, std::span<const ActionId> pending,
                     AvailabilityMode mode);

/// One MILP instance: choose exactly `target` (worker, action) pairs, one per
/// worker and per action at most, capable pairs only, minimizing
/// sum(base_cost + availability) of the chosen pairs.
///
/// Matrices are row-major by worker: index = worker * actions.size() + action.
struct AllocationProblem {
  std::vector<ActionId> actions;
  std::vector<WorkerId> workers;
  std::vector<double> base_cost;
  std::vector<double> availability;  // one per worker
  std::vector<char> capable;
  std::size_t target = 0;
  // Per-worker budget: sum over chosen pairs of budget_usage <= budget_limit.
  // Empty when the budget constraint is inactive.
  std::vector<double> budget_usage;
  std::vector<double> budget_limit;

  std::size_t num_workers() const { return workers.size(); }
  std::size_t num_actions() const { return actions.size(); }
  std::size_t index(std::size_t worker, std::size_t action) const {
    return worker * actions.size() + action;
  }
  bool is_capable(std::size_t worker, std::size_t action) const {
    return capable[index(worker, action)] != 0;
  }
  double effective_cost(std::size_t worker, std::size_t action) const {
    return base_cost[index(worker, action)] + availability[worker];
  }
  bool has_budgets() const { return !budget_limit.empty(); }
  bool within_budget(std::size_t worker, std::size_t action) const;

  /// Builds an instance with the cardinality target min(L, N) and no budgets.
  static AllocationProblem make(std::vector<WorkerId> workers, std::vector<ActionId> actions,
                                std::vector<double> base_cost, std::vector<char> capable,
                                std::vector<double> availability = {});
};

struct Assignment {
  // (worker index, action index), sorted ascending.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double objective = 0.0;

  /// The same pairs as (worker id, action id).
  std::vector<std::pair<WorkerId, ActionId>> named(const AllocationProblem& problem) const;
};

/// Assembles the instance for the pending actions of one allocation round.
/// `states` must hold an entry for every worker of `job`. Throws
/// AllocationError naming every pending action no worker can execute.
AllocationProblem build_problem(std::span<const ActionId> pending, const JobSpec& job,
                                const std::map<WorkerId, WorkerState>& states,
                                AvailabilityMode mode, double now);

/// Exact optimum with deterministic tie-breaking: among optima within a
/// relative 1e-9 of each other the lexicographically smallest sorted pair
/// list wins. Uses the assignment fast path when budgets are inactive,
/// branch and bound otherwise. Throws AllocationError when infeasible.
Assignment solve(const AllocationProblem& problem);

/// Depth-first branch and bound over the binary variables, workers in index
/// order, with an admissible bound (cheapest remaining option per worker).
Assignment solve_branch_and_bound(const AllocationProblem& problem);

/// Rectangular Hungarian method for the optimal value, then lexicographic
/// fixing, one decision per worker, each checked by re-solving. Budgets must
/// be inactive (std::invalid_argument otherwise).
Assignment solve_hungarian(const AllocationProblem& problem);

/// Exhaustive enumeration of every feasible selection. Refuses instances with
/// more than 8 workers or actions (std::invalid_argument).
Assignment solve_bruteforce(const AllocationProblem& problem);

/// Every constraint of the model the assignment breaks; empty when feasible.
/// Also checks that `objective` matches the pairs.
std::vector<std::string> check_assignment(const AllocationProblem& problem, const Assignment& assignment);

/// True when two objectives agree within the solver tolerance.
bool same_objective(double a, double b);

}  // namespace mata::alloc
