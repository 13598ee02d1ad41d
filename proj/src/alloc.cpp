#include "mata/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mata::alloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-9;

double tolerance(double reference) { return kRelTol * std::max(1.0, std::abs(reference)); }

double objective_of(const AllocationProblem& p,
                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double total = 0.0;
  for (auto [w, a] : pairs) total += p.effective_cost(w, a);
  return total;
}

void check_shape(const AllocationProblem& p) {
  const std::size_t cells = p.num_workers() * p.num_actions();
  if (p.base_cost.size() != cells || p.capable.size() != cells ||
      p.availability.size() != p.num_workers()) {
    throw std::invalid_argument("allocation problem matrices do not match its dimensions");
  }
  if (p.has_budgets() &&
      (p.budget_limit.size() != p.num_workers() || p.budget_usage.size() != cells)) {
    throw std::invalid_argument("allocation problem budget matrices do not match its dimensions");
  }
}

// Kuhn's augmenting paths; used only to name the actions behind an infeasible
// cardinality target.
std::vector<ActionId> unmatched_actions(const AllocationProblem& p) {
  const std::size_t n = p.num_workers(), m = p.num_actions();
  std::vector<int> owner(m, -1);
  auto usable = [&](std::size_t w, std::size_t a) { return p.is_capable(w, a) && p.within_budget(w, a); };
  for (std::size_t w = 0; w < n; ++w) {
    std::vector<char> seen(m, 0);
    auto augment = [&](auto&& self, std::size_t worker) -> bool {
      for (std::size_t a = 0; a < m; ++a) {
        if (!usable(worker, a) || seen[a]) continue;
        seen[a] = 1;
        if (owner[a] < 0 || self(self, static_cast<std::size_t>(owner[a]))) {
          owner[a] = static_cast<int>(worker);
          return true;
        }
      }
      return false;
    };
    augment(augment, w);
  }
  std::vector<ActionId> out;
  for (std::size_t a = 0; a < m; ++a) {
    if (owner[a] < 0) out.push_back(p.actions[a]);
  }
  return out;
}

[[noreturn]] void throw_infeasible(const AllocationProblem& p) {
  auto missing = unmatched_actions(p);
  std::string msg = "cannot allocate " + std::to_string(p.target) + " worker-action pairs";
  if (!missing.empty()) {
    msg += "; unallocatable actions:";
    for (const auto& a : missing) msg += " " + a;
  }
  throw AllocationError(msg, std::move(missing));
}

// Minimum-cost assignment of every row to a distinct column (rows <= cols).
// `cost` is row-major, +inf marks forbidden cells. Returns the column of each
// row, or nothing when no complete assignment exists.
std::optional<std::vector<std::size_t>> hungarian(std::size_t rows, std::size_t cols,
                                                  const std::vector<double>& cost) {
  if (rows == 0) return std::vector<std::size_t>{};
  // Potentials-based shortest augmenting path, 1-indexed with a virtual column 0.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, kInf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double c = cost[(i0 - 1) * cols + (j - 1)];
        if (std::isfinite(c)) {
          const double cur = c - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (!std::isfinite(delta)) return std::nullopt;
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Optimal value of assigning `need` pairs among the given workers/actions.
// Only called with need == min(workers, actions) or an impossible need.
std::optional<double> optimal_value(const AllocationProblem& p, const std::vector<std::size_t>& workers,
                                    const std::vector<std::size_t>& actions, std::size_t need) {
  if (need == 0) return 0.0;
  const std::size_t nw = workers.size(), na = actions.size();
  if (need > std::min(nw, na)) return std::nullopt;
  const bool by_worker = nw <= na;
  const std::size_t rows = by_worker ? nw : na, cols = by_worker ? na : nw;
  std::vector<double> cost(rows * cols, kInf);
  for (std::size_t wi = 0; wi < nw; ++wi) {
    for (std::size_t ai = 0; ai < na; ++ai) {
      const std::size_t w = workers[wi], a = actions[ai];
      if (!p.is_capable(w, a)) continue;
      const std::size_t cell = by_worker ? wi * cols + ai : ai * cols + wi;
      cost[cell] = p.effective_cost(w, a);
    }
  }
  auto sol = hungarian(rows, cols, cost);
  if (!sol) return std::nullopt;
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) total += cost[r * cols + (*sol)[r]];
  return total;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const AllocationProblem& p)
      : p_(p), used_(p.num_actions(), 0), best_cost_(kInf) {}

  std::optional<Assignment> run() {
    search(0, 0.0);
    if (!std::isfinite(best_cost_)) return std::nullopt;
    Assignment out;
    out.pairs = best_pairs_;
    out.objective = objective_of(p_, out.pairs);
    return out;
  }

 private:
  bool usable(std::size_t w, std::size_t a) const {
    return !used_[a] && p_.is_capable(w, a) && p_.within_budget(w, a);
  }

  double lower_bound(std::size_t first_worker, std::size_t need) const {
    std::vector<double> cheapest;
    for (std::size_t w = first_worker; w < p_.num_workers(); ++w) {
      double best = kInf;
      for (std::size_t a = 0; a < p_.num_actions(); ++a) {
        if (usable(w, a)) best = std::min(best, p_.effective_cost(w, a));
      }
      if (std::isfinite(best)) cheapest.push_back(best);
    }
    if (cheapest.size() < need) return kInf;
    std::partial_sort(cheapest.begin(), cheapest.begin() + static_cast<std::ptrdiff_t>(need), cheapest.end());
    return std::accumulate(cheapest.begin(), cheapest.begin() + static_cast<std::ptrdiff_t>(need), 0.0);
  }

  void search(std::size_t worker, double cost) {
    if (current_.size() == p_.target) {
      if (!std::isfinite(best_cost_) || cost < best_cost_ - tolerance(best_cost_)) {
        best_cost_ = cost;
        best_pairs_ = current_;
      }
      return;
    }
    if (worker == p_.num_workers()) return;
    const std::size_t need = p_.target - current_.size();
    if (p_.num_workers() - worker < need) return;
    const double bound = cost + lower_bound(worker, need);
    if (!std::isfinite(bound)) return;
    if (std::isfinite(best_cost_) && bound >= best_cost_ - tolerance(best_cost_)) return;

    // Actions in ascending index, then "unassigned": depth-first order is the
    // lexicographic order of the sorted pair lists, so the first optimum found
    // is the tie-break winner.
    for (std::size_t a = 0; a < p_.num_actions(); ++a) {
      if (!usable(worker, a)) continue;
      used_[a] = 1;
      current_.emplace_back(worker, a);
      search(worker + 1, cost + p_.effective_cost(worker, a));
      current_.pop_back();
      used_[a] = 0;
    }
    search(worker + 1, cost);
  }

  const AllocationProblem& p_;
  std::vector<char> used_;
  std::vector<std::pair<std::size_t, std::size_t>> current_;
  std::vector<std::pair<std::size_t, std::size_t>> best_pairs_;
  double best_cost_;
};

bool lex_less(const std::vector<std::pair<std::size_t, std::size_t>>& a,
              const std::vector<std::pair<std::size_t, std::size_t>>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::string_view to_string(AvailabilityMode mode) {
  switch (mode) {
    case AvailabilityMode::None: return "none";
    case AvailabilityMode::Binary: return "binary";
    case AvailabilityMode::RemainingTime: return "remaining";
  }
  return "?";
}

AvailabilityMode parse_availability_mode(std::string_view text) {
  if (text == "none") return AvailabilityMode::None;
  if (text == "binary") return AvailabilityMode::Binary;
  if (text == "remaining") return AvailabilityMode::RemainingTime;
  throw std::invalid_argument("unknown availability mode '" + std::string(text) + "'");
}

bool same_objective(double a, double b) {
  return std::abs(a - b) <= kRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

double availability_cost(const WorkerState& state, AvailabilityMode mode, double alpha, double now) {
  if (!state.busy) return 0.0;
  switch (mode) {
    case AvailabilityMode::None:
      return 0.0;
    case AvailabilityMode::Binary:
      return alpha;
    case AvailabilityMode::RemainingTime: {
      const double elapsed = now - state.start;
      if (elapsed < 0.0) {
        throw std::domain_error("negative elapsed time for action " + state.action);
      }
      if (!(state.nominal_duration > 0.0)) {
        throw std::domain_error("non-positive nominal duration for action " + state.action);
      }
      const double remaining = std::max(0.0, state.nominal_duration - elapsed);
      return alpha * remaining / state.nominal_duration;
    }
  }
  return 0.0;
}

double compute_alpha(std::span<const double> subproblem_costs, AvailabilityMode mode) {
  if (mode == AvailabilityMode::None || subproblem_costs.empty()) return 0.0;
  const double peak = *std::max_element(subproblem_costs.begin(), subproblem_costs.end());
  return mode == AvailabilityMode::Binary ? (1.0 + kBinaryAlphaMargin) * peak : peak;
}

double compute_alpha(const JobSpec& job, const WorkerId& worker, std::span<const ActionId> pending,
                     AvailabilityMode mode) {
  // Binary mode must outweigh every cost of the subproblem, not only this
  // worker's, or a cheap busy worker could still beat an expensive free one.
  std::vector<double> costs;
  for (const auto& action : pending) {
    if (mode == AvailabilityMode::Binary) {
      for (const auto& w : job.workers) {
        if (auto c = job.cost(w.id, action)) costs.push_back(*c);
      }
    } else if (auto c = job.cost(worker, action)) {
      costs.push_back(*c);
    }
  }
  return compute_alpha(costs, mode);
}

bool AllocationProblem::within_budget(std::size_t worker, std::size_t action) const {
  if (!has_budgets()) return true;
  return budget_usage[index(worker, action)] <= budget_limit[worker];
}

AllocationProblem AllocationProblem::make(std::vector<WorkerId> workers, std::vector<ActionId> actions,
                                          std::vector<double> base_cost, std::vector<char> capable,
                                          std::vector<double> availability) {
  AllocationProblem p;
  p.workers = std::move(workers);
  p.actions = std::move(actions);
  p.base_cost = std::move(base_cost);
  p.capable = std::move(capable);
  p.availability = availability.empty() ? std::vector<double>(p.workers.size(), 0.0) : std::move(availability);
  p.target = std::min(p.workers.size(), p.actions.size());
  return p;
}

std::vector<std::pair<WorkerId, ActionId>> Assignment::named(const AllocationProblem& problem) const {
  std::vector<std::pair<WorkerId, ActionId>> out;
  out.reserve(pairs.size());
  for (auto [w, a] : pairs) out.emplace_back(problem.workers[w], problem.actions[a]);
  return out;
}

AllocationProblem build_problem(std::span<const ActionId> pending, const JobSpec& job,
                                const std::map<WorkerId, WorkerState>& states, AvailabilityMode mode,
                                double now) {
  if (pending.empty()) throw std::invalid_argument("build_problem needs at least one pending action");
  AllocationProblem p;
  p.actions.assign(pending.begin(), pending.end());
  for (const auto& w : job.workers) p.workers.push_back(w.id);
  const std::size_t n = p.workers.size(), m = p.actions.size();
  p.base_cost.assign(n * m, 0.0);
  p.capable.assign(n * m, 0);
  p.availability.assign(n, 0.0);
  p.target = std::min(n, m);

  const bool budgets = !job.budgets.empty();
  if (budgets) {
    p.budget_usage.assign(n * m, 0.0);
    p.budget_limit.assign(n, kInf);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Worker& worker = job.workers[i];
    for (std::size_t j = 0; j < m; ++j) {
      if (!worker.can_execute(p.actions[j])) continue;
      auto c = job.cost(worker.id, p.actions[j]);
      if (!c) continue;
      p.capable[p.index(i, j)] = 1;
      p.base_cost[p.index(i, j)] = *c;
      if (budgets) p.budget_usage[p.index(i, j)] = worker.duration(p.actions[j]);
    }
    if (budgets) {
      if (auto it = job.budgets.find(worker.id); it != job.budgets.end()) p.budget_limit[i] = it->second;
    }
  }

  // Same alpha as compute_alpha(job, ...), read from the matrix just built.
  auto capable_costs = [&](std::size_t first_row, std::size_t last_row) {
    std::vector<double> costs;
    for (std::size_t k = first_row * m; k < last_row * m; ++k) {
      if (p.capable[k]) costs.push_back(p.base_cost[k]);
    }
    return costs;
  };
  const double shared_alpha = mode == AvailabilityMode::Binary ? compute_alpha(capable_costs(0, n), mode) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto state = states.find(p.workers[i]);
    if (state == states.end()) {
      throw std::invalid_argument("no availability state for worker " + p.workers[i]);
    }
    if (!state->second.busy) continue;
    const double alpha =
        mode == AvailabilityMode::Binary ? shared_alpha : compute_alpha(capable_costs(i, i + 1), mode);
    p.availability[i] = availability_cost(state->second, mode, alpha, now);
  }

  std::vector<ActionId> orphans;
  for (std::size_t j = 0; j < m; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any = any || p.is_capable(i, j);
    if (!any) orphans.push_back(p.actions[j]);
  }
  if (!orphans.empty()) {
    std::string msg = "no capable worker for:";
    for (const auto& a : orphans) msg += " " + a;
    throw AllocationError(msg, std::move(orphans));
  }
  return p;
}

Assignment solve(const AllocationProblem& problem) {
  return problem.has_budgets() ? solve_branch_and_bound(problem) : solve_hungarian(problem);
}

Assignment solve_branch_and_bound(const AllocationProblem& problem) {
  check_shape(problem);
  auto result = BranchAndBound(problem).run();
  if (!result) throw_infeasible(problem);
  return *result;
}

Assignment solve_hungarian(const AllocationProblem& problem) {
  check_shape(problem);
  if (problem.has_budgets()) throw std::invalid_argument("assignment fast path cannot handle budgets");
  const std::size_t n = problem.num_workers(), m = problem.num_actions();

  std::vector<std::size_t> all_workers(n), all_actions(m);
  std::iota(all_workers.begin(), all_workers.end(), 0);
  std::iota(all_actions.begin(), all_actions.end(), 0);
  auto optimum = optimal_value(problem, all_workers, all_actions, problem.target);
  if (!optimum) throw_infeasible(problem);
  const double limit = *optimum + tolerance(*optimum);

  // Fix worker decisions in lexicographic order: the smallest action index that
  // still admits an optimal completion, else leave the worker unassigned.
  Assignment out;
  std::vector<char> used(m, 0);
  double fixed = 0.0;
  for (std::size_t w = 0; w < n && out.pairs.size() < problem.target; ++w) {
    std::vector<std::size_t> rest_workers;
    for (std::size_t k = w + 1; k < n; ++k) rest_workers.push_back(k);
    auto remaining_actions = [&](std::optional<std::size_t> skip) {
      std::vector<std::size_t> acts;
      for (std::size_t a = 0; a < m; ++a) {
        if (!used[a] && a != skip) acts.push_back(a);
      }
      return acts;
    };

    bool decided = false;
    for (std::size_t a = 0; a < m && !decided; ++a) {
      if (used[a] || !problem.is_capable(w, a)) continue;
      const double head = fixed + problem.effective_cost(w, a);
      if (head > limit) continue;
      auto tail = optimal_value(problem, rest_workers, remaining_actions(a), problem.target - out.pairs.size() - 1);
      if (tail && head + *tail <= limit) {
        out.pairs.emplace_back(w, a);
        used[a] = 1;
        fixed = head;
        decided = true;
      }
    }
    // Unassigned: the optimum is reachable without this worker by elimination.
  }
  if (out.pairs.size() != problem.target) throw_infeasible(problem);
  out.objective = objective_of(problem, out.pairs);
  return out;
}

Assignment solve_bruteforce(const AllocationProblem& problem) {
  check_shape(problem);
  const std::size_t n = problem.num_workers(), m = problem.num_actions();
  if (n > 8 || m > 8) throw std::invalid_argument("brute force refuses instances larger than 8x8");

  std::optional<Assignment> best;
  std::vector<int> choice(n, -1);  // action per worker, -1 = none
  std::vector<char> taken(m, 0);

  auto consider = [&] {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t w = 0; w < n; ++w) {
      if (choice[w] >= 0) pairs.emplace_back(w, static_cast<std::size_t>(choice[w]));
    }
    if (pairs.size() != problem.target) return;
    double total = 0.0;
    for (auto [w, a] : pairs) {
      if (!problem.is_capable(w, a)) return;
      if (problem.has_budgets() && problem.budget_usage[problem.index(w, a)] > problem.budget_limit[w]) return;
      total += problem.base_cost[problem.index(w, a)] + problem.availability[w];
    }
    if (!best || total < best->objective - tolerance(best->objective) ||
        (same_objective(total, best->objective) && lex_less(pairs, best->pairs))) {
      best = Assignment{std::move(pairs), total};
    }
  };

  auto enumerate = [&](auto&& self, std::size_t w) -> void {
    if (w == n) {
      consider();
      return;
    }
    choice[w] = -1;
    self(self, w + 1);
    for (std::size_t a = 0; a < m; ++a) {
      if (taken[a]) continue;
      taken[a] = 1;
      choice[w] = static_cast<int>(a);
      self(self, w + 1);
      choice[w] = -1;
      taken[a] = 0;
    }
  };
  enumerate(enumerate, 0);

  if (!best) throw_infeasible(problem);
  return *best;
}

std::vector<std::string> check_assignment(const AllocationProblem& problem, const Assignment& assignment) {
  std::vector<std::string> out;
  const std::size_t n = problem.num_workers(), m = problem.num_actions();
  std::vector<int> per_worker(n, 0), per_action(m, 0);
  double total = 0.0;
  for (auto [w, a] : assignment.pairs) {
    if (w >= n || a >= m) {
      out.push_back("pair (" + std::to_string(w) + ", " + std::to_string(a) + ") outside the binary variable grid");
      continue;
    }
    const std::string label = problem.workers[w] + "->" + problem.actions[a];
    if (!problem.is_capable(w, a)) out.push_back("incapable pair " + label);
    ++per_worker[w];
    ++per_action[a];
    total += problem.effective_cost(w, a);
  }
  for (std::size_t a = 0; a < m; ++a) {
    if (per_action[a] > 1) out.push_back("action " + problem.actions[a] + " allocated to several workers");
  }
  for (std::size_t w = 0; w < n; ++w) {
    if (per_worker[w] > 1) out.push_back("worker " + problem.workers[w] + " allocated several actions");
  }
  if (assignment.pairs.size() != problem.target) {
    out.push_back("cardinality " + std::to_string(assignment.pairs.size()) + " != min(L, N) = " +
                  std::to_string(problem.target));
  }
  if (problem.has_budgets()) {
    std::vector<double> spent(n, 0.0);
    for (auto [w, a] : assignment.pairs) {
      if (w < n && a < m) spent[w] += problem.budget_usage[problem.index(w, a)];
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (spent[w] > problem.budget_limit[w]) out.push_back("worker " + problem.workers[w] + " exceeds its budget");
    }
  }
  if (!same_objective(total, assignment.objective)) {
    out.push_back("objective " + std::to_string(assignment.objective) + " does not match pair costs " +
                  std::to_string(total));
  }
  return out;
}

}  // namespace mata::alloc
