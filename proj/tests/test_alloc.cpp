#include <gtest/gtest.h>

#include <random>

#include "mata/alloc.hpp"
#include "support/fixtures.hpp"

using namespace mata;
using namespace mata::alloc;
using mata::fixtures::enumerate_optimum;
using mata::fixtures::idle_stage_problem;
using mata::fixtures::load_table2;
using Pairs = std::vector<std::pair<std::string, std::string>>;

namespace {

WorkerState busy(const std::string& action, double start, double duration) {
  return WorkerState{true, action, start, duration};
}

// The a_12 decision: w_2 just finished a_9 at t = 27 (stage-relative), the
// others are still on a_8, a_10, a_11, all started at 0.
AllocationProblem a12_problem(AvailabilityMode mode) {
  const JobSpec job = load_table2();
  std::map<WorkerId, WorkerState> states{
      {"w_1", busy("a_8", 0, 30)},
      {"w_2", {}},
      {"w_3", busy("a_10", 0, 39)},
      {"w_4", busy("a_11", 0, 42)},
  };
  const std::vector<ActionId> pending{"a_12"};
  return build_problem(pending, job, states, mode, 27.0);
}

struct RandomProblemOptions {
  std::size_t max_size = 7;
  bool budgets = false;
};

AllocationProblem random_problem(std::mt19937_64& rng, const RandomProblemOptions& opt) {
  std::uniform_int_distribution<std::size_t> dim(1, opt.max_size);
  std::uniform_real_distribution<double> cost(1.0, 100.0), unit(0.0, 1.0);
  const std::size_t n = dim(rng), m = dim(rng);
  std::vector<WorkerId> workers;
  std::vector<ActionId> actions;
  for (std::size_t i = 0; i < n; ++i) workers.push_back("w" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) actions.push_back("a" + std::to_string(j));
  std::vector<double> base(n * m), availability(n);
  std::vector<char> capable(n * m);
  for (auto& c : base) c = std::round(cost(rng));  // integer costs provoke ties
  for (auto& c : capable) c = unit(rng) < 0.7;
  for (auto& a : availability) a = unit(rng) < 0.5 ? 0.0 : std::round(cost(rng) * 10) / 10;
  auto p = AllocationProblem::make(workers, actions, base, capable, availability);
  if (opt.budgets) {
    p.budget_usage.resize(n * m);
    for (auto& u : p.budget_usage) u = std::round(cost(rng));
    p.budget_limit.resize(n);
    for (auto& l : p.budget_limit) l = unit(rng) < 0.3 ? std::numeric_limits<double>::infinity() : cost(rng);
  }
  return p;
}

}  // namespace

TEST(AvailabilityCost, AvailableWorkerCostsNothingInEveryMode) {
  for (auto mode : {AvailabilityMode::None, AvailabilityMode::Binary, AvailabilityMode::RemainingTime}) {
    EXPECT_EQ(availability_cost(WorkerState{}, mode, 45.0, 12.0), 0.0);
  }
}

TEST(AvailabilityCost, RemainingTimeAtStartIsAlpha) {
  EXPECT_DOUBLE_EQ(availability_cost(busy("a_8", 0, 30), AvailabilityMode::RemainingTime, 45.0, 0.0), 45.0);
}

TEST(AvailabilityCost, RemainingTimeScalesWithRemainingFraction) {
  // 45 * (30 - 27) / 30
  EXPECT_NEAR(availability_cost(busy("a_8", 0, 30), AvailabilityMode::RemainingTime, 45.0, 27.0), 4.5, 1e-12);
  EXPECT_EQ(availability_cost(busy("a_8", 0, 30), AvailabilityMode::RemainingTime, 45.0, 30.0), 0.0);
}

TEST(AvailabilityCost, BinaryAndNone) {
  EXPECT_EQ(availability_cost(busy("a_8", 0, 30), AvailabilityMode::Binary, 45.45, 27.0), 45.45);
  EXPECT_EQ(availability_cost(busy("a_8", 0, 30), AvailabilityMode::None, 45.45, 27.0), 0.0);
}

TEST(AvailabilityCost, NegativeElapsedTimeIsAFault) {
  EXPECT_THROW(availability_cost(busy("a_8", 10, 30), AvailabilityMode::RemainingTime, 45.0, 5.0), std::domain_error);
}

TEST(AvailabilityCost, RemainingTimeIsMonotoneFromAlphaToZero) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(1.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double duration = dist(rng), alpha = dist(rng), start = dist(rng);
    const auto state = busy("x", start, duration);
    double previous = availability_cost(state, AvailabilityMode::RemainingTime, alpha, start);
    EXPECT_DOUBLE_EQ(previous, alpha);
    for (int k = 1; k <= 20; ++k) {
      const double now = start + duration * k / 20.0;
      const double chi = availability_cost(state, AvailabilityMode::RemainingTime, alpha, now);
      EXPECT_LE(chi, previous + 1e-12);
      previous = chi;
    }
    EXPECT_NEAR(previous, 0.0, 1e-9);
  }
}

TEST(ComputeAlpha, ModesOverSubproblemCosts) {
  const std::vector<double> costs{45.0};
  EXPECT_DOUBLE_EQ(compute_alpha(costs, AvailabilityMode::RemainingTime), 45.0);
  EXPECT_DOUBLE_EQ(compute_alpha(costs, AvailabilityMode::Binary), 45.45);
  EXPECT_EQ(compute_alpha(costs, AvailabilityMode::None), 0.0);
  EXPECT_EQ(compute_alpha(std::vector<double>{}, AvailabilityMode::Binary), 0.0);
}

TEST(ComputeAlpha, UsesOnlyPendingActionsOfTheWorker) {
  const JobSpec job = load_table2();
  const std::vector<ActionId> pending{"a_12"};
  EXPECT_DOUBLE_EQ(compute_alpha(job, "w_1", pending, AvailabilityMode::RemainingTime), 45.0);
  const std::vector<ActionId> stage{"a_8", "a_9", "a_10", "a_11", "a_12"};
  EXPECT_DOUBLE_EQ(compute_alpha(job, "w_1", stage, AvailabilityMode::RemainingTime), 66.0);
  // Binary outweighs the whole subproblem: 1.01 * 54 (w_4 on a_12).
  EXPECT_DOUBLE_EQ(compute_alpha(job, "w_1", pending, AvailabilityMode::Binary), 54.54);
}

TEST(A12Decision, RemainingTimePrefersWaitingForW1) {
  const auto p = a12_problem(AvailabilityMode::RemainingTime);
  const auto a = solve(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w_1", "a_12"}}));
  EXPECT_NEAR(a.objective, 49.5, 1e-9);  // 45 + 4.5 < 51
  EXPECT_TRUE(check_assignment(p, a).empty());
}

TEST(A12Decision, BinaryPicksTheFreeWorker) {
  const auto p = a12_problem(AvailabilityMode::Binary);
  const auto a = solve(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w_2", "a_12"}}));
  EXPECT_NEAR(a.objective, 51.0, 1e-9);
  // Busy w_1 costs 45 + 54.54.
  EXPECT_NEAR(p.effective_cost(0, 0), 99.54, 1e-9);
}

TEST(A12Decision, NoAvailabilityPicksCheapestWorker) {
  const auto p = a12_problem(AvailabilityMode::None);
  EXPECT_EQ(solve(p).named(p), (Pairs{{"w_3", "a_12"}}));
}

TEST(BuildProblem, StageThreeIsFiveByFourWithTargetFour) {
  const JobSpec job = load_table2();
  const auto p = idle_stage_problem(job, {"a_8", "a_9", "a_10", "a_11", "a_12"});
  EXPECT_EQ(p.num_actions(), 5u);
  EXPECT_EQ(p.num_workers(), 4u);
  EXPECT_EQ(p.target, 4u);
  EXPECT_EQ(p.base_cost[p.index(1, 1)], 27.0);
}

TEST(BuildProblem, SingleActionSingleWorker) {
  JobSpec job;
  job.actions = {{"a", "move", {}}};
  job.workers = {{"w", WorkerKind::Robot, {"a"}, {{"a", 7.0}}}};
  job.costs[{"w", "a"}] = 7.0;
  job.plan = PlanNode::allocate({"a"});
  const std::vector<ActionId> pending{"a"};
  const auto p = build_problem(pending, job, {{"w", {}}}, AvailabilityMode::Binary, 0.0);
  EXPECT_EQ(p.target, 1u);
  const auto a = solve(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w", "a"}}));
  EXPECT_EQ(a.objective, 7.0);
}

TEST(BuildProblem, ActionWithoutCapableWorkerIsNamed) {
  JobSpec job;
  job.actions = {{"a", "move", {}}, {"b", "move", {}}};
  job.workers = {{"w", WorkerKind::Robot, {"a"}, {{"a", 7.0}}}};
  job.costs[{"w", "a"}] = 7.0;
  const std::vector<ActionId> pending{"a", "b"};
  try {
    build_problem(pending, job, {{"w", {}}}, AvailabilityMode::None, 0.0);
    FAIL() << "expected AllocationError";
  } catch (const AllocationError& e) {
    EXPECT_EQ(e.unallocatable(), std::vector<ActionId>{"b"});
  }
}

TEST(Solve, StageOneMatchesPublishedAllocation) {
  const JobSpec job = load_table2();
  const auto p = idle_stage_problem(job, {"a_1", "a_2", "a_3"});
  const auto a = solve(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w_1", "a_3"}, {"w_2", "a_1"}, {"w_4", "a_2"}}));
  EXPECT_EQ(a.objective, 39.0);
  EXPECT_EQ(enumerate_optimum(p), 39.0);
}

TEST(Solve, StageThreeWithoutA12) {
  const JobSpec job = load_table2();
  const auto p = idle_stage_problem(job, {"a_8", "a_9", "a_10", "a_11"});
  const auto a = solve(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w_1", "a_8"}, {"w_2", "a_9"}, {"w_3", "a_10"}, {"w_4", "a_11"}}));
  EXPECT_EQ(a.objective, 138.0);
  EXPECT_EQ(enumerate_optimum(p), 138.0);
}

TEST(Solve, StageThreeDefersA12) {
  const JobSpec job = load_table2();
  const auto p = idle_stage_problem(job, {"a_8", "a_9", "a_10", "a_11", "a_12"});
  const auto a = solve(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w_1", "a_8"}, {"w_2", "a_9"}, {"w_3", "a_10"}, {"w_4", "a_11"}}));
  EXPECT_EQ(enumerate_optimum(p), 138.0);
  EXPECT_EQ(solve_branch_and_bound(p).pairs, a.pairs);
}

TEST(Solve, StageTwoBruteForce) {
  const JobSpec job = load_table2();
  const auto p = idle_stage_problem(job, {"a_4", "a_5", "a_6", "a_7"});
  const auto a = solve_bruteforce(p);
  EXPECT_EQ(a.named(p), (Pairs{{"w_1", "a_7"}, {"w_2", "a_6"}, {"w_3", "a_4"}, {"w_4", "a_5"}}));
  EXPECT_EQ(a.objective, 53.0);
  EXPECT_EQ(enumerate_optimum(p), 53.0);
}

TEST(Solve, BruteForceOneByOne) {
  const auto p = AllocationProblem::make({"w"}, {"a"}, {3.0}, {1});
  const auto a = solve_bruteforce(p);
  EXPECT_EQ(a.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
  EXPECT_EQ(a.objective, 3.0);
}

TEST(Solve, BruteForceRefusesLargeInstances) {
  const std::size_t n = 9;
  const auto p = AllocationProblem::make(std::vector<WorkerId>(n, "w"), std::vector<ActionId>(n, "a"),
                                         std::vector<double>(n * n, 1.0), std::vector<char>(n * n, 1));
  EXPECT_THROW(solve_bruteforce(p), std::invalid_argument);
}

TEST(Solve, InfeasibleCardinalityNamesActions) {
  // Both actions only doable by w0; two workers means two pairs are required.
  const auto p = AllocationProblem::make({"w0", "w1"}, {"a0", "a1"}, {1, 1, 1, 1}, {1, 1, 0, 0});
  for (auto* solver : {&solve, &solve_branch_and_bound, &solve_hungarian, &solve_bruteforce}) {
    try {
      (*solver)(p);
      FAIL() << "expected AllocationError";
    } catch (const AllocationError& e) {
      EXPECT_EQ(e.unallocatable().size(), 1u);
    }
  }
}

TEST(Solve, TiesResolveToLexicographicallySmallestPairs) {
  const std::size_t n = 3, m = 5;
  const auto p = AllocationProblem::make({"w0", "w1", "w2"}, {"a0", "a1", "a2", "a3", "a4"},
                                         std::vector<double>(n * m, 4.0), std::vector<char>(n * m, 1));
  const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(solve_branch_and_bound(p).pairs, expected);
  EXPECT_EQ(solve_hungarian(p).pairs, expected);
  EXPECT_EQ(solve_bruteforce(p).pairs, expected);

  // More workers than actions: the first workers take the actions in order.
  const auto q = AllocationProblem::make({"w0", "w1", "w2"}, {"a0"}, {5, 5, 5}, {1, 1, 1});
  EXPECT_EQ(solve(q).pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
}

TEST(Solve, BudgetsExcludeOverBudgetPairs) {
  auto p = AllocationProblem::make({"w0", "w1"}, {"a0", "a1"}, {1, 10, 10, 1}, {1, 1, 1, 1});
  p.budget_usage = {50, 5, 5, 50};
  p.budget_limit = {10, std::numeric_limits<double>::infinity()};
  const auto a = solve(p);
  // w0 cannot afford a0; w0->a1 + w1->a0 is the only feasible full match.
  EXPECT_EQ(a.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(a.objective, 20.0);
  EXPECT_TRUE(check_assignment(p, a).empty());
  EXPECT_THROW(solve_hungarian(p), std::invalid_argument);
}

TEST(CheckAssignment, ReportsEveryBrokenConstraint) {
  auto p = AllocationProblem::make({"w0", "w1"}, {"a0", "a1"}, {1, 2, 3, 4}, {1, 0, 1, 1});
  Assignment bad;
  bad.pairs = {{0, 1}, {0, 0}, {1, 0}};
  bad.objective = 0.0;
  const auto v = check_assignment(p, bad);
  auto has = [&](const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("incapable"));
  EXPECT_TRUE(has("several workers"));
  EXPECT_TRUE(has("several actions"));
  EXPECT_TRUE(has("cardinality"));
  EXPECT_TRUE(has("objective"));
}

TEST(SolverProperties, ExactSolversAgreeWithEnumeration) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_problem(rng, {});
    const double reference = enumerate_optimum(p);
    if (!std::isfinite(reference)) {
      EXPECT_THROW(solve_bruteforce(p), AllocationError);
      EXPECT_THROW(solve_branch_and_bound(p), AllocationError);
      EXPECT_THROW(solve_hungarian(p), AllocationError);
      continue;
    }
    const auto brute = solve_bruteforce(p);
    const auto bnb = solve_branch_and_bound(p);
    const auto hung = solve_hungarian(p);
    EXPECT_TRUE(same_objective(brute.objective, reference)) << trial;
    EXPECT_TRUE(same_objective(bnb.objective, reference)) << trial;
    EXPECT_TRUE(same_objective(hung.objective, reference)) << trial;
    EXPECT_EQ(bnb.pairs, brute.pairs) << trial;
    EXPECT_EQ(hung.pairs, brute.pairs) << trial;
    EXPECT_TRUE(check_assignment(p, bnb).empty());
    EXPECT_TRUE(check_assignment(p, hung).empty());
  }
}

TEST(SolverProperties, BranchAndBoundMatchesBruteForceWithBudgets) {
  std::mt19937_64 rng(99);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_problem(rng, {6, true});
    std::optional<Assignment> brute;
    try {
      brute = solve_bruteforce(p);
    } catch (const AllocationError&) {
      EXPECT_THROW(solve_branch_and_bound(p), AllocationError);
      continue;
    }
    ++feasible;
    const auto bnb = solve_branch_and_bound(p);
    EXPECT_TRUE(same_objective(bnb.objective, brute->objective));
    EXPECT_EQ(bnb.pairs, brute->pairs);
    EXPECT_TRUE(check_assignment(p, bnb).empty());
  }
  EXPECT_GT(feasible, 50);
}

TEST(SolverProperties, ScalingCostsAndAvailabilityKeepsTheAssignment) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> factor(0.01, 1000.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_problem(rng, {});
    if (!std::isfinite(enumerate_optimum(p))) continue;
    const auto before = solve(p);
    const double k = factor(rng);
    for (auto& c : p.base_cost) c *= k;
    for (auto& a : p.availability) a *= k;
    const auto after = solve(p);
    EXPECT_EQ(after.pairs, before.pairs) << trial;
    EXPECT_TRUE(same_objective(after.objective, before.objective * k));
  }
}

TEST(SolverProperties, CardinalityIsMinOfActionsAndWorkers) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_problem(rng, {});
    std::fill(p.capable.begin(), p.capable.end(), 1);
    EXPECT_EQ(solve(p).pairs.size(), std::min(p.num_workers(), p.num_actions()));
  }
}

TEST(SolverProperties, BinaryAvailabilityPrefersAvailableWorkers) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> team(1, 8);
  std::uniform_real_distribution<double> cost(1.0, 100.0), unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = team(rng);
    JobSpec job;
    job.actions = {{"a", "move", {}}};
    std::map<WorkerId, WorkerState> states;
    std::size_t capable_available = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Worker w{"w" + std::to_string(i), WorkerKind::Robot, {}, {}};
      const bool capable = unit(rng) < 0.7;
      if (capable) {
        w.capabilities.insert("a");
        w.durations["a"] = cost(rng);
        job.costs[{w.id, "a"}] = cost(rng);
      }
      const bool is_busy = unit(rng) < 0.5;
      states[w.id] = is_busy ? busy("other", 0.0, cost(rng)) : WorkerState{};
      if (capable && !is_busy) ++capable_available;
      job.workers.push_back(std::move(w));
    }
    if (capable_available == 0) {
      // Force one capable, available worker.
      auto& w = job.workers.front();
      w.capabilities.insert("a");
      w.durations["a"] = cost(rng);
      job.costs[{w.id, "a"}] = cost(rng);
      states[w.id] = {};
    }
    const std::vector<ActionId> pending{"a"};
    const auto p = build_problem(pending, job, states, AvailabilityMode::Binary, 1.0);
    const auto a = solve(p);
    ASSERT_EQ(a.pairs.size(), 1u);
    EXPECT_FALSE(states.at(p.workers[a.pairs.front().first]).busy) << trial;
  }
}
