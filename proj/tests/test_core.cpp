#include <gtest/gtest.h>

#include "mata/core.hpp"
#include "support/fixtures.hpp"

using namespace mata;

namespace {

JobSpec tiny_job() {
  JobSpec job;
  job.actions = {{"a_1", "pick", {}}, {"a_2", "place", {}}};
  job.workers = {
      {"w_1", WorkerKind::Human, {"a_1", "a_2"}, {{"a_1", 5.0}, {"a_2", 6.0}}},
      {"w_2", WorkerKind::Robot, {"a_2"}, {{"a_2", 3.0}}},
  };
  job.costs = {{{"w_1", "a_1"}, 5.0}, {{"w_1", "a_2"}, 6.0}, {{"w_2", "a_2"}, 3.0}};
  job.plan = PlanNode::sequence({PlanNode::allocate({"a_1"}), PlanNode::allocate({"a_2"})});
  return job;
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(ValidateJob, AcceptsWellFormedJobs) {
  EXPECT_TRUE(validate_job(tiny_job()).empty());
  EXPECT_TRUE(validate_job(fixtures::load_table2()).empty());
}

TEST(ValidateJob, ActionWithoutCapableWorker) {
  auto job = tiny_job();
  job.workers[0].capabilities.erase("a_1");
  job.workers[0].durations.erase("a_1");
  job.costs.erase({"w_1", "a_1"});
  const auto v = validate_job(job);
  EXPECT_TRUE(mentions(v, "action a_1 has no capable worker"));
}

TEST(ValidateJob, ActionInTwoPlanNodes) {
  auto job = tiny_job();
  job.plan = PlanNode::sequence({PlanNode::allocate({"a_1", "a_2"}), PlanNode::allocate({"a_1"})});
  EXPECT_TRUE(mentions(validate_job(job), "a_1 assigned to multiple plan nodes"));
}

TEST(ValidateJob, ReportsStructuralProblems) {
  auto job = tiny_job();
  job.actions.push_back({"a_1", "pick", {}});
  EXPECT_TRUE(mentions(validate_job(job), "duplicate action id a_1"));

  job = tiny_job();
  job.costs.erase({"w_2", "a_2"});
  EXPECT_TRUE(mentions(validate_job(job), "missing cost for w_2/a_2"));

  job = tiny_job();
  job.costs[{"w_2", "a_1"}] = 4.0;
  EXPECT_TRUE(mentions(validate_job(job), "not capable"));

  job = tiny_job();
  job.plan = PlanNode::allocate({"a_1"});
  EXPECT_TRUE(mentions(validate_job(job), "action a_2 is not part of the plan"));

  job = tiny_job();
  job.plan = PlanNode::parallel({PlanNode::allocate({"a_1"}), PlanNode::allocate({"a_2"})}, 3);
  EXPECT_TRUE(mentions(validate_job(job), "parallel threshold"));

  job = tiny_job();
  job.plan = PlanNode::sequence({});
  EXPECT_TRUE(mentions(validate_job(job), "has no children"));

  job = tiny_job();
  job.budgets["w_9"] = 10.0;
  EXPECT_TRUE(mentions(validate_job(job), "unknown worker w_9"));
}

TEST(Worker, DurationLookup) {
  const auto job = tiny_job();
  EXPECT_EQ(job.workers[1].duration("a_2"), 3.0);
  EXPECT_THROW(job.workers[1].duration("a_1"), std::out_of_range);
  EXPECT_TRUE(job.workers[0].can_execute("a_1"));
  EXPECT_FALSE(job.workers[1].can_execute("a_1"));
  EXPECT_EQ(job.cost("w_2", "a_2"), 3.0);
  EXPECT_FALSE(job.cost("w_2", "a_1").has_value());
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(30.0), "30");
  EXPECT_EQ(format_number(4.5), "4.5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
}

TEST(AllocateStages, DepthFirstOrder) {
  const auto stages = allocate_stages(fixtures::load_table2().plan);
  ASSERT_EQ(stages.size(), 4u);
  EXPECT_EQ(stages[0], (std::vector<ActionId>{"a_1", "a_2", "a_3"}));
  EXPECT_EQ(stages[2].size(), 5u);
  EXPECT_EQ(stages[3], (std::vector<ActionId>{"a_13", "a_14"}));
}
