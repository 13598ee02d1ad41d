#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mata/alloc.hpp"
#include "mata/blackboard.hpp"
#include "mata/clock.hpp"
#include "mata/core.hpp"
#include "mata/trace.hpp"

namespace mata::bt {

using Allocator = std::function<alloc::Assignment(const alloc::AllocationProblem&)>;

/// Everything a node may touch during a tick. The engine owns all of it and
/// ticks from a single thread.
struct TickContext {
  const JobSpec* job = nullptr;
  Blackboard* blackboard = nullptr;
  sim::SimClock* clock = nullptr;
  Allocator allocator = alloc::solve;
  alloc::AvailabilityMode mode = alloc::AvailabilityMode::RemainingTime;
  MessageSink* sink = nullptr;
  SimTrace* trace = nullptr;
  // Test hook: primitives of these actions fail on completion.
  std::set<ActionId> failing_actions;
};

enum class NodeKind {
  Sequence,
  Fallback,
  Parallel,
  Inverter,
  Condition,
  Action,
  RoleAllocator,
  AgentHandler,
  RobotAction,
  HumanCommunication,
};

std::string_view to_string(NodeKind kind);

class TreeNode {
 public:
  TreeNode(std::string name, NodeKind kind) : name_(std::move(name)), kind_(kind) {}
  virtual ~TreeNode() = default;
  TreeNode(const TreeNode&) = delete;
  TreeNode& operator=(const TreeNode&) = delete;

  Status tick(TickContext& ctx);
  /// Status returned by the last tick; Idle before the first one.
  Status status() const { return status_; }

  const std::string& name() const { return name_; }
  NodeKind kind() const { return kind_; }
  const std::vector<std::unique_ptr<TreeNode>>& children() const { return children_; }
  const PortMap& ports() const { return ports_; }
  PortMap& ports() { return ports_; }
  std::size_t tick_count() const { return ticks_; }

 protected:
  virtual Status on_tick(TickContext& ctx) = 0;

  std::vector<std::unique_ptr<TreeNode>> children_;
  PortMap ports_;

 private:
  std::string name_;
  NodeKind kind_;
  Status status_ = Status::Idle;
  std::size_t ticks_ = 0;
};

using NodePtr = std::unique_ptr<TreeNode>;

/// Base of nodes with an ordered child list.
class ControlNode : public TreeNode {
 public:
  using TreeNode::TreeNode;
  ControlNode& add_child(NodePtr child);
};

/// Ticks children in order; Success when all succeed, Failure on the first
/// failure, Running while a child runs. Resumes at the running child.
class SequenceNode : public ControlNode {
 public:
  explicit SequenceNode(std::string name = "Sequence") : ControlNode(std::move(name), NodeKind::Sequence) {}

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  std::size_t current_ = 0;
};

/// Ticks children in order; Success on the first success, Failure when all
/// fail, Running while a child runs. Resumes at the running child.
class FallbackNode : public ControlNode {
 public:
  explicit FallbackNode(std::string name = "Fallback") : ControlNode(std::move(name), NodeKind::Fallback) {}

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  std::size_t current_ = 0;
};

/// Ticks every unfinished child. Success once at least `threshold` children
/// succeeded, Failure once more than N - threshold failed, Running otherwise.
/// The threshold defaults to all children.
class ParallelNode : public ControlNode {
 public:
  explicit ParallelNode(std::string name = "Parallel", std::optional<std::size_t> threshold = std::nullopt)
      : ControlNode(std::move(name), NodeKind::Parallel), threshold_(threshold) {}

  std::size_t threshold() const { return threshold_.value_or(children_.size()); }

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  std::optional<std::size_t> threshold_;
  std::vector<Status> finished_;
};

/// Swaps Success and Failure of its single child; Running passes through.
class InverterNode : public TreeNode {
 public:
  explicit InverterNode(NodePtr child, std::string name = "Inverter");

 protected:
  Status on_tick(TickContext& ctx) override;
};

/// Leaf evaluating a predicate; never Running.
class ConditionNode : public TreeNode {
 public:
  using Predicate = std::function<bool(TickContext&)>;
  ConditionNode(std::string name, Predicate predicate)
      : TreeNode(std::move(name), NodeKind::Condition), predicate_(std::move(predicate)) {}

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  Predicate predicate_;
};

/// Leaf running a user callback each tick.
class ActionNode : public TreeNode {
 public:
  using Body = std::function<Status(TickContext&)>;
  ActionNode(std::string name, Body body) : TreeNode(std::move(name), NodeKind::Action), body_(std::move(body)) {}

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  Body body_;
};

/// Control node that allocates its pending actions to workers by solving one
/// allocation problem per round, then ticks the subtree of every allocated
/// action. Child i belongs to actions()[i]. Output port "allocation" receives
/// the cumulative StageAllocation of this node.
///
/// Success once every child has succeeded since the last failure; Failure as
/// soon as one child fails or allocation is infeasible; Running otherwise.
/// Children that already started are resumed, never restarted.
class RoleAllocatorNode : public ControlNode {
 public:
  RoleAllocatorNode(std::string name, std::vector<ActionId> actions, std::string output_key);

  const std::vector<ActionId>& actions() const { return actions_; }
  const std::vector<ActionId>& pending() const { return pending_; }
  std::size_t executed_count() const { return executed_.size(); }
  std::size_t rounds() const { return rounds_; }

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  bool allocate(TickContext& ctx);

  std::vector<ActionId> actions_;
  std::vector<ActionId> pending_;
  StageAllocation allocation_;
  std::set<std::size_t> executing_;
  std::set<std::size_t> executed_;
  std::size_t rounds_ = 0;
};

/// Condition on the worker allocated to `action`: Failure for a human,
/// Success for a robot. An action missing from the allocation is a fault.
class AgentHandlerNode : public TreeNode {
 public:
  AgentHandlerNode(ActionId action, std::string allocation_key);

 protected:
  Status on_tick(TickContext& ctx) override;

 private:
  ActionId action_;
};

/// Shared lifecycle of the two execution leaves: wait for the allocated worker
/// to be free, mark it busy on its availability entry, run the simulated
/// primitive for the worker's nominal duration, release it on completion.
class ExecutionNode : public TreeNode {
 public:
  enum class Phase { NotStarted, Waiting, Executing, Done, Failed };

  Phase phase() const { return phase_; }
  const ActionId& action() const { return action_; }

 protected:
  ExecutionNode(std::string name, NodeKind kind, ActionId action, std::string allocation_key);

  Status on_tick(TickContext& ctx) override;
  /// Called once, on the first tick, before waiting for the worker.
  /// Returning false fails the node.
  virtual bool on_assigned(TickContext& ctx, const Worker& worker) = 0;

 private:
  void start(TickContext& ctx, const Worker& worker);

  ActionId action_;
  Phase phase_ = Phase::NotStarted;
};

class RobotActionNode : public ExecutionNode {
 public:
  RobotActionNode(ActionId action, std::string allocation_key);

 protected:
  bool on_assigned(TickContext& ctx, const Worker& worker) override;
};

/// Delivers the allocation to the human through the context's MessageSink,
/// then tracks the simulated human's execution like a robot primitive.
class HumanCommunicationNode : public ExecutionNode {
 public:
  HumanCommunicationNode(ActionId action, std::string allocation_key);

 protected:
  bool on_assigned(TickContext& ctx, const Worker& worker) override;
};

/// Planning-and-Allocation-Handler gate structure:
///
///   Fallback
///   ├── Inverter
///   │   └── Fallback
///   │       ├── <handler>
///   │       └── Inverter
///   │           └── <human branch>
///   └── Sequence
///       ├── <handler>
///       └── <robot branch>
///
/// A failing handler routes the tick to the human branch, a succeeding one to
/// the robot branch; the whole returns the status of the branch taken.
NodePtr assemble_pah(const std::function<NodePtr()>& make_handler, NodePtr human_branch, NodePtr robot_branch,
                     const std::string& name = "PAH");

/// The PAH subtree of one action with its AgentHandler, HumanCommunication and
/// RobotAction nodes reading `allocation_key`.
NodePtr build_pah_subtree(const ActionSpec& action, const std::string& allocation_key);

class TreeBuildError : public std::invalid_argument {
 public:
  explicit TreeBuildError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Compiles the job plan: Sequence and Parallel plan nodes map to the same
/// control nodes, each Allocate node to a RoleAllocator with one PAH subtree
/// per action. Throws TreeBuildError listing violations of an invalid job.
NodePtr build_tree(const JobSpec& spec);

/// Depth-first list of every node of `root`.
std::vector<const TreeNode*> flatten(const TreeNode& root);

}  // namespace mata::bt
