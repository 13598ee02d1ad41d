#include "mata/bt.hpp"

#include <algorithm>
#include <chrono>

namespace mata::bt {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Sequence: return "Sequence";
    case NodeKind::Fallback: return "Fallback";
    case NodeKind::Parallel: return "Parallel";
    case NodeKind::Inverter: return "Inverter";
    case NodeKind::Condition: return "Condition";
    case NodeKind::Action: return "Action";
    case NodeKind::RoleAllocator: return "RoleAllocator";
    case NodeKind::AgentHandler: return "AgentHandler";
    case NodeKind::RobotAction: return "RobotAction";
    case NodeKind::HumanCommunication: return "HumanCommunication";
  }
  return "?";
}

Status TreeNode::tick(TickContext& ctx) {
  ++ticks_;
  status_ = on_tick(ctx);
  if (status_ == Status::Idle) throw EngineFault("node " + name_ + " returned IDLE from a tick");
  return status_;
}

ControlNode& ControlNode::add_child(NodePtr child) {
  children_.push_back(std::move(child));
  return *this;
}

Status SequenceNode::on_tick(TickContext& ctx) {
  while (current_ < children_.size()) {
    const Status s = children_[current_]->tick(ctx);
    if (s == Status::Running) return Status::Running;
    if (s == Status::Failure) {
      current_ = 0;
      return Status::Failure;
    }
    ++current_;
  }
  current_ = 0;
  return Status::Success;
}

Status FallbackNode::on_tick(TickContext& ctx) {
  while (current_ < children_.size()) {
    const Status s = children_[current_]->tick(ctx);
    if (s == Status::Running) return Status::Running;
    if (s == Status::Success) {
      current_ = 0;
      return Status::Success;
    }
    ++current_;
  }
  current_ = 0;
  return Status::Failure;
}

Status ParallelNode::on_tick(TickContext& ctx) {
  const std::size_t n = children_.size();
  const std::size_t m = threshold();
  if (m == 0 || m > n) throw EngineFault("parallel node " + name() + " has an invalid threshold");
  finished_.resize(n, Status::Idle);
  std::size_t successes = 0, failures = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (finished_[i] == Status::Idle) {
      const Status s = children_[i]->tick(ctx);
      if (s != Status::Running) finished_[i] = s;
    }
    if (finished_[i] == Status::Success) ++successes;
    if (finished_[i] == Status::Failure) ++failures;
  }
  if (successes >= m) {
    finished_.clear();
    return Status::Success;
  }
  if (failures > n - m) {
    finished_.clear();
    return Status::Failure;
  }
  return Status::Running;
}

InverterNode::InverterNode(NodePtr child, std::string name) : TreeNode(std::move(name), NodeKind::Inverter) {
  children_.push_back(std::move(child));
}

Status InverterNode::on_tick(TickContext& ctx) {
  switch (children_.front()->tick(ctx)) {
    case Status::Success: return Status::Failure;
    case Status::Failure: return Status::Success;
    default: return Status::Running;
  }
}

Status ConditionNode::on_tick(TickContext& ctx) { return predicate_(ctx) ? Status::Success : Status::Failure; }

Status ActionNode::on_tick(TickContext& ctx) { return body_(ctx); }

namespace {

const StageAllocation& read_allocation(const TickContext& ctx, const PortMap& ports) {
  if (!ctx.blackboard) throw EngineFault("tick context has no blackboard");
  return ctx.blackboard->get<StageAllocation>(ports.key("allocation"));
}

const Worker& allocated_worker(const TickContext& ctx, const PortMap& ports, const ActionId& action) {
  const auto& allocation = read_allocation(ctx, ports);
  auto it = allocation.worker_of.find(action);
  if (it == allocation.worker_of.end()) throw EngineFault("action " + action + " is missing from the allocation");
  const Worker* worker = ctx.job->find_worker(it->second);
  if (!worker) throw EngineFault("allocation names unknown worker " + it->second);
  return *worker;
}

}  // namespace

RoleAllocatorNode::RoleAllocatorNode(std::string name, std::vector<ActionId> actions, std::string output_key)
    : ControlNode(std::move(name), NodeKind::RoleAllocator), actions_(std::move(actions)), pending_(actions_) {
  ports_.bind("allocation", std::move(output_key));
}

bool RoleAllocatorNode::allocate(TickContext& ctx) {
  std::map<WorkerId, alloc::WorkerState> states;
  for (const auto& w : ctx.job->workers) {
    states[w.id] = ctx.blackboard->get<alloc::WorkerState>(availability_key(w.id));
  }
  const double now = ctx.clock->now();

  AllocationRecord record;
  record.allocator = name();
  record.sim_time = now;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    record.problem = alloc::build_problem(pending_, *ctx.job, states, ctx.mode, now);
    record.assignment = ctx.allocator(record.problem);
  } catch (const alloc::AllocationError& e) {
    if (ctx.trace) {
      ctx.trace->diagnostics.push_back(name() + " at t=" + format_number(now) + ": " + e.what());
    }
    return false;
  }
  record.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  record.pairs = record.assignment.named(record.problem);
  if (record.pairs.empty()) throw EngineFault(name() + ": allocator returned no pairs for pending actions");

  for (const auto& [worker, action] : record.pairs) {
    auto it = std::find(pending_.begin(), pending_.end(), action);
    if (it == pending_.end()) throw EngineFault(name() + ": allocator returned non-pending action " + action);
    pending_.erase(it);
    allocation_.worker_of[action] = worker;
  }
  ctx.blackboard->set(ports_.key("allocation"), allocation_);
  ++rounds_;
  if (ctx.trace) ctx.trace->allocations.push_back(std::move(record));
  return true;
}

Status RoleAllocatorNode::on_tick(TickContext& ctx) {
  if (!executed_.empty() && executed_.size() == children_.size()) return Status::Success;

  if (!pending_.empty() && !allocate(ctx)) {
    executed_.clear();
    return Status::Failure;
  }

  for (std::size_t idx = 0; idx < children_.size(); ++idx) {
    if (executed_.count(idx) || !allocation_.worker_of.count(actions_[idx])) continue;
    // A child that already started is resumed by this tick; its leaves never
    // restart a primitive.
    const Status s = children_[idx]->tick(ctx);
    executing_.insert(idx);
    if (s == Status::Failure) {
      executed_.clear();
      return Status::Failure;
    }
    if (s == Status::Success) {
      executed_.insert(idx);
      executing_.erase(idx);
      if (executed_.size() == children_.size()) return Status::Success;
    }
  }
  return Status::Running;
}

AgentHandlerNode::AgentHandlerNode(ActionId action, std::string allocation_key)
    : TreeNode("AgentHandler(" + action + ")", NodeKind::AgentHandler), action_(std::move(action)) {
  ports_.bind("allocation", std::move(allocation_key));
}

Status AgentHandlerNode::on_tick(TickContext& ctx) {
  const Worker& worker = allocated_worker(ctx, ports_, action_);
  return worker.kind == WorkerKind::Human ? Status::Failure : Status::Success;
}

ExecutionNode::ExecutionNode(std::string name, NodeKind kind, ActionId action, std::string allocation_key)
    : TreeNode(std::move(name), kind), action_(std::move(action)) {
  ports_.bind("allocation", std::move(allocation_key));
}

Status ExecutionNode::on_tick(TickContext& ctx) {
  switch (phase_) {
    case Phase::Done: return Status::Success;
    case Phase::Failed: return Status::Failure;
    case Phase::Executing: return Status::Running;
    case Phase::NotStarted:
    case Phase::Waiting: break;
  }
  const Worker& worker = allocated_worker(ctx, ports_, action_);
  if (phase_ == Phase::NotStarted) {
    if (!on_assigned(ctx, worker)) {
      phase_ = Phase::Failed;
      return Status::Failure;
    }
    phase_ = Phase::Waiting;
  }
  if (ctx.blackboard->get<alloc::WorkerState>(availability_key(worker.id)).busy) return Status::Running;
  start(ctx, worker);
  return Status::Running;
}

void ExecutionNode::start(TickContext& ctx, const Worker& worker) {
  const double now = ctx.clock->now();
  const double duration = worker.duration(action_);
  const std::string key = availability_key(worker.id);
  ctx.blackboard->set(key, alloc::WorkerState{true, action_, now, duration});
  phase_ = Phase::Executing;

  const bool fails = ctx.failing_actions.count(action_) != 0;
  Blackboard* blackboard = ctx.blackboard;
  SimTrace* trace = ctx.trace;
  ctx.clock->schedule(now + duration, [this, blackboard, trace, key, worker_id = worker.id, now, fails](double end) {
    blackboard->set(key, alloc::WorkerState{});
    phase_ = fails ? Phase::Failed : Phase::Done;
    if (trace) trace->executions.push_back(ExecutionRecord{action_, worker_id, now, end, !fails});
  });
}

RobotActionNode::RobotActionNode(ActionId action, std::string allocation_key)
    : ExecutionNode("RobotAction(" + action + ")", NodeKind::RobotAction, std::move(action), std::move(allocation_key)) {}

bool RobotActionNode::on_assigned(TickContext&, const Worker& worker) {
  if (worker.kind != WorkerKind::Robot) throw EngineFault("robot action " + action() + " routed to human " + worker.id);
  return true;
}

HumanCommunicationNode::HumanCommunicationNode(ActionId action, std::string allocation_key)
    : ExecutionNode("HumanCommunication(" + action + ")", NodeKind::HumanCommunication, std::move(action),
                    std::move(allocation_key)) {}

bool HumanCommunicationNode::on_assigned(TickContext& ctx, const Worker& worker) {
  if (worker.kind != WorkerKind::Human) {
    throw EngineFault("human communication for " + action() + " routed to robot " + worker.id);
  }
  const ActionSpec* spec = ctx.job->find_action(action());
  if (!spec) throw EngineFault("unknown action " + action());
  CommEvent event{ctx.clock->now(), worker.id, action(), spec->primitive, spec->params};
  if (!ctx.sink || !ctx.sink->deliver(event)) {
    if (ctx.trace) {
      ctx.trace->diagnostics.push_back("message sink unavailable for " + event.instruction());
    }
    return false;
  }
  if (ctx.trace) ctx.trace->comms.push_back(std::move(event));
  return true;
}

NodePtr assemble_pah(const std::function<NodePtr()>& make_handler, NodePtr human_branch, NodePtr robot_branch,
                     const std::string& name) {
  auto human_gate = std::make_unique<FallbackNode>(name + "/human_gate");
  human_gate->add_child(make_handler());
  human_gate->add_child(std::make_unique<InverterNode>(std::move(human_branch), name + "/human_invert"));

  auto robot_sequence = std::make_unique<SequenceNode>(name + "/robot_sequence");
  robot_sequence->add_child(make_handler());
  robot_sequence->add_child(std::move(robot_branch));

  auto root = std::make_unique<FallbackNode>(name);
  root->add_child(std::make_unique<InverterNode>(std::move(human_gate), name + "/gate_invert"));
  root->add_child(std::move(robot_sequence));
  return root;
}

NodePtr build_pah_subtree(const ActionSpec& action, const std::string& allocation_key) {
  return assemble_pah([&] { return std::make_unique<AgentHandlerNode>(action.id, allocation_key); },
                      std::make_unique<HumanCommunicationNode>(action.id, allocation_key),
                      std::make_unique<RobotActionNode>(action.id, allocation_key), "PAH(" + action.id + ")");
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : "; ") + item;
  return out;
}

using ActionIndex = std::map<std::string_view, const ActionSpec*>;

NodePtr compile(const ActionIndex& index, const PlanNode& node, std::size_t& allocator_count) {
  switch (node.kind) {
    case PlanKind::Allocate: {
      const std::size_t k = allocator_count++;
      const std::string key = "allocation/" + std::to_string(k);
      auto allocator = std::make_unique<RoleAllocatorNode>("RoleAllocator#" + std::to_string(k), node.actions, key);
      for (const auto& id : node.actions) allocator->add_child(build_pah_subtree(*index.at(id), key));
      return allocator;
    }
    case PlanKind::Sequence: {
      auto seq = std::make_unique<SequenceNode>();
      for (const auto& child : node.children) seq->add_child(compile(index, child, allocator_count));
      return seq;
    }
    case PlanKind::Parallel: {
      auto par = std::make_unique<ParallelNode>("Parallel", node.parallel_threshold);
      for (const auto& child : node.children) par->add_child(compile(index, child, allocator_count));
      return par;
    }
  }
  throw EngineFault("unknown plan node kind");
}

void collect(const TreeNode& node, std::vector<const TreeNode*>& out) {
  out.push_back(&node);
  for (const auto& child : node.children()) collect(*child, out);
}

}  // namespace

TreeBuildError::TreeBuildError(std::vector<std::string> violations)
    : std::invalid_argument("invalid job: " + join(violations)), violations_(std::move(violations)) {}

NodePtr build_tree(const JobSpec& spec) {
  auto violations = validate_job(spec);
  if (!violations.empty()) throw TreeBuildError(std::move(violations));
  ActionIndex index;
  for (const auto& a : spec.actions) index.emplace(a.id, &a);
  std::size_t allocators = 0;
  return compile(index, spec.plan, allocators);
}

std::vector<const TreeNode*> flatten(const TreeNode& root) {
  std::vector<const TreeNode*> out;
  collect(root, out);
  return out;
}

}  // namespace mata::bt
