#include "mata/core.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mata {

std::string_view to_string(WorkerKind kind) {
  return kind == WorkerKind::Human ? "human" : "robot";
}

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::Sequence: return "sequence";
    case PlanKind::Parallel: return "parallel";
    case PlanKind::Allocate: return "allocate";
  }
  return "?";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Idle: return "IDLE";
    case Status::Running: return "RUNNING";
    case Status::Success: return "SUCCESS";
    case Status::Failure: return "FAILURE";
  }
  return "?";
}

double Worker::duration(const ActionId& action) const {
  auto it = durations.find(action);
  if (it == durations.end()) {
    throw std::out_of_range("worker " + id + " has no duration for " + action);
  }
  return it->second;
}

PlanNode PlanNode::sequence(std::vector<PlanNode> children) {
  PlanNode n;
  n.kind = PlanKind::Sequence;
  n.children = std::move(children);
  return n;
}

PlanNode PlanNode::parallel(std::vector<PlanNode> children, std::optional<std::size_t> threshold) {
  PlanNode n;
  n.kind = PlanKind::Parallel;
  n.children = std::move(children);
  n.parallel_threshold = threshold;
  return n;
}

PlanNode PlanNode::allocate(std::vector<ActionId> actions) {
  PlanNode n;
  n.kind = PlanKind::Allocate;
  n.actions = std::move(actions);
  return n;
}

const Worker* JobSpec::find_worker(std::string_view id) const {
  for (const auto& w : workers) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

const ActionSpec* JobSpec::find_action(std::string_view id) const {
  for (const auto& a : actions) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

std::optional<double> JobSpec::cost(const WorkerId& worker, const ActionId& action) const {
  auto it = costs.find({worker, action});
  if (it == costs.end()) return std::nullopt;
  return it->second;
}

namespace {

void collect_stages(const PlanNode& node, std::vector<std::vector<ActionId>>& out) {
  if (node.kind == PlanKind::Allocate) {
    out.push_back(node.actions);
    return;
  }
  for (const auto& child : node.children) collect_stages(child, out);
}

void check_plan(const PlanNode& node, const std::string& path, std::vector<std::string>& out) {
  if (node.kind == PlanKind::Allocate) {
    if (node.actions.empty()) out.push_back("plan node " + path + " allocates no actions");
    if (!node.children.empty()) out.push_back("plan node " + path + " is an allocate node with children");
    return;
  }
  if (node.children.empty()) {
    out.push_back("plan node " + path + " (" + std::string(to_string(node.kind)) + ") has no children");
  }
  if (!node.actions.empty()) {
    out.push_back("plan node " + path + " lists actions but is not an allocate node");
  }
  if (node.kind == PlanKind::Parallel && node.parallel_threshold) {
    auto m = *node.parallel_threshold;
    if (m == 0 || m > node.children.size()) {
      out.push_back("plan node " + path + " has parallel threshold " + std::to_string(m) +
                    " outside 1.." + std::to_string(node.children.size()));
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    check_plan(node.children[i], path + "/" + std::to_string(i), out);
  }
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::vector<std::vector<ActionId>> allocate_stages(const PlanNode& plan) {
  std::vector<std::vector<ActionId>> out;
  collect_stages(plan, out);
  return out;
}

std::vector<std::string> validate_job(const JobSpec& spec) {
  std::vector<std::string> out;

  std::set<ActionId> action_ids;
  for (const auto& a : spec.actions) {
    if (a.id.empty()) out.push_back("action with empty id");
    if (!action_ids.insert(a.id).second) out.push_back("duplicate action id " + a.id);
  }

  std::set<WorkerId> worker_ids;
  for (const auto& w : spec.workers) {
    if (w.id.empty()) out.push_back("worker with empty id");
    if (!worker_ids.insert(w.id).second) out.push_back("duplicate worker id " + w.id);
    for (const auto& [action, duration] : w.durations) {
      if (!w.can_execute(action)) {
        out.push_back("worker " + w.id + " has a duration for " + action + " outside its capabilities");
      }
      if (!(duration > 0.0) || !std::isfinite(duration)) {
        out.push_back("worker " + w.id + " has non-positive duration for " + action);
      }
    }
    for (const auto& action : w.capabilities) {
      if (!action_ids.count(action)) {
        out.push_back("worker " + w.id + " lists unknown action " + action);
      } else if (!w.durations.count(action)) {
        out.push_back("worker " + w.id + " has no duration for capable action " + action);
      }
    }
  }

  for (const auto& a : spec.actions) {
    bool capable = false;
    for (const auto& w : spec.workers) capable = capable || w.can_execute(a.id);
    if (!capable) out.push_back("action " + a.id + " has no capable worker");
  }

  for (const auto& [key, value] : spec.costs) {
    const auto& [worker, action] = key;
    const Worker* w = spec.find_worker(worker);
    if (!w) {
      out.push_back("cost defined for unknown worker " + worker);
    } else if (!w->can_execute(action)) {
      out.push_back("cost defined for " + worker + "/" + action + " but the worker is not capable");
    }
    if (!(value >= 0.0) || !std::isfinite(value)) {
      out.push_back("cost for " + worker + "/" + action + " must be finite and non-negative");
    }
  }
  for (const auto& w : spec.workers) {
    for (const auto& action : w.capabilities) {
      if (!spec.costs.count({w.id, action})) {
        out.push_back("missing cost for " + w.id + "/" + action);
      }
    }
  }

  for (const auto& [worker, budget] : spec.budgets) {
    if (!worker_ids.count(worker)) out.push_back("budget defined for unknown worker " + worker);
    if (!(budget > 0.0)) out.push_back("budget for " + worker + " must be positive");
  }

  check_plan(spec.plan, "root", out);

  std::map<ActionId, int> occurrences;
  for (const auto& stage : allocate_stages(spec.plan)) {
    for (const auto& action : stage) ++occurrences[action];
  }
  for (const auto& [action, count] : occurrences) {
    if (!action_ids.count(action)) out.push_back("plan references unknown action " + action);
    if (count > 1) out.push_back(action + " assigned to multiple plan nodes");
  }
  for (const auto& a : spec.actions) {
    if (!occurrences.count(a.id)) out.push_back("action " + a.id + " is not part of the plan");
  }
  return out;
}

}  // namespace mata
