#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mata {

using ActionId = std::string;
using WorkerId = std::string;

enum class WorkerKind { Human, Robot };

std::string_view to_string(WorkerKind kind);

/// A team member. `durations` holds the nominal execution time in seconds
/// for every action the worker can perform.
struct Worker {
  WorkerId id;
  WorkerKind kind = WorkerKind::Robot;
  std::set<ActionId> capabilities;
  std::map<ActionId, double> durations;

  bool can_execute(const ActionId& action) const { return capabilities.count(action) != 0; }
  /// Throws std::out_of_range when the worker has no duration for `action`.
  double duration(const ActionId& action) const;
};

/// One job step. `params` are opaque primitive arguments, each value kept as
/// JSON text so the primitive interface can carry any scalar or structure.
struct ActionSpec {
  ActionId id;
  std::string primitive;
  std::map<std::string, std::string> params;
};

enum class PlanKind { Sequence, Parallel, Allocate };

std::string_view to_string(PlanKind kind);

struct PlanNode {
  PlanKind kind = PlanKind::Allocate;
  std::vector<PlanNode> children;
  std::vector<ActionId> actions;
  // Success threshold of a Parallel node; all children when unset.
  std::optional<std::size_t> parallel_threshold;

  static PlanNode sequence(std::vector<PlanNode> children);
  static PlanNode parallel(std::vector<PlanNode> children,
                           std::optional<std::size_t> threshold = std::nullopt);
  static PlanNode allocate(std::vector<ActionId> actions);

  std::size_t effective_threshold() const {
    return parallel_threshold.value_or(children.size());
  }
};

struct JobSpec {
  std::vector<ActionSpec> actions;
  std::vector<Worker> workers;
  PlanNode plan;
  std::map<std::pair<WorkerId, ActionId>, double> costs;
  // Per-worker time budget in seconds; absent workers are unconstrained.
  std::map<WorkerId, double> budgets;

  const Worker* find_worker(std::string_view id) const;
  const ActionSpec* find_action(std::string_view id) const;
  std::optional<double> cost(const WorkerId& worker, const ActionId& action) const;
};

enum class Status { Idle, Running, Success, Failure };

std::string_view to_string(Status status);

/// Every invariant violation of `spec`, in a stable order. Empty means the
/// job can be compiled into a tree and simulated.
std::vector<std::string> validate_job(const JobSpec& spec);

/// Shortest round-trip decimal form of `value`, locale independent
/// ("30", "4.5", "0.1").
std::string format_number(double value);

/// Action ids of every Allocate node in depth-first plan order.
std::vector<std::vector<ActionId>> allocate_stages(const PlanNode& plan);

}  // namespace mata
