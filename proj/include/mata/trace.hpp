#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mata/alloc.hpp"
#include "mata/core.hpp"

namespace mata {

/// One allocator invocation: the set W -> A it produced.
struct AllocationRecord {
  std::string allocator;  // name of the RoleAllocator node
  double sim_time = 0.0;
  double solve_seconds = 0.0;  // wall clock of problem assembly + solve
  std::vector<std::pair<WorkerId, ActionId>> pairs;
  alloc::AllocationProblem problem;
  alloc::Assignment assignment;
};

struct ExecutionRecord {
  ActionId action;
  WorkerId worker;
  double start = 0.0;
  double end = 0.0;
  bool succeeded = true;
};

struct CommEvent {
  double sim_time = 0.0;
  WorkerId worker;
  ActionId action;
  std::string primitive;
  std::map<std::string, std::string> params;

  /// `COMM <sim_time> <worker_id> <action_id> <primitive>`
  std::string log_line() const;
  /// Human-facing instruction, e.g. "w_2: execute a_1".
  std::string instruction() const;
};

/// Where HumanCommunication nodes deliver their messages. Only the engine
/// thread calls deliver().
class MessageSink {
 public:
  virtual ~MessageSink() = default;
  /// False when the channel is unavailable.
  virtual bool deliver(const CommEvent& event) = 0;
};

/// Accepts every message while open and keeps a copy.
class RecordingSink : public MessageSink {
 public:
  bool deliver(const CommEvent& event) override;
  void close() { open_ = false; }
  const std::vector<CommEvent>& events() const { return events_; }

 private:
  bool open_ = true;
  std::vector<CommEvent> events_;
};

/// Everything observable about one simulated run; the Gantt source.
struct SimTrace {
  std::vector<AllocationRecord> allocations;
  std::vector<ExecutionRecord> executions;
  std::vector<CommEvent> comms;
  std::vector<std::string> diagnostics;
  Status result = Status::Idle;
  double makespan = 0.0;
  double build_seconds = 0.0;  // wall clock of tree construction

  bool succeeded() const { return result == Status::Success; }
  /// Execution of `action`, if it ran.
  const ExecutionRecord* execution_of(const ActionId& action) const;
  /// Worker the allocator picked for `action`, if any.
  std::optional<WorkerId> allocated_worker(const ActionId& action) const;
  /// Wall clock of tree construction plus every allocator solve.
  double planning_seconds() const;
};

}  // namespace mata
