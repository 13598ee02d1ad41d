#include "mata/trace.hpp"

namespace mata {

std::string CommEvent::log_line() const {
  return "COMM " + format_number(sim_time) + " " + worker + " " + action + " " + primitive;
}

std::string CommEvent::instruction() const { return worker + ": execute " + action; }

bool RecordingSink::deliver(const CommEvent& event) {
  if (!open_) return false;
  events_.push_back(event);
  return true;
}

const ExecutionRecord* SimTrace::execution_of(const ActionId& action) const {
  for (const auto& e : executions) {
    if (e.action == action) return &e;
  }
  return nullptr;
}

std::optional<WorkerId> SimTrace::allocated_worker(const ActionId& action) const {
  for (const auto& record : allocations) {
    for (const auto& [worker, a] : record.pairs) {
      if (a == action) return worker;
    }
  }
  return std::nullopt;
}

double SimTrace::planning_seconds() const {
  double total = build_seconds;
  for (const auto& record : allocations) total += record.solve_seconds;
  return total;
}

}  // namespace mata
