#include "mata/sim.hpp"

#include <algorithm>
#include <chrono>

#include "mata/blackboard.hpp"
#include "mata/clock.hpp"

namespace mata::sim {

double makespan(const SimTrace& trace) {
  double end = 0.0;
  for (const auto& e : trace.executions) end = std::max(end, e.end);
  return end;
}

SimTrace run_simulation(const JobSpec& spec, const SimConfig& config) {
  SimTrace trace;
  const auto t0 = std::chrono::steady_clock::now();
  bt::NodePtr root = bt::build_tree(spec);
  trace.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Blackboard blackboard;
  for (const auto& w : spec.workers) blackboard.set(availability_key(w.id), alloc::WorkerState{});

  SimClock clock;
  RecordingSink default_sink;
  bt::TickContext ctx;
  ctx.job = &spec;
  ctx.blackboard = &blackboard;
  ctx.clock = &clock;
  ctx.allocator = config.allocator;
  ctx.mode = config.mode;
  ctx.sink = config.sink ? config.sink : &default_sink;
  ctx.trace = &trace;
  ctx.failing_actions = config.failing_actions;

  Status status = root->tick(ctx);
  while (status == Status::Running) {
    if (clock.dispatch_next_batch() == 0) {
      trace.diagnostics.push_back("tree still running with no pending events at t=" + format_number(clock.now()));
      status = Status::Failure;
      break;
    }
    status = root->tick(ctx);
  }
  // Completion callbacks capture tree nodes; drop them before the tree goes away.
  clock.clear();

  trace.result = status;
  trace.makespan = makespan(trace);
  return trace;
}

}  // namespace mata::sim
