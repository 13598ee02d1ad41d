#pragma once

#include <set>

#include "mata/alloc.hpp"
#include "mata/bt.hpp"
#include "mata/core.hpp"
#include "mata/trace.hpp"

namespace mata::sim {

struct SimConfig {
  alloc::AvailabilityMode mode = alloc::AvailabilityMode::RemainingTime;
  bt::Allocator allocator = alloc::solve;
  // Receives human messages; an internal RecordingSink is used when null.
  MessageSink* sink = nullptr;
  // Test hook: primitives of these actions fail when they complete.
  std::set<ActionId> failing_actions;
};

/// Builds the tree for `spec` and runs it on a virtual clock: one tick at
/// t = 0, then one tick after each batch of completions sharing a timestamp,
/// until the root succeeds or fails. A failed run returns its partial trace
/// with `result == Status::Failure`.
///
/// Throws bt::TreeBuildError for an invalid job and EngineFault on engine
/// contract breaks.
SimTrace run_simulation(const JobSpec& spec, const SimConfig& config = {});

/// Latest end time over the executions; 0 for an empty trace.
double makespan(const SimTrace& trace);

}  // namespace mata::sim
