#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mata/alloc.hpp"
#include "mata/core.hpp"
#include "mata/trace.hpp"

namespace mata::io {

struct ParseResult {
  std::optional<JobSpec> job;
  std::vector<std::string> errors;

  bool ok() const { return job.has_value(); }
};

/// Reads a job file:
///
///   {
///     "workers": [{"id": "w_1", "type": "human"|"robot", "durations": {"a_1": 20, ...}}],
///     "actions": [{"id": "a_1", "primitive": "pick", "params": {...}}],
///     "costs":   {"w_1": {"a_1": 20, ...}},          optional, defaults to durations
///     "plan":    {"kind": "sequence"|"parallel", "children": [...], "threshold": M}
///              | {"kind": "allocate", "actions": ["a_1", ...]},
///     "budgets": {"w_1": 100}                         optional
///   }
///
/// A worker's capabilities are the keys of its durations. Syntax errors carry
/// line and column; schema errors name the offending field; a structurally
/// sound file is then checked with validate_job.
ParseResult parse_jobspec(std::string_view text);

/// Reads and parses a file; an unreadable file yields an error entry.
ParseResult load_jobspec(const std::string& path);

/// Canonical JSON for `job`, with costs always written out.
std::string serialize_jobspec(const JobSpec& job);

/// `action,worker,start,end`, one row per execution sorted by (start, action).
std::string emit_gantt_csv(const SimTrace& trace);

/// `action,<worker ids...>,worker_allocated`: cost per worker (blank when
/// incapable) and the allocated worker, one row per job action.
std::string emit_alloc_table(const JobSpec& job, const SimTrace& trace);

/// Deterministic event log: allocation rounds, COMM lines, starts/ends and
/// the final result. Wall-clock timings are left out.
std::string emit_trace_log(const SimTrace& trace);

/// JSON form of an allocation instance, used for oracle replay files.
std::string serialize_problem(const alloc::AllocationProblem& problem);
alloc::AllocationProblem parse_problem(std::string_view text);

/// Orders ids so that digit runs compare numerically ("a_2" < "a_10").
bool natural_less(std::string_view a, std::string_view b);

}  // namespace mata::io
