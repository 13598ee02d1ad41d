#include "mata/clock.hpp"

#include <stdexcept>
#include <string>

namespace mata::sim {

void SimClock::schedule(double at, Callback callback) {
  if (at < now_) {
    throw std::invalid_argument("cannot schedule an event in the past (" + std::to_string(at) + " < " +
                                std::to_string(now_) + ")");
  }
  queue_.push(Event{at, next_seq_++, std::move(callback)});
}

std::size_t SimClock::dispatch_next_batch() {
  if (queue_.empty()) return 0;
  const double at = queue_.top().time;
  now_ = at;
  std::size_t fired = 0;
  // Callbacks may schedule more events; only those due at `at` join this batch.
  while (!queue_.empty() && queue_.top().time == at) {
    Event event = queue_.top();
    queue_.pop();
    event.callback(now_);
    ++fired;
  }
  return fired;
}

}  // namespace mata::sim
