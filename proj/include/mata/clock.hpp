#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace mata::sim {

/// Virtual time source with a queue of timed callbacks. Events fire in
/// (time, insertion order); time never decreases.
class SimClock {
 public:
  using Callback = std::function<void(double now)>;

  double now() const { return now_; }
  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }

  /// Throws std::invalid_argument for a time earlier than now().
  void schedule(double at, Callback callback);

  /// Advances to the earliest pending time and fires every event due then.
  /// Returns the number of events dispatched (0 when the queue is empty).
  std::size_t dispatch_next_batch();

  void clear() { queue_ = {}; }

 private:
  struct Event {
    double time;
    std::uint64_t seq;
    Callback callback;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace mata::sim
