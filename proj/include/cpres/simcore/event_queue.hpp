#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "cpres/errors.hpp"

namespace cpres {

/// Time-ordered event queue with FIFO tie-breaking for simultaneous events.
/// Times are simulated seconds; the clock advances monotonically as events
/// are dequeued.
template <class Payload>
class EventQueue {
 public:
  using EventId = std::uint64_t;

  /// Schedules an event at `time`. Throws PastTime if `time` precedes the
  /// current clock.
  EventId schedule(Payload event, double time) {
    if (time < clock_) {
      throw PastTime("schedule: time " + std::to_string(time) +
                     " precedes clock " + std::to_string(clock_));
    }
    const EventId id = next_seq_++;
    heap_.push(Entry{time, id, std::move(event)});
    return id;
  }

  /// Pops the earliest event (insertion order among ties) and advances the
  /// clock to its timestamp. Returns nullopt when the queue is exhausted.
  std::optional<std::pair<double, Payload>> advance() {
    if (heap_.empty()) return std::nullopt;
    Entry e = heap_.top();
    heap_.pop();
    clock_ = e.time;
    return std::make_pair(e.time, std::move(e.payload));
  }

  std::optional<double> peek_time() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.top().time;
  }

  double clock() const { return clock_; }
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

  /// Advances the clock without consuming events (no event may precede it).
  void set_clock(double t) {
    if (t < clock_) throw PastTime("set_clock: cannot move clock backwards");
    clock_ = t;
  }

 private:
  struct Entry {
    double time;
    EventId seq;
    Payload payload;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  double clock_ = 0.0;
  EventId next_seq_ = 0;
};

}  // namespace cpres
