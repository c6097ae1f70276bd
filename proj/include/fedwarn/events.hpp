#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "fedwarn/errors.hpp"

namespace fedwarn::des {

enum class EventKind {
    DeviceTransmit,
    EndorseArrive,
    EndorseReturn,
    OrdererArrive,
    BlockCut,
    ValidateDone,
    ConfirmArrive,
    AggregationWindowClose,
    EpidemicStep,
};

struct EventPayload {
    std::uint64_t handle = 0;        // in-flight transaction index
    std::uint64_t leg = 0;           // endorsement leg within the contact group
    std::uint64_t device_index = 0;
    std::uint64_t message_index = 0;
    bool flagged = false;            // kind-specific marker (join / seed injection)
};

struct Event {
    double t = 0.0;
    std::uint64_t seq = 0; // schedule-order tie break
    EventKind kind = EventKind::DeviceTransmit;
    EventPayload payload;
};

/// Min-heap over (t, seq). seq increases per schedule() call, so equal-time
/// events come back in the order they were scheduled; the clock never runs
/// backwards.
class EventQueue {
  public:
    void schedule(double t, EventKind kind, EventPayload payload = {}) {
        if (t < now_) {
            throw CausalityViolation("event at t=" + std::to_string(t) +
                                     " scheduled before clock t=" + std::to_string(now_));
        }
        heap_.push(Event{t, next_seq_++, kind, std::move(payload)});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    double now() const { return now_; }

    Event next() {
        if (heap_.empty()) {
            throw Error("next() on an empty event queue");
        }
        Event e = heap_.top();
        heap_.pop();
        now_ = e.t;
        return e;
    }

  private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) {
                return a.t > b.t;
            }
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
};

} // namespace fedwarn::des
