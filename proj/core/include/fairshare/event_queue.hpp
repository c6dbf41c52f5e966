#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "fairshare/packet.hpp"

namespace fairshare {

enum class EventKind : std::uint8_t {
    PacketArrival,      // a packet reaches a node (uplink queue, server, or sender ack path)
    ServiceCompletion,  // the uplink finished transmitting a packet
    AppTimer,           // application or transport timer
    FlowStart,          // a guest flow begins
    MeasurementTick,    // periodic throughput sampling
};

// Where a PacketArrival lands.
enum : std::uint32_t {
    kTargetUplink = 0,
    kTargetServer = 1,
    kTargetSender = 2,
};

struct SimEvent {
    double time = 0.0;
    std::uint64_t seq = 0;  // insertion counter; FIFO tie-break at equal times
    EventKind kind = EventKind::AppTimer;
    std::uint32_t target = 0;
    std::uint64_t aux = 0;
    Packet pkt;
};

// Min-heap on (time, seq). seq makes replay stable: two events at the same
// instant dispatch in insertion order.
class EventQueue {
public:
    void schedule(double now, SimEvent ev) {
        if (ev.time < now) {
            throw std::logic_error("event scheduled in the past");
        }
        ev.seq = next_seq_++;
        heap_.push(std::move(ev));
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    const SimEvent& top() const { return heap_.top(); }

    SimEvent pop() {
        SimEvent ev = heap_.top();
        heap_.pop();
        return ev;
    }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace fairshare
