#pragma once

#include <cstdint>

namespace fairshare {

enum class TrafficClass : std::uint8_t { Home = 0, Guest = 1 };

constexpr const char* to_string(TrafficClass c) {
    return c == TrafficClass::Home ? "home" : "guest";
}

// One unit of transmission. Data packets carry a byte range of their flow;
// acks carry the receiver's cumulative ack in seq_end and ride the
// unqueued return path.
struct Packet {
    std::uint32_t flow_id = 0;
    TrafficClass cls = TrafficClass::Home;
    std::uint8_t profile_id = 0;   // guest profile that spawned the flow, 0 for home
    bool is_ack = false;
    bool retransmit = false;
    std::uint32_t payload_bytes = 0;
    std::uint32_t wire_bytes = 0;  // payload + header overhead
    std::uint64_t seq_begin = 0;   // [seq_begin, seq_end) for data, cum ack for acks
    std::uint64_t seq_end = 0;
    double created = 0.0;
    double enqueued = 0.0;
    double dequeued = 0.0;
};

constexpr std::uint32_t kMssBytes = 1460;
constexpr std::uint32_t kHeaderBytes = 40;

}  // namespace fairshare
