#pragma once

#include <cstdint>
#include <optional>

#include "fairshare/packet.hpp"

namespace fairshare {

enum class TransportMode : std::uint8_t { SlowStart, CongestionAvoidance, Recovery };
enum class LossKind : std::uint8_t { TripleDupack, Timeout };

constexpr double kInitialCwndBytes = 2.0 * kMssBytes;
constexpr double kInitialSsthreshBytes = 64'000.0;
constexpr double kMinRtoS = 0.200;
constexpr double kMaxRtoS = 60.0;
constexpr double kInitialRtoS = 1.0;  // before the first RTT sample

// Window and timer state of one Reno-like sender.
struct TransportState {
    double cwnd_bytes = kInitialCwndBytes;
    double ssthresh_bytes = kInitialSsthreshBytes;
    TransportMode mode = TransportMode::SlowStart;
    double srtt_s = 0.0;
    double rttvar_s = 0.0;
    bool have_rtt = false;
    double rto_s = kInitialRtoS;
};

// Apply one cumulative ack: slow-start grows cwnd one MSS per MSS acked,
// congestion avoidance adds MSS^2/cwnd per ack. rtt_sample, when present,
// feeds the standard exponentially smoothed RTO estimator.
TransportState transport_on_ack(TransportState st, std::uint64_t acked_bytes,
                                std::optional<double> rtt_sample_s);

// Apply a loss event: triple-dupack halves the window, a timeout collapses
// it to one MSS and doubles the RTO (capped).
TransportState transport_on_loss(TransportState st, LossKind kind);

}  // namespace fairshare
