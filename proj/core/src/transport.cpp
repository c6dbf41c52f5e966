#include "fairshare/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairshare {

namespace {

double clamp_rto(double rto) { return std::clamp(rto, kMinRtoS, kMaxRtoS); }

}  // namespace

TransportState transport_on_ack(TransportState st, std::uint64_t acked_bytes,
                                std::optional<double> rtt_sample_s) {
    if (acked_bytes == 0) {
        throw std::invalid_argument("transport_on_ack: acked_bytes must be positive");
    }

    if (rtt_sample_s) {
        double r = *rtt_sample_s;
        if (!st.have_rtt) {
            st.srtt_s = r;
            st.rttvar_s = r / 2.0;
            st.have_rtt = true;
        } else {
            st.rttvar_s = 0.75 * st.rttvar_s + 0.25 * std::abs(st.srtt_s - r);
            st.srtt_s = 0.875 * st.srtt_s + 0.125 * r;
        }
        st.rto_s = clamp_rto(st.srtt_s + 4.0 * st.rttvar_s);
    }

    double mss = static_cast<double>(kMssBytes);
    switch (st.mode) {
        case TransportMode::SlowStart:
            st.cwnd_bytes += std::min(static_cast<double>(acked_bytes), mss);
            if (st.cwnd_bytes >= st.ssthresh_bytes) {
                st.mode = TransportMode::CongestionAvoidance;
            }
            break;
        case TransportMode::CongestionAvoidance:
            st.cwnd_bytes += mss * mss / st.cwnd_bytes;
            break;
        case TransportMode::Recovery:
            break;  // the sender exits recovery explicitly
    }
    return st;
}

TransportState transport_on_loss(TransportState st, LossKind kind) {
    double mss = static_cast<double>(kMssBytes);
    st.ssthresh_bytes = std::max(st.cwnd_bytes / 2.0, 2.0 * mss);
    if (kind == LossKind::TripleDupack) {
        st.cwnd_bytes = st.ssthresh_bytes;
        st.mode = TransportMode::Recovery;
    } else {
        st.cwnd_bytes = mss;
        st.mode = TransportMode::SlowStart;
        st.rto_s = std::min(st.rto_s * 2.0, kMaxRtoS);
    }
    return st;
}

}  // namespace fairshare
