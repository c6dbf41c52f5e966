#pragma once

#include <string>

namespace fairshare {

enum class Direction : std::uint8_t { Down, Up };

// Last-mile latency triple from a gateway: unloaded RTT plus the loaded
// RTTs with a saturating download / upload running in the background.
struct LatencyMeasurement {
    double lmrtt_ms = 0.0;
    double ulrttdw_ms = 0.0;
    double ulrttup_ms = 0.0;

    void validate() const;  // throws std::invalid_argument
};

// Per-direction capacity and queue size of one gateway. KB means 1000 bytes.
struct AccessPointProfile {
    std::string name;
    double capacity_dw_mbps = 0.0;
    double capacity_up_mbps = 0.0;
    double queue_dw_kb = 0.0;
    double queue_up_kb = 0.0;

    void validate() const;

    double capacity_up_bps() const { return capacity_up_mbps * 1e6; }
    double capacity_dw_bps() const { return capacity_dw_mbps * 1e6; }
    std::uint64_t queue_up_bytes() const { return static_cast<std::uint64_t>(queue_up_kb * 1000.0); }
    std::uint64_t queue_dw_bytes() const { return static_cast<std::uint64_t>(queue_dw_kb * 1000.0); }
};

// Queue capacity inferred from the loaded-minus-unloaded RTT delta and the
// link capacity, in KB.
double buffering_effect_kb(const LatencyMeasurement& meas, double capacity_mbps, Direction dir);

// Built-in gateway profiles AP1 (fiber) and AP8 (ADSL). Unknown names throw
// with the list of available presets. Every field can be overridden in the
// scenario file.
AccessPointProfile preset(const std::string& name);

}  // namespace fairshare
