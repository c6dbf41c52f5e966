#include "fairshare/apmodel.hpp"

#include <stdexcept>

namespace fairshare {

void LatencyMeasurement::validate() const {
    if (!(lmrtt_ms > 0.0) || !(ulrttdw_ms > 0.0) || !(ulrttup_ms > 0.0)) {
        throw std::invalid_argument("latency measurement: all RTTs must be positive");
    }
    if (ulrttdw_ms < lmrtt_ms || ulrttup_ms < lmrtt_ms) {
        throw std::invalid_argument("latency measurement: loaded RTT below unloaded RTT");
    }
}

void AccessPointProfile::validate() const {
    if (!(capacity_dw_mbps > 0.0) || !(capacity_up_mbps > 0.0)) {
        throw std::invalid_argument("access point '" + name + "': capacities must be positive");
    }
    if (!(queue_dw_kb > 0.0) || !(queue_up_kb > 0.0)) {
        throw std::invalid_argument("access point '" + name + "': queue sizes must be positive");
    }
}

double buffering_effect_kb(const LatencyMeasurement& meas, double capacity_mbps, Direction dir) {
    meas.validate();
    if (!(capacity_mbps > 0.0)) {
        throw std::invalid_argument("buffering_effect: capacity must be positive");
    }
    double loaded_ms = dir == Direction::Down ? meas.ulrttdw_ms : meas.ulrttup_ms;
    double delta_s = (loaded_ms - meas.lmrtt_ms) / 1000.0;
    double bytes = delta_s * capacity_mbps * 1e6 / 8.0;
    return bytes / 1000.0;
}

AccessPointProfile preset(const std::string& name) {
    // Defaults stand in for the 90th-percentile queue sizing of the two
    // reference gateways: a fiber uplink and a medium-to-low ADSL uplink.
    if (name == "AP1") {
        return {"AP1", 50.0, 6.3, 1300.0, 120.0};
    }
    if (name == "AP8") {
        return {"AP8", 8.0, 1.0, 90.0, 60.0};
    }
    throw std::invalid_argument("unknown access point preset '" + name +
                                "' (available: AP1, AP8)");
}

}  // namespace fairshare
