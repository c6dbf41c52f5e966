#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "fairshare/packet.hpp"
#include "fairshare/rng.hpp"

namespace fairshare {

enum class SchedPolicy : std::uint8_t { DropTail, Red, Codel, Srr, Pq, Upnq, Hpss, Cbq };

const char* to_string(SchedPolicy p);
SchedPolicy sched_policy_from_string(const std::string& name);  // throws, lists valid names

enum class DropReason : std::uint8_t {
    QueueFull = 0,
    RedProbabilistic,
    UpnqThreshold,
    HpssRegulation,
    CodelTarget,
};
constexpr std::size_t kDropReasonCount = 5;
const char* to_string(DropReason r);

struct SchedulerConfig {
    SchedPolicy policy = SchedPolicy::DropTail;
    std::uint64_t queue_cap_bytes = 60'000;  // per class queue byte budget
    double capacity_up_bps = 1e6;

    double target_delay_ms = 5.0;  // RED thresholds and CoDel target
    double red_wq = 0.002;
    double red_max_p = 0.1;
    double codel_interval_ms = 100.0;
    double upnq_threshold = 0.80;
    double hpss_target_impact_ms = 3.0;
    double hpss_capacity_threshold_mbps = 2.0;
    double hpss_share_pct_per_mbps = 0.5;
    double hpss_guest_share_pct = 0.0;  // > 0 pins the wfq guest share directly
    double cbq_home_weight = 0.95;
    std::uint64_t seed = 42;  // probabilistic droppers get their own stream

    void validate() const;  // throws std::invalid_argument
};

struct ClassCounters {
    std::uint64_t offered_packets = 0, offered_payload = 0, offered_wire = 0;
    std::uint64_t served_packets = 0, served_payload = 0, served_wire = 0;
    std::uint64_t dropped_packets = 0, dropped_payload = 0, dropped_wire = 0;
    std::uint64_t resident_packets = 0, resident_payload = 0, resident_wire = 0;
    double delay_sum_s = 0.0;
    double delay_max_s = 0.0;
    std::uint64_t delay_samples = 0;

    double mean_delay_ms() const {
        return delay_samples == 0 ? 0.0 : delay_sum_s / static_cast<double>(delay_samples) * 1e3;
    }
};

struct SchedStats {
    std::array<ClassCounters, 2> per_class;
    std::array<std::uint64_t, kDropReasonCount> drops_by_reason{};

    ClassCounters& of(TrafficClass c) { return per_class[static_cast<std::size_t>(c)]; }
    const ClassCounters& of(TrafficClass c) const { return per_class[static_cast<std::size_t>(c)]; }
};

struct EnqueueOutcome {
    bool admitted = false;
    DropReason reason = DropReason::QueueFull;
};

// One uplink packet scheduler. Service is non-preemptive: the caller asks
// for the next packet only when the link is idle.
class Scheduler {
public:
    explicit Scheduler(const SchedulerConfig& cfg) : cfg_(cfg) {}
    virtual ~Scheduler() = default;

    EnqueueOutcome enqueue(Packet pkt, double now);
    std::optional<Packet> dequeue(double now);
    virtual bool empty() const = 0;

    const SchedStats& stats() const { return stats_; }
    const SchedulerConfig& config() const { return cfg_; }

    static std::unique_ptr<Scheduler> make(const SchedulerConfig& cfg);

protected:
    virtual EnqueueOutcome do_enqueue(Packet&& pkt, double now) = 0;
    virtual std::optional<Packet> do_dequeue(double now) = 0;

    void count_drop(const Packet& pkt, DropReason reason, bool was_resident);

    SchedulerConfig cfg_;
    SchedStats stats_;
};

// ---- policy building blocks, exposed for direct testing ----

struct RedParams {
    double min_th_bytes = 0.0;
    double max_th_bytes = 0.0;
    double max_p = 0.1;
};

RedParams red_thresholds(double target_delay_ms, double capacity_up_bps, double max_p);

// 0 below min_th, max_p-scaled linear ramp between the thresholds, 1 above.
double red_drop_probability(double avg_queue_bytes, const RedParams& params);

bool red_admit(double avg_queue_bytes, const RedParams& params, RngStream& rng);

// CoDel control law over successive head packets. The caller pops heads and
// asks for a verdict per head; drops loop until a head is served.
class CodelControl {
public:
    enum class Verdict { Serve, DropHead };

    CodelControl(double target_s, double interval_s)
        : target_(target_s), interval_(interval_s) {}

    Verdict on_head(double sojourn_s, double now, bool queue_almost_empty);

    bool dropping() const { return dropping_; }
    std::uint32_t drop_count() const { return count_; }
    double drop_next() const { return drop_next_; }

private:
    double target_;
    double interval_;
    double first_above_ = 0.0;
    double drop_next_ = 0.0;
    std::uint32_t count_ = 0;
    std::uint32_t lastcount_ = 0;
    bool dropping_ = false;
};

// Two-class weighted fair queueing by virtual finish times. Byte shares of
// saturated classes converge to the weights; an idle class accrues no credit.
class WfqSelector {
public:
    WfqSelector(double home_weight, double guest_weight);

    void on_backlogged(TrafficClass c);  // call when a class goes empty -> nonempty
    TrafficClass select(bool home_backlogged, std::uint64_t home_head_wire,
                        bool guest_backlogged, std::uint64_t guest_head_wire) const;
    void on_serve(TrafficClass c, std::uint64_t wire_bytes);

private:
    std::array<double, 2> weight_;
    std::array<double, 2> finish_{0.0, 0.0};
    double vtime_ = 0.0;
};

enum class HpssMode : std::uint8_t { PqMode, WfqMode };
const char* to_string(HpssMode m);

// Capacity at or above the threshold runs class-based WFQ; below it runs
// regulated priority queueing.
HpssMode hpss_select_mode(double capacity_up_mbps, double threshold_mbps);

// Guest share of the uplink in percent for wfq-mode: pct_per_mbps per Mbps.
// Calling this for a capacity below the mode threshold is a logic error.
double hpss_guest_share_pct(double capacity_up_mbps, double pct_per_mbps = 0.5,
                            double threshold_mbps = 2.0);

// Rolling-window bookkeeping for the pq-mode guest admission rule: tracks,
// per home packet served in the last window, how much guest transmission
// time it sat behind.
class HpssImpactTracker {
public:
    explicit HpssImpactTracker(double window_s = 1.0) : window_s_(window_s) {}

    double guest_busy() const { return guest_busy_; }
    void on_guest_service(double tx_s) { guest_busy_ += tx_s; }
    void on_home_dequeue(double now, double guest_busy_at_enqueue);

    bool window_empty(double now);
    double mean_impact_s(double now);

private:
    void prune(double now);

    double window_s_;
    double guest_busy_ = 0.0;
    double impact_sum_ = 0.0;
    std::deque<std::pair<double, double>> window_;  // (dequeue time, impact)
};

}  // namespace fairshare
