#include "fairshare/scheduler.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace fairshare {

const char* to_string(SchedPolicy p) {
    switch (p) {
        case SchedPolicy::DropTail: return "DropTail";
        case SchedPolicy::Red: return "RED";
        case SchedPolicy::Codel: return "CoDel";
        case SchedPolicy::Srr: return "SRR";
        case SchedPolicy::Pq: return "PQ";
        case SchedPolicy::Upnq: return "UPNQ";
        case SchedPolicy::Hpss: return "HPSS";
        case SchedPolicy::Cbq: return "CBQ";
    }
    return "?";
}

SchedPolicy sched_policy_from_string(const std::string& name) {
    static const std::unordered_map<std::string, SchedPolicy> table = {
        {"DropTail", SchedPolicy::DropTail}, {"RED", SchedPolicy::Red},
        {"CoDel", SchedPolicy::Codel},       {"SRR", SchedPolicy::Srr},
        {"PQ", SchedPolicy::Pq},             {"UPNQ", SchedPolicy::Upnq},
        {"HPSS", SchedPolicy::Hpss},         {"CBQ", SchedPolicy::Cbq},
    };
    auto it = table.find(name);
    if (it == table.end()) {
        throw std::invalid_argument(
            "unknown policy '" + name +
            "' (valid: DropTail, RED, CoDel, SRR, PQ, UPNQ, HPSS, CBQ)");
    }
    return it->second;
}

const char* to_string(DropReason r) {
    switch (r) {
        case DropReason::QueueFull: return "queue-full";
        case DropReason::RedProbabilistic: return "red-probabilistic";
        case DropReason::UpnqThreshold: return "upnq-threshold";
        case DropReason::HpssRegulation: return "hpss-regulation";
        case DropReason::CodelTarget: return "codel-target";
    }
    return "?";
}

void SchedulerConfig::validate() const {
    if (queue_cap_bytes == 0) throw std::invalid_argument("scheduler: queue_cap must be positive");
    if (!(capacity_up_bps > 0.0)) throw std::invalid_argument("scheduler: capacity must be positive");
    if (!(target_delay_ms > 0.0)) throw std::invalid_argument("scheduler: target_delay_ms must be positive");
    if (!(red_wq > 0.0 && red_wq <= 1.0)) throw std::invalid_argument("scheduler: red_wq outside (0,1]");
    if (!(red_max_p > 0.0 && red_max_p <= 1.0)) throw std::invalid_argument("scheduler: red_max_p outside (0,1]");
    if (!(codel_interval_ms > 0.0)) throw std::invalid_argument("scheduler: codel_interval_ms must be positive");
    if (!(upnq_threshold > 0.0 && upnq_threshold <= 1.0)) {
        throw std::invalid_argument("scheduler: upnq_threshold outside (0,1]");
    }
    if (!(hpss_target_impact_ms >= 0.0)) {
        throw std::invalid_argument("scheduler: hpss_target_impact_ms must be nonnegative");
    }
    if (!(hpss_capacity_threshold_mbps > 0.0)) {
        throw std::invalid_argument("scheduler: hpss_capacity_threshold_mbps must be positive");
    }
    if (!(hpss_share_pct_per_mbps >= 0.0)) {
        throw std::invalid_argument("scheduler: hpss_share_pct_per_mbps must be nonnegative");
    }
    if (!(hpss_guest_share_pct >= 0.0 && hpss_guest_share_pct < 100.0)) {
        throw std::invalid_argument("scheduler: hpss_guest_share_pct outside [0,100)");
    }
    if (!(cbq_home_weight > 0.0 && cbq_home_weight < 1.0)) {
        throw std::invalid_argument("scheduler: cbq_home_weight outside (0,1)");
    }
}

EnqueueOutcome Scheduler::enqueue(Packet pkt, double now) {
    pkt.enqueued = now;
    auto& c = stats_.of(pkt.cls);
    c.offered_packets++;
    c.offered_payload += pkt.payload_bytes;
    c.offered_wire += pkt.wire_bytes;

    std::uint32_t payload = pkt.payload_bytes;
    std::uint32_t wire = pkt.wire_bytes;
    TrafficClass cls = pkt.cls;

    EnqueueOutcome out = do_enqueue(std::move(pkt), now);
    auto& cc = stats_.of(cls);
    if (out.admitted) {
        cc.resident_packets++;
        cc.resident_payload += payload;
        cc.resident_wire += wire;
    } else {
        cc.dropped_packets++;
        cc.dropped_payload += payload;
        cc.dropped_wire += wire;
        stats_.drops_by_reason[static_cast<std::size_t>(out.reason)]++;
    }
    return out;
}

std::optional<Packet> Scheduler::dequeue(double now) {
    std::optional<Packet> p = do_dequeue(now);
    if (p) {
        p->dequeued = now;
        auto& c = stats_.of(p->cls);
        c.resident_packets--;
        c.resident_payload -= p->payload_bytes;
        c.resident_wire -= p->wire_bytes;
        c.served_packets++;
        c.served_payload += p->payload_bytes;
        c.served_wire += p->wire_bytes;
        double d = now - p->enqueued;
        c.delay_sum_s += d;
        c.delay_samples++;
        c.delay_max_s = std::max(c.delay_max_s, d);
    }
    return p;
}

void Scheduler::count_drop(const Packet& pkt, DropReason reason, bool was_resident) {
    auto& c = stats_.of(pkt.cls);
    c.dropped_packets++;
    c.dropped_payload += pkt.payload_bytes;
    c.dropped_wire += pkt.wire_bytes;
    if (was_resident) {
        c.resident_packets--;
        c.resident_payload -= pkt.payload_bytes;
        c.resident_wire -= pkt.wire_bytes;
    }
    stats_.drops_by_reason[static_cast<std::size_t>(reason)]++;
}

// ---- building blocks ----

RedParams red_thresholds(double target_delay_ms, double capacity_up_bps, double max_p) {
    RedParams p;
    p.min_th_bytes = target_delay_ms / 1e3 * capacity_up_bps / 8.0;
    p.max_th_bytes = 3.0 * p.min_th_bytes;
    p.max_p = max_p;
    return p;
}

double red_drop_probability(double avg_queue_bytes, const RedParams& params) {
    if (avg_queue_bytes < params.min_th_bytes) return 0.0;
    if (avg_queue_bytes > params.max_th_bytes) return 1.0;
    double span = params.max_th_bytes - params.min_th_bytes;
    if (span <= 0.0) return 1.0;
    return params.max_p * (avg_queue_bytes - params.min_th_bytes) / span;
}

bool red_admit(double avg_queue_bytes, const RedParams& params, RngStream& rng) {
    double p = red_drop_probability(avg_queue_bytes, params);
    if (p <= 0.0) return true;
    if (p >= 1.0) return false;
    return rng.uniform01() >= p;
}

CodelControl::Verdict CodelControl::on_head(double sojourn_s, double now, bool queue_almost_empty) {
    bool ok_to_drop = false;
    if (sojourn_s < target_ || queue_almost_empty) {
        first_above_ = 0.0;
    } else if (first_above_ == 0.0) {
        first_above_ = now + interval_;
    } else if (now >= first_above_) {
        ok_to_drop = true;
    }

    if (dropping_) {
        if (!ok_to_drop) {
            dropping_ = false;
            return Verdict::Serve;
        }
        if (now >= drop_next_) {
            ++count_;
            drop_next_ += interval_ / std::sqrt(static_cast<double>(count_));
            return Verdict::DropHead;
        }
        return Verdict::Serve;
    }

    if (ok_to_drop) {
        dropping_ = true;
        // Resume at the previous drop rate if we left the dropping state
        // only recently; otherwise restart gently.
        std::uint32_t delta = count_ - lastcount_;
        count_ = (delta > 1 && now - drop_next_ < 16.0 * interval_) ? delta : 1;
        drop_next_ = now + interval_ / std::sqrt(static_cast<double>(count_));
        lastcount_ = count_;
        return Verdict::DropHead;
    }
    return Verdict::Serve;
}

WfqSelector::WfqSelector(double home_weight, double guest_weight) {
    if (!(home_weight > 0.0) || !(guest_weight > 0.0)) {
        throw std::invalid_argument("wfq: weights must be positive");
    }
    double sum = home_weight + guest_weight;
    weight_[0] = home_weight / sum;
    weight_[1] = guest_weight / sum;
}

void WfqSelector::on_backlogged(TrafficClass c) {
    auto i = static_cast<std::size_t>(c);
    finish_[i] = std::max(finish_[i], vtime_);
}

TrafficClass WfqSelector::select(bool home_backlogged, std::uint64_t home_head_wire,
                                 bool guest_backlogged, std::uint64_t guest_head_wire) const {
    if (!home_backlogged && !guest_backlogged) {
        throw std::logic_error("wfq: select with no backlog");
    }
    if (!guest_backlogged) return TrafficClass::Home;
    if (!home_backlogged) return TrafficClass::Guest;
    double fh = finish_[0] + static_cast<double>(home_head_wire) / weight_[0];
    double fg = finish_[1] + static_cast<double>(guest_head_wire) / weight_[1];
    return fg < fh ? TrafficClass::Guest : TrafficClass::Home;  // ties go to home
}

void WfqSelector::on_serve(TrafficClass c, std::uint64_t wire_bytes) {
    auto i = static_cast<std::size_t>(c);
    finish_[i] += static_cast<double>(wire_bytes) / weight_[i];
    vtime_ = std::max(vtime_, finish_[i]);
}

const char* to_string(HpssMode m) {
    return m == HpssMode::PqMode ? "pq-mode" : "wfq-mode";
}

HpssMode hpss_select_mode(double capacity_up_mbps, double threshold_mbps) {
    if (!(threshold_mbps > 0.0)) {
        throw std::invalid_argument("hpss: capacity threshold must be positive");
    }
    return capacity_up_mbps >= threshold_mbps ? HpssMode::WfqMode : HpssMode::PqMode;
}

double hpss_guest_share_pct(double capacity_up_mbps, double pct_per_mbps, double threshold_mbps) {
    if (hpss_select_mode(capacity_up_mbps, threshold_mbps) != HpssMode::WfqMode) {
        throw std::logic_error("hpss: guest share is undefined in pq-mode");
    }
    return pct_per_mbps * capacity_up_mbps;
}

void HpssImpactTracker::prune(double now) {
    while (!window_.empty() && window_.front().first <= now - window_s_) {
        impact_sum_ -= window_.front().second;
        window_.pop_front();
    }
}

void HpssImpactTracker::on_home_dequeue(double now, double guest_busy_at_enqueue) {
    double impact = guest_busy_ - guest_busy_at_enqueue;
    window_.emplace_back(now, impact);
    impact_sum_ += impact;
    prune(now);
}

bool HpssImpactTracker::window_empty(double now) {
    prune(now);
    return window_.empty();
}

double HpssImpactTracker::mean_impact_s(double now) {
    prune(now);
    if (window_.empty()) return 0.0;
    return impact_sum_ / static_cast<double>(window_.size());
}

// ---- policy implementations ----

namespace {

// FIFO with a wire-byte budget.
class ByteQueue {
public:
    bool fits(const Packet& p, std::uint64_t cap) const { return wire_ + p.wire_bytes <= cap; }
    void push(Packet&& p) {
        wire_ += p.wire_bytes;
        q_.push_back(std::move(p));
    }
    Packet pop() {
        Packet p = std::move(q_.front());
        q_.pop_front();
        wire_ -= p.wire_bytes;
        return p;
    }
    bool empty() const { return q_.empty(); }
    const Packet& head() const { return q_.front(); }
    std::uint64_t wire_bytes() const { return wire_; }

private:
    std::deque<Packet> q_;
    std::uint64_t wire_ = 0;
};

class DropTailScheduler : public Scheduler {
public:
    using Scheduler::Scheduler;
    bool empty() const override { return q_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double) override {
        if (!q_.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
        q_.push(std::move(pkt));
        return {true, {}};
    }
    std::optional<Packet> do_dequeue(double) override {
        if (q_.empty()) return std::nullopt;
        return q_.pop();
    }

    ByteQueue q_;
};

class RedScheduler : public Scheduler {
public:
    explicit RedScheduler(const SchedulerConfig& cfg)
        : Scheduler(cfg),
          params_(red_thresholds(cfg.target_delay_ms, cfg.capacity_up_bps, cfg.red_max_p)),
          rng_(cfg.seed, "sched.red") {}

    bool empty() const override { return q_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double) override {
        avg_ = (1.0 - cfg_.red_wq) * avg_ + cfg_.red_wq * static_cast<double>(q_.wire_bytes());
        if (!q_.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
        if (!red_admit(avg_, params_, rng_)) return {false, DropReason::RedProbabilistic};
        q_.push(std::move(pkt));
        return {true, {}};
    }
    std::optional<Packet> do_dequeue(double) override {
        if (q_.empty()) return std::nullopt;
        return q_.pop();
    }

private:
    ByteQueue q_;
    RedParams params_;
    double avg_ = 0.0;
    RngStream rng_;
};

class CodelScheduler : public Scheduler {
public:
    explicit CodelScheduler(const SchedulerConfig& cfg)
        : Scheduler(cfg),
          control_(cfg.target_delay_ms / 1e3, cfg.codel_interval_ms / 1e3) {}

    bool empty() const override { return q_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double) override {
        if (!q_.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
        q_.push(std::move(pkt));
        return {true, {}};
    }
    std::optional<Packet> do_dequeue(double now) override {
        while (!q_.empty()) {
            Packet p = q_.pop();
            bool almost_empty = q_.wire_bytes() <= kMssBytes + kHeaderBytes;
            auto verdict = control_.on_head(now - p.enqueued, now, almost_empty);
            if (verdict == CodelControl::Verdict::Serve) return p;
            count_drop(p, DropReason::CodelTarget, true);
        }
        return std::nullopt;
    }

private:
    ByteQueue q_;
    CodelControl control_;
};

// Equal-weight smoothed round robin degenerates to plain round robin over
// the active flows; the ring holds only nonempty flow queues.
class SrrScheduler : public Scheduler {
public:
    using Scheduler::Scheduler;
    bool empty() const override { return total_wire_ == 0 && ring_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double) override {
        if (total_wire_ + pkt.wire_bytes > cfg_.queue_cap_bytes) {
            return {false, DropReason::QueueFull};
        }
        auto [it, created] = index_.try_emplace(pkt.flow_id, flows_.size());
        if (created) flows_.emplace_back();
        auto& fq = flows_[it->second];
        if (fq.empty()) ring_.push_back(it->second);
        total_wire_ += pkt.wire_bytes;
        fq.push_back(std::move(pkt));
        return {true, {}};
    }

    std::optional<Packet> do_dequeue(double) override {
        if (ring_.empty()) return std::nullopt;
        std::size_t idx = ring_.front();
        ring_.pop_front();
        auto& fq = flows_[idx];
        Packet p = std::move(fq.front());
        fq.pop_front();
        total_wire_ -= p.wire_bytes;
        if (!fq.empty()) ring_.push_back(idx);
        return p;
    }

private:
    std::vector<std::deque<Packet>> flows_;
    std::unordered_map<std::uint32_t, std::size_t> index_;
    std::deque<std::size_t> ring_;
    std::uint64_t total_wire_ = 0;
};

// Strict non-preemptive priority over two class FIFOs. UPNQ adds the
// home-occupancy admission gate for guest packets.
class PqScheduler : public Scheduler {
public:
    PqScheduler(const SchedulerConfig& cfg, bool upnq_gate)
        : Scheduler(cfg), upnq_gate_(upnq_gate) {}

    bool empty() const override { return home_.empty() && guest_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double) override {
        if (pkt.cls == TrafficClass::Home) {
            if (!home_.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
            home_.push(std::move(pkt));
            return {true, {}};
        }
        if (upnq_gate_ &&
            static_cast<double>(home_.wire_bytes()) >
                cfg_.upnq_threshold * static_cast<double>(cfg_.queue_cap_bytes)) {
            return {false, DropReason::UpnqThreshold};
        }
        if (!guest_.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
        guest_.push(std::move(pkt));
        return {true, {}};
    }

    std::optional<Packet> do_dequeue(double) override {
        if (!home_.empty()) return home_.pop();
        if (!guest_.empty()) return guest_.pop();
        return std::nullopt;
    }

private:
    ByteQueue home_;
    ByteQueue guest_;
    bool upnq_gate_;
};

class WfqScheduler : public Scheduler {
public:
    WfqScheduler(const SchedulerConfig& cfg, double home_weight, double guest_weight)
        : Scheduler(cfg), sel_(home_weight, guest_weight) {}

    bool empty() const override { return home_.empty() && guest_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double) override {
        ByteQueue& q = pkt.cls == TrafficClass::Home ? home_ : guest_;
        if (!q.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
        if (q.empty()) sel_.on_backlogged(pkt.cls);
        q.push(std::move(pkt));
        return {true, {}};
    }

    std::optional<Packet> do_dequeue(double) override {
        if (home_.empty() && guest_.empty()) return std::nullopt;
        TrafficClass c = sel_.select(!home_.empty(), home_.empty() ? 0 : home_.head().wire_bytes,
                                     !guest_.empty(), guest_.empty() ? 0 : guest_.head().wire_bytes);
        Packet p = (c == TrafficClass::Home ? home_ : guest_).pop();
        sel_.on_serve(c, p.wire_bytes);
        return p;
    }

private:
    ByteQueue home_;
    ByteQueue guest_;
    WfqSelector sel_;
};

// HPSS below the capacity threshold: priority queueing plus the rolling
// delay-impact admission rule for guest packets.
class HpssPqScheduler : public Scheduler {
public:
    explicit HpssPqScheduler(const SchedulerConfig& cfg) : Scheduler(cfg) {}

    bool empty() const override { return home_.empty() && guest_.empty(); }

protected:
    EnqueueOutcome do_enqueue(Packet&& pkt, double now) override {
        if (pkt.cls == TrafficClass::Home) {
            if (home_wire_ + pkt.wire_bytes > cfg_.queue_cap_bytes) {
                return {false, DropReason::QueueFull};
            }
            home_wire_ += pkt.wire_bytes;
            home_.emplace_back(std::move(pkt), tracker_.guest_busy());
            return {true, {}};
        }
        if (!guest_.fits(pkt, cfg_.queue_cap_bytes)) return {false, DropReason::QueueFull};
        if (!tracker_.window_empty(now)) {
            double burden_s =
                static_cast<double>(guest_.wire_bytes() + pkt.wire_bytes) * 8.0 / cfg_.capacity_up_bps;
            if (tracker_.mean_impact_s(now) + burden_s > cfg_.hpss_target_impact_ms / 1e3) {
                return {false, DropReason::HpssRegulation};
            }
        }
        guest_.push(std::move(pkt));
        return {true, {}};
    }

    std::optional<Packet> do_dequeue(double now) override {
        if (!home_.empty()) {
            auto [pkt, g_enq] = std::move(home_.front());
            home_.pop_front();
            home_wire_ -= pkt.wire_bytes;
            tracker_.on_home_dequeue(now, g_enq);
            return pkt;
        }
        if (!guest_.empty()) {
            Packet p = guest_.pop();
            tracker_.on_guest_service(static_cast<double>(p.wire_bytes) * 8.0 / cfg_.capacity_up_bps);
            return p;
        }
        return std::nullopt;
    }

private:
    std::deque<std::pair<Packet, double>> home_;
    std::uint64_t home_wire_ = 0;
    ByteQueue guest_;
    HpssImpactTracker tracker_;
};

}  // namespace

std::unique_ptr<Scheduler> Scheduler::make(const SchedulerConfig& cfg) {
    cfg.validate();
    switch (cfg.policy) {
        case SchedPolicy::DropTail:
            return std::make_unique<DropTailScheduler>(cfg);
        case SchedPolicy::Red:
            return std::make_unique<RedScheduler>(cfg);
        case SchedPolicy::Codel:
            return std::make_unique<CodelScheduler>(cfg);
        case SchedPolicy::Srr:
            return std::make_unique<SrrScheduler>(cfg);
        case SchedPolicy::Pq:
            return std::make_unique<PqScheduler>(cfg, false);
        case SchedPolicy::Upnq:
            return std::make_unique<PqScheduler>(cfg, true);
        case SchedPolicy::Cbq:
            return std::make_unique<WfqScheduler>(cfg, cfg.cbq_home_weight, 1.0 - cfg.cbq_home_weight);
        case SchedPolicy::Hpss: {
            double capacity_mbps = cfg.capacity_up_bps / 1e6;
            if (hpss_select_mode(capacity_mbps, cfg.hpss_capacity_threshold_mbps) == HpssMode::WfqMode) {
                double share = cfg.hpss_guest_share_pct > 0.0
                                   ? cfg.hpss_guest_share_pct
                                   : hpss_guest_share_pct(capacity_mbps, cfg.hpss_share_pct_per_mbps,
                                                          cfg.hpss_capacity_threshold_mbps);
                return std::make_unique<WfqScheduler>(cfg, 1.0 - share / 100.0, share / 100.0);
            }
            return std::make_unique<HpssPqScheduler>(cfg);
        }
    }
    throw std::logic_error("scheduler: unreachable policy");
}

}  // namespace fairshare
