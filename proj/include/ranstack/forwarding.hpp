#pragma once

#include <deque>
#include <vector>

#include "ranstack/domain.hpp"
#include "ranstack/pdu.hpp"
#include "ranstack/rng.hpp"

namespace ranstack::fwd {

// Smoothed per-tunnel delivery estimate, updated on every confirmation.
struct PathEstimate {
    double ewma_rate_bps = 0.0;
    double ewma_delay_ms = 0.0;
    SimTime last_update = 0;
    bool has_sample = false;
};

struct Tunnel {
    std::uint32_t channel = 0;  // logical channel carrying this leg
    bool active = true;
    PathEstimate estimate;
};

// Proportional-rate split weights; all-zero rates degrade to uniform.
std::vector<double> split_weights(const std::vector<PathEstimate>& estimates);

struct Counters {
    std::int64_t dispatched = 0;
    std::int64_t placements = 0;
    std::int64_t held = 0;
    std::int64_t overflow_drops = 0;
};

// Per-bearer multipath dispatcher: places each PDCP PDU on one tunnel
// (SINGLE), on one weighted-sampled tunnel (SPLIT) or on every tunnel with
// the same SN (DUPLICATE) - the CoMP enabler. PDUs with no active tunnel
// wait in a bounded hold queue.
class Dispatcher {
public:
    Dispatcher() = default;
    explicit Dispatcher(DispatchMode mode) : mode_(mode) {}

    DispatchMode mode() const { return mode_; }
    void set_mode(DispatchMode mode) { mode_ = mode; }

    std::vector<Tunnel>& tunnels() { return tunnels_; }
    const std::vector<Tunnel>& tunnels() const { return tunnels_; }
    void add_tunnel(std::uint32_t channel) { tunnels_.push_back({channel, true, {}}); }

    // Tunnel indices (into tunnels()) the PDU goes to; empty means held.
    std::vector<std::size_t> dispatch(const PdcpPdu& pdu, Rng& rng);

    // EWMA update from the confirmation path; a loss contributes a zero
    // rate sample over the elapsed interval.
    void confirm(std::size_t tunnel_index, std::int64_t bits, bool delivered, SimTime now,
                 double delay_ms);

    // PDUs parked while no tunnel was active; drained on reactivation.
    std::vector<PdcpPdu> take_held();
    std::size_t held_size() const { return held_.size(); }
    const std::deque<PdcpPdu>& held() const { return held_; }

    const Counters& counters() const { return counters_; }

private:
    std::vector<std::size_t> active_indices() const;

    DispatchMode mode_ = DispatchMode::SINGLE;
    std::vector<Tunnel> tunnels_;
    std::deque<PdcpPdu> held_;
    Counters counters_;
};

}  // namespace ranstack::fwd
