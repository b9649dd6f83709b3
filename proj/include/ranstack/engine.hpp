#pragma once

#include <iosfwd>
#include <optional>

#include "ranstack/domain.hpp"
#include "ranstack/metrics.hpp"
#include "ranstack/rng.hpp"

namespace ranstack::engine {

// Event kinds in pop order at equal timestamps: control-plane first, then
// arrivals and confirmations, timers, and finally the TTI tick that consumes
// them. Ties inside a kind break on the monotone sequence number.
enum class EventKind : int {
    CONTROL = 0,
    TRAFFIC_ARRIVAL = 1,
    CONFIRMATION = 2,
    TIMER = 3,
    TTI_TICK = 4,
};

struct EventKey {
    SimTime time = 0;
    EventKind kind = EventKind::CONTROL;
    std::uint64_t seq = 0;
};

inline bool event_before(const EventKey& a, const EventKey& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.seq < b.seq;
}

struct TraceSinks {
    std::ostream* mac = nullptr;
    std::ostream* rrm = nullptr;
    std::ostream* rrc = nullptr;
};

struct RunOptions {
    bool keep_going = false;
    TraceSinks trace;
    std::optional<double> duration_ms_override;
};

// Arrival instants of a (non full-buffer) traffic model over [0, horizon).
// Periodic models draw their phase once; Poisson models draw exponential
// gaps. The engine consumes the same stream incrementally.
std::vector<SimTime> arrival_times(const TrafficCfg& cfg, SimTime horizon_us, Rng& rng);

// Runs the scenario for its configured duration. All randomness comes from
// (seed)-derived substreams, so identical (scenario, seed) pairs produce
// byte-identical reports. Throws SimAbort on a mid-run invariant violation
// unless options.keep_going is set.
MetricsReport run(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options = {});

}  // namespace ranstack::engine
