#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranstack/common.hpp"

namespace ranstack {

struct TunnelMetrics {
    std::string cell;
    std::string rat;
    std::string channel;
    std::int64_t placements = 0;
    std::int64_t delivered_copies = 0;
    double share = 0.0;  // fraction of placements
    double ewma_rate_bps = 0.0;
};

struct ReconfigEvent {
    double time_ms = 0.0;
    std::string from;
    std::string to;
    std::int64_t delivered_app_bytes_at = 0;
};

struct BearerMetrics {
    std::string id;
    std::string ue;
    std::string service;
    std::string dispatch;
    std::int64_t offered = 0;
    std::int64_t delivered = 0;
    std::int64_t lost = 0;
    std::int64_t in_flight_end = 0;
    std::int64_t duplicates_discarded = 0;
    std::int64_t gaps_skipped = 0;
    std::int64_t late_discarded = 0;
    std::int64_t reorder_peak_depth = 0;
    std::int64_t overflow_drops = 0;
    std::int64_t in_order_violations = 0;
    std::int64_t payload_mismatches = 0;
    std::int64_t deadline_misses = 0;
    std::int64_t delivered_app_bytes = 0;
    double delivery_ratio = 0.0;
    double deadline_miss_ratio = 0.0;
    double throughput_bps = 0.0;
    double latency_p50_ms = 0.0;
    double latency_p95_ms = 0.0;
    double latency_p99_ms = 0.0;
    bool best_effort = false;
    std::vector<TunnelMetrics> tunnels;
    std::vector<ReconfigEvent> reconfigs;
};

struct CarrierMetrics {
    std::string cell;
    std::string id;
    std::int64_t ttis = 0;
    std::int64_t granted = 0;
    std::int64_t deferred = 0;
    std::int64_t transport_blocks = 0;
    std::int64_t retransmissions = 0;
    std::int64_t harq_drops = 0;
    std::int64_t phy_losses = 0;
    double grant_rate = 0.0;
    double utilization = 0.0;  // fraction of granted resource units used
};

struct UeMetrics {
    std::string id;
    std::string final_state;
    std::vector<std::string> serving_cells;
    std::int64_t offered = 0;
    std::int64_t delivered = 0;
    double throughput_bps = 0.0;
};

struct GlobalMetrics {
    std::int64_t offered = 0;
    std::int64_t delivered = 0;
    std::int64_t lost = 0;
    std::int64_t in_flight_end = 0;
    bool audit_ok = true;
    std::int64_t in_order_violations = 0;
    std::int64_t payload_mismatches = 0;
    std::int64_t attach_failures = 0;
    std::int64_t handovers = 0;
    std::int64_t handovers_aborted = 0;
    std::int64_t stale_tb_drops = 0;
    std::int64_t qos_escalations = 0;
    std::int64_t qos_flags = 0;
    std::int64_t events_processed = 0;
};

struct MetricsReport {
    std::string schema = "ranstack-metrics/1";
    std::string scenario_hash;
    std::uint64_t seed = 0;
    double duration_ms = 0.0;
    GlobalMetrics global;
    std::vector<BearerMetrics> bearers;
    std::vector<UeMetrics> ues;
    std::vector<CarrierMetrics> carriers;

    std::string to_json(int indent = 2) const;
    std::string to_csv() const;  // one row per bearer
};

// Nearest-rank percentile over a copy of the samples; deterministic.
double percentile_ms(std::vector<double> samples, double q);

}  // namespace ranstack
