#include "ranstack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace ranstack {

using nlohmann::json;

double percentile_ms(std::vector<double> samples, double q) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank == 0) rank = 1;
    return samples[rank - 1];
}

std::string MetricsReport::to_json(int indent) const {
    json j;
    j["schema"] = schema;
    j["scenario_hash"] = scenario_hash;
    j["seed"] = seed;
    j["duration_ms"] = duration_ms;

    j["global"] = {{"offered", global.offered},
                   {"delivered", global.delivered},
                   {"lost", global.lost},
                   {"in_flight_end", global.in_flight_end},
                   {"audit_ok", global.audit_ok},
                   {"in_order_violations", global.in_order_violations},
                   {"payload_mismatches", global.payload_mismatches},
                   {"attach_failures", global.attach_failures},
                   {"handovers", global.handovers},
                   {"handovers_aborted", global.handovers_aborted},
                   {"stale_tb_drops", global.stale_tb_drops},
                   {"qos_escalations", global.qos_escalations},
                   {"qos_flags", global.qos_flags},
                   {"events_processed", global.events_processed}};

    j["bearers"] = json::array();
    for (const auto& b : bearers) {
        json bj;
        bj["id"] = b.id;
        bj["ue"] = b.ue;
        bj["service"] = b.service;
        bj["dispatch"] = b.dispatch;
        bj["offered"] = b.offered;
        bj["delivered"] = b.delivered;
        bj["lost"] = b.lost;
        bj["in_flight_end"] = b.in_flight_end;
        bj["duplicates_discarded"] = b.duplicates_discarded;
        bj["gaps_skipped"] = b.gaps_skipped;
        bj["late_discarded"] = b.late_discarded;
        bj["reorder_peak_depth"] = b.reorder_peak_depth;
        bj["overflow_drops"] = b.overflow_drops;
        bj["in_order_violations"] = b.in_order_violations;
        bj["payload_mismatches"] = b.payload_mismatches;
        bj["deadline_misses"] = b.deadline_misses;
        bj["delivered_app_bytes"] = b.delivered_app_bytes;
        bj["delivery_ratio"] = b.delivery_ratio;
        bj["deadline_miss_ratio"] = b.deadline_miss_ratio;
        bj["throughput_bps"] = b.throughput_bps;
        bj["latency_p50_ms"] = b.latency_p50_ms;
        bj["latency_p95_ms"] = b.latency_p95_ms;
        bj["latency_p99_ms"] = b.latency_p99_ms;
        bj["best_effort"] = b.best_effort;
        bj["tunnels"] = json::array();
        for (const auto& t : b.tunnels) {
            bj["tunnels"].push_back({{"cell", t.cell},
                                     {"rat", t.rat},
                                     {"channel", t.channel},
                                     {"placements", t.placements},
                                     {"delivered_copies", t.delivered_copies},
                                     {"share", t.share},
                                     {"ewma_rate_bps", t.ewma_rate_bps}});
        }
        bj["reconfigs"] = json::array();
        for (const auto& r : b.reconfigs) {
            bj["reconfigs"].push_back({{"time_ms", r.time_ms},
                                       {"from", r.from},
                                       {"to", r.to},
                                       {"delivered_app_bytes_at", r.delivered_app_bytes_at}});
        }
        j["bearers"].push_back(std::move(bj));
    }

    j["ues"] = json::array();
    for (const auto& u : ues) {
        j["ues"].push_back({{"id", u.id},
                            {"final_state", u.final_state},
                            {"serving_cells", u.serving_cells},
                            {"offered", u.offered},
                            {"delivered", u.delivered},
                            {"throughput_bps", u.throughput_bps}});
    }

    j["carriers"] = json::array();
    for (const auto& c : carriers) {
        j["carriers"].push_back({{"cell", c.cell},
                                 {"id", c.id},
                                 {"ttis", c.ttis},
                                 {"granted", c.granted},
                                 {"deferred", c.deferred},
                                 {"transport_blocks", c.transport_blocks},
                                 {"retransmissions", c.retransmissions},
                                 {"harq_drops", c.harq_drops},
                                 {"phy_losses", c.phy_losses},
                                 {"grant_rate", c.grant_rate},
                                 {"utilization", c.utilization}});
    }

    return j.dump(indent);
}

std::string MetricsReport::to_csv() const {
    std::ostringstream os;
    os << "bearer,ue,service,dispatch,offered,delivered,lost,delivery_ratio,throughput_bps,"
          "latency_p50_ms,latency_p95_ms,latency_p99_ms,deadline_miss_ratio,"
          "in_order_violations,duplicates_discarded,gaps_skipped,reorder_peak_depth\n";
    os.precision(9);
    for (const auto& b : bearers) {
        os << b.id << ',' << b.ue << ',' << b.service << ',' << b.dispatch << ',' << b.offered
           << ',' << b.delivered << ',' << b.lost << ',' << b.delivery_ratio << ','
           << b.throughput_bps << ',' << b.latency_p50_ms << ',' << b.latency_p95_ms << ','
           << b.latency_p99_ms << ',' << b.deadline_miss_ratio << ',' << b.in_order_violations
           << ',' << b.duplicates_discarded << ',' << b.gaps_skipped << ',' << b.reorder_peak_depth
           << '\n';
    }
    return os.str();
}

}  // namespace ranstack
