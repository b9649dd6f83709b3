#include "ranstack/rrc.hpp"

#include <algorithm>

#include "ranstack/rng.hpp"

namespace ranstack::rrc {

PageOutcome page(RrcState ue_state, bool ue_detects_cell) {
    if (ue_state == RrcState::CONNECTED) return PageOutcome::NOOP;
    return ue_detects_cell ? PageOutcome::REACHED : PageOutcome::UNREACHED;
}

void check_establish(RrcState state) {
    if (state != RrcState::IDLE) {
        throw ProtocolError("establish on a UE that is not IDLE");
    }
}

void check_release(RrcState state) {
    if (state != RrcState::CONNECTED) {
        throw ProtocolError("release on a UE that is not CONNECTED");
    }
}

std::array<std::uint8_t, 16> derive_key(std::string_view ue_id, std::string_view cell_id,
                                        std::uint64_t nonce) {
    std::uint64_t h = fnv1a64(ue_id);
    h = fnv1a64(cell_id.data(), cell_id.size(), h);
    h = fnv1a64(&nonce, sizeof(nonce), h);
    std::uint64_t lo = h;
    const std::uint64_t hi = splitmix64(lo);
    std::array<std::uint8_t, 16> key{};
    for (int i = 0; i < 8; ++i) {
        key[i] = static_cast<std::uint8_t>(h >> (8 * i));
        key[8 + i] = static_cast<std::uint8_t>(hi >> (8 * i));
    }
    return key;
}

std::optional<HandoverDecision> A3Tracker::feed(const MeasurementReport& report,
                                                std::uint32_t serving_cell, double a3_offset_db,
                                                SimTime time_to_trigger_us) {
    // Serving metric: best configured carrier of the serving cell.
    double serving_sinr = -1e9;
    bool serving_seen = false;
    for (const auto& [cell, carrier, sinr] : report.entries) {
        if (cell == serving_cell) {
            serving_sinr = std::max(serving_sinr, sinr);
            serving_seen = true;
        }
    }
    if (!serving_seen) serving_sinr = -1e9;  // serving faded out entirely

    std::map<std::uint32_t, double> neighbour_best;
    for (const auto& [cell, carrier, sinr] : report.entries) {
        if (cell == serving_cell) continue;
        auto [it, inserted] = neighbour_best.emplace(cell, sinr);
        if (!inserted) it->second = std::max(it->second, sinr);
    }

    std::optional<HandoverDecision> decision;
    for (auto it = better_since_.begin(); it != better_since_.end();) {
        const auto found = neighbour_best.find(it->first);
        if (found == neighbour_best.end() || found->second < serving_sinr + a3_offset_db) {
            it = better_since_.erase(it);  // condition broke; hysteresis restarts
        } else {
            ++it;
        }
    }
    for (const auto& [cell, sinr] : neighbour_best) {
        if (sinr < serving_sinr + a3_offset_db) continue;
        auto [it, inserted] = better_since_.emplace(cell, report.timestamp);
        if (report.timestamp - it->second >= time_to_trigger_us && !decision) {
            decision = HandoverDecision{report.ue, serving_cell, cell, report.timestamp};
        }
    }
    if (decision) better_since_.clear();
    return decision;
}

}  // namespace ranstack::rrc
