#include "ranstack/mac.hpp"

#include <algorithm>

namespace ranstack::mac {

Access band_access(const CarrierCfg& carrier, SimTime now, Rng& rng) {
    switch (carrier.regime) {
        case BandRegime::LICENSED:
            return Access::GRANTED;
        case BandRegime::LIGHTLY_LICENSED: {
            const double now_ms = us_to_ms(now);
            for (const auto& w : carrier.incumbent_windows) {
                if (now_ms >= w.start_ms && now_ms < w.end_ms) return Access::DEFERRED;
            }
            return Access::GRANTED;
        }
        case BandRegime::UNLICENSED:
            return rng.bernoulli(carrier.busy_prob) ? Access::DEFERRED : Access::GRANTED;
    }
    return Access::GRANTED;
}

std::vector<Allocation> schedule_tti(int ru_total, std::vector<SchedChannel> channels,
                                     RrCursors& cursors) {
    std::vector<Allocation> result;
    if (ru_total <= 0) return result;

    std::map<int, std::vector<SchedChannel>> tiers;
    for (auto& ch : channels) {
        if (ch.pending_bytes > 0 && ch.se_bits_per_ru > 0) tiers[ch.priority].push_back(ch);
    }

    int pool = ru_total;
    for (auto& [priority, members] : tiers) {
        if (pool <= 0) break;
        std::sort(members.begin(), members.end(),
                  [](const SchedChannel& a, const SchedChannel& b) { return a.channel < b.channel; });

        // Visiting order starts at the persisted cursor (ascending channel
        // id, wrapping), so leftover capacity rotates fairly across TTIs.
        const std::uint32_t cursor = cursors.count(priority) ? cursors[priority] : 0;
        auto pivot = std::find_if(members.begin(), members.end(),
                                  [&](const SchedChannel& ch) { return ch.channel >= cursor; });
        if (pivot != members.end() && pivot != members.begin()) {
            std::rotate(members.begin(), pivot, members.end());
        }

        struct Need {
            SchedChannel ch;
            int ru_needed;
            int ru_granted = 0;
        };
        std::vector<Need> needs;
        needs.reserve(members.size());
        for (const auto& ch : members) {
            const std::int64_t bits = ch.pending_bytes * 8;
            const auto ru = static_cast<int>((bits + ch.se_bits_per_ru - 1) / ch.se_bits_per_ru);
            needs.push_back({ch, ru});
        }

        // Max-min fair water-filling in whole resource units: channels that
        // need less than their share free capacity for the rest.
        int unsatisfied = static_cast<int>(needs.size());
        while (pool > 0 && unsatisfied > 0) {
            const int quantum = std::max(1, pool / unsatisfied);
            bool progressed = false;
            for (auto& n : needs) {
                if (pool <= 0) break;
                if (n.ru_granted >= n.ru_needed) continue;
                const int grant = std::min({quantum, n.ru_needed - n.ru_granted, pool});
                if (grant <= 0) continue;
                n.ru_granted += grant;
                pool -= grant;
                progressed = true;
                if (n.ru_granted >= n.ru_needed) --unsatisfied;
            }
            if (!progressed) break;
        }

        for (const auto& n : needs) {
            if (n.ru_granted <= 0) continue;
            const std::int64_t byte_cap = static_cast<std::int64_t>(n.ru_granted) *
                                          n.ch.se_bits_per_ru / 8;
            const std::int64_t bytes = std::min(n.ch.pending_bytes, byte_cap);
            if (bytes <= 0) continue;
            result.push_back({n.ch.channel, n.ru_granted, bytes});
        }

        // Advance the cursor to the first channel left wanting, so it is
        // served first next TTI; fully satisfied tiers keep their cursor.
        for (const auto& n : needs) {
            if (n.ru_granted < n.ru_needed) {
                cursors[priority] = n.ch.channel;
                break;
            }
        }
    }

    return result;
}

HarqBank::HarqBank() {
    processes_.resize(kHarqProcesses);
    for (int i = 0; i < kHarqProcesses; ++i) processes_[i].process_id = i;
}

HarqProcess* HarqBank::acquire() {
    for (auto& p : processes_) {
        if (p.state == HarqState::IDLE) return &p;
    }
    return nullptr;
}

HarqProcess& HarqBank::process(int id) { return processes_.at(static_cast<std::size_t>(id)); }

HarqResult HarqBank::feedback(HarqProcess& proc, bool delivered) {
    if (proc.state != HarqState::WAITING_FEEDBACK) {
        throw ProtocolError("HARQ feedback for idle process " + std::to_string(proc.process_id));
    }
    if (delivered) {
        proc.state = HarqState::IDLE;
        proc.tx_count = 0;
        proc.tb = {};
        return HarqResult::DONE;
    }
    if (proc.tx_count < proc.max_tx) {
        // Same block goes again; the retransmission preempts new data on
        // this process until it resolves.
        return HarqResult::RETRANSMIT;
    }
    proc.state = HarqState::IDLE;
    proc.tx_count = 0;
    proc.tb = {};
    return HarqResult::DROP;
}

int HarqBank::in_flight() const {
    int n = 0;
    for (const auto& p : processes_) {
        if (p.state == HarqState::WAITING_FEEDBACK) ++n;
    }
    return n;
}

TransportBlock mux(std::uint64_t tb_id, std::uint32_t carrier, std::uint32_t ue,
                   std::vector<MacSubPdu> subpdus, int ru_cost) {
    TransportBlock tb;
    tb.tb_id = tb_id;
    tb.carrier = carrier;
    tb.ue = ue;
    tb.ru_cost = ru_cost;
    tb.subpdus = std::move(subpdus);
    tb.declared_bytes = tb.wire_bytes();
    return tb;
}

std::optional<std::vector<MacSubPdu>> demux(const TransportBlock& tb) {
    if (tb.declared_bytes != tb.wire_bytes()) return std::nullopt;
    return tb.subpdus;
}

}  // namespace ranstack::mac
