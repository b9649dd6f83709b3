#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ranstack/pdu.hpp"

namespace ranstack::rlc {

enum class Mode { TRANSPARENT, UNACKNOWLEDGED };

// Splits one PDCP PDU into unacknowledged-mode segments whose wire size
// (header + payload share) never exceeds max_bytes. Transparent entities
// use the PDU whole instead of calling this.
std::vector<RlcPdu> segment(const PdcpPdu& pdu, int max_bytes);

struct RxCounters {
    std::int64_t delivered = 0;
    std::int64_t duplicate_segments = 0;
    std::int64_t inconsistent_discards = 0;
    std::int64_t timeout_discards = 0;
};

// Receive-side entity: transparent pass-through or per-SN reassembly with
// duplicate suppression, overlap consistency checking and a discard timer
// for stale partial PDUs.
class RxEntity {
public:
    RxEntity() = default;
    explicit RxEntity(Mode mode) : mode_(mode) {}

    Mode mode() const { return mode_; }

    // Feeds one PDU/segment; returns the reassembled PDCP PDU when complete.
    std::optional<PdcpPdu> on_pdu(const RlcPdu& pdu, SimTime now);

    // Discards partial PDUs older than the reassembly timeout.
    void poll_timeouts(SimTime now);

    bool has_partials() const { return !partials_.empty(); }
    const RxCounters& counters() const { return counters_; }

private:
    struct Partial {
        SimTime started_at = 0;
        std::uint32_t total_len = 0;  // known once the last segment arrives
        bool last_seen = false;
        std::uint32_t covered = 0;
        std::map<std::uint32_t, Bytes> chunks;  // offset -> bytes, non-overlapping
        RlcPdu header_template;
    };

    std::optional<PdcpPdu> try_complete(std::uint16_t sn, Partial& p);

    Mode mode_ = Mode::UNACKNOWLEDGED;
    std::map<std::uint16_t, Partial> partials_;
    RxCounters counters_;
};

}  // namespace ranstack::rlc
