#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "ranstack/pdu.hpp"

namespace ranstack::pdcp {

using Key = std::array<std::uint8_t, 16>;

// Keyed XOR keystream: applying it twice is the identity, which is what the
// test oracles (and handover dedup) rely on. Stands in for real ciphering.
void cipher_in_place(Bytes& payload, const Key& key, std::uint16_t sn);

// The modeled 40-byte upper-protocol header for a bearer; traffic sources
// synthesize SDUs starting with it and compression strips it to a 4-byte tag.
Bytes upper_header_for(std::string_view bearer_id);

struct Counters {
    std::int64_t delivered = 0;
    std::int64_t duplicates_discarded = 0;
    std::int64_t gaps_skipped = 0;
    std::int64_t late_discarded = 0;  // behind the window, never delivered
    std::int64_t reorder_peak_depth = 0;
    std::int64_t unconfirmed_evicted = 0;
};

// One PDCP entity per bearer, common to every RAT the bearer rides on:
// 12-bit sequence numbers, window 2048, reordering timer, duplicate discard,
// ciphering stub, header compression stub and a retransmit buffer for
// lossless handover.
class PdcpEntity {
public:
    PdcpEntity() = default;
    PdcpEntity(std::uint32_t bearer, std::string_view bearer_id);

    void set_key(const Key& key) { key_ = key; }
    const Key& key() const { return key_; }
    const Bytes& upper_header() const { return upper_header_; }

    // Assigns the next SN (mod 4096), compresses the modeled upper header,
    // ciphers the payload and stores a copy for handover retransmission.
    PdcpPdu tx(const Sdu& sdu);

    struct RxResult {
        std::vector<Sdu> delivered;  // in-sequence, ready for the application
    };

    RxResult rx(const PdcpPdu& pdu, SimTime now);

    // Reordering-timer surface for the event loop: a deadline is valid only
    // while the epoch matches, so superseded timers fall through harmlessly.
    std::optional<SimTime> reorder_deadline() const { return reorder_deadline_; }
    std::uint64_t reorder_epoch() const { return reorder_epoch_; }
    RxResult on_reorder_expiry(SimTime now, std::uint64_t epoch);

    // Delivery confirmation from the MAC/RLC feedback path; keyed by the
    // absolute sequence because wire SNs wrap.
    void confirm(std::uint64_t seq);

    // All unconfirmed PDUs, original SNs preserved, for re-dispatch on the
    // new tunnels after a handover.
    std::vector<PdcpPdu> handover_flush() const;

    std::size_t unconfirmed() const { return retransmit_buffer_.size(); }
    std::size_t reorder_depth() const { return reorder_buffer_.size(); }
    std::uint64_t tx_next() const { return tx_next_; }
    std::uint64_t rx_deliv() const { return rx_deliv_; }
    const Counters& counters() const { return counters_; }

private:
    Sdu to_sdu(const PdcpPdu& pdu) const;
    void deliver_ready(RxResult& out);
    void update_timer(SimTime now);
    void prune_skipped();

    std::uint32_t bearer_ = 0;
    Key key_{};
    Bytes upper_header_;
    std::uint32_t header_tag_ = 0;

    std::uint64_t tx_next_ = 0;    // absolute; wire SN = tx_next_ % 4096
    std::uint64_t rx_deliv_ = 0;   // absolute next expected

    std::map<std::uint64_t, PdcpPdu> reorder_buffer_;
    std::optional<SimTime> reorder_deadline_;
    std::uint64_t reorder_epoch_ = 0;

    // Absolutes behind rx_deliv_ that were skipped by the reordering timer
    // (everything else behind the edge was delivered). Kept sparse: gaps are
    // rare, a per-entity status ring would not scale to bulk UE populations.
    std::set<std::uint64_t> skipped_;

    std::map<std::uint64_t, PdcpPdu> retransmit_buffer_;  // seq -> wire PDU
    Counters counters_;
};

}  // namespace ranstack::pdcp
