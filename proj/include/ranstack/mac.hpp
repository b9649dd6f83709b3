#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ranstack/domain.hpp"
#include "ranstack/pdu.hpp"
#include "ranstack/rng.hpp"

namespace ranstack::mac {

enum class Access { GRANTED, DEFERRED };

// Per-TTI band access arbitration. Licensed bands always grant; lightly
// licensed bands defer while a scenario-declared incumbent is active;
// unlicensed bands grant with probability (1 - busy_prob).
Access band_access(const CarrierCfg& carrier, SimTime now, Rng& rng);

// Scheduling input for one logical channel on one carrier. se_bits_per_ru is
// the channel owner's link rate on that carrier; 0 makes it unschedulable.
struct SchedChannel {
    std::uint32_t channel = 0;
    int priority = 0;  // lower = more urgent tier
    std::int64_t pending_bytes = 0;
    int se_bits_per_ru = 0;
};

struct Allocation {
    std::uint32_t channel = 0;
    int ru = 0;
    std::int64_t bytes = 0;
};

// Round-robin cursor per priority tier; persists across TTIs.
using RrCursors = std::map<int, std::uint32_t>;

// Priority-tiered round robin: strict priority between tiers, max-min fair
// water-filling in resource units inside a tier. Channels with empty queues
// receive nothing; the sum of granted RUs never exceeds ru_total.
std::vector<Allocation> schedule_tti(int ru_total, std::vector<SchedChannel> channels,
                                     RrCursors& cursors);

enum class HarqState { IDLE, WAITING_FEEDBACK };
enum class HarqResult { DONE, RETRANSMIT, DROP };

struct HarqProcess {
    int process_id = 0;
    HarqState state = HarqState::IDLE;
    int tx_count = 0;
    int max_tx = kHarqMaxTx;
    TransportBlock tb;
};

// Stop-and-wait HARQ bank: one per (carrier, UE) when the RAT runs HARQ.
class HarqBank {
public:
    HarqBank();

    // Free process for new data, or nullptr when all are in flight.
    HarqProcess* acquire();

    HarqProcess& process(int id);

    // Feedback for a process that is waiting for it. DELIVERED finishes the
    // block; LOST either schedules a retransmission (same block, tx_count+1)
    // or gives up at max_tx and reports the drop upward. Feedback for an
    // idle process is a protocol bug.
    HarqResult feedback(HarqProcess& proc, bool delivered);

    int in_flight() const;

private:
    std::vector<HarqProcess> processes_;
};

// Multiplexes per-channel RLC PDUs into one transport block.
TransportBlock mux(std::uint64_t tb_id, std::uint32_t carrier, std::uint32_t ue,
                   std::vector<MacSubPdu> subpdus, int ru_cost);

// Demultiplexes a transport block back into per-channel PDUs, preserving
// order. A block whose declared size disagrees with its contents is
// malformed and yields nothing.
std::optional<std::vector<MacSubPdu>> demux(const TransportBlock& tb);

}  // namespace ranstack::mac
